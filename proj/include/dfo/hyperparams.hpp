#pragma once

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <variant>

namespace dfo {

using ParamValue = std::variant<double, std::string>;

/// Name -> numeric-or-categorical value. Integers are carried as doubles.
class HyperParams {
 public:
  HyperParams() = default;
  HyperParams(std::initializer_list<std::pair<const std::string, ParamValue>> init) : values_(init) {}

  void set(std::string key, ParamValue value) { values_[std::move(key)] = std::move(value); }
  bool contains(std::string_view key) const { return values_.find(key) != values_.end(); }

  double number(std::string_view key, double fallback) const;
  int integer(std::string_view key, int fallback) const;
  std::string text(std::string_view key, std::string_view fallback) const;

  const std::map<std::string, ParamValue, std::less<>>& values() const noexcept { return values_; }

  /// Canonical JSON object (keys sorted, numbers in shortest round-trip form).
  std::string to_json() const;
  static HyperParams from_json(std::string_view text);

  bool operator==(const HyperParams&) const = default;

 private:
  std::map<std::string, ParamValue, std::less<>> values_;
};

/// Shortest decimal that round-trips the double.
std::string format_double(double v);

}  // namespace dfo
