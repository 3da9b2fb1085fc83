#include "dfo/hyperparams.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace dfo {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double HyperParams::number(std::string_view key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const auto* d = std::get_if<double>(&it->second)) return *d;
  throw std::invalid_argument("hyperparameter '" + std::string(key) + "' is categorical, expected a number");
}

int HyperParams::integer(std::string_view key, int fallback) const {
  const double v = number(key, fallback);
  if (v != std::floor(v)) throw std::invalid_argument("hyperparameter '" + std::string(key) + "' must be an integer");
  return static_cast<int>(v);
}

std::string HyperParams::text(std::string_view key, std::string_view fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::string(fallback);
  if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
  throw std::invalid_argument("hyperparameter '" + std::string(key) + "' is numeric, expected a category");
}

std::string HyperParams::to_json() const {
  std::string out = "{";
  bool first = true;
  for (const auto& [key, value] : values_) {
    if (!first) out += ',';
    first = false;
    out += nlohmann::json(key).dump();
    out += ':';
    if (const auto* d = std::get_if<double>(&value)) {
      out += format_double(*d);
    } else {
      out += nlohmann::json(std::get<std::string>(value)).dump();
    }
  }
  return out + "}";
}

HyperParams HyperParams::from_json(std::string_view text) {
  HyperParams out;
  const auto doc = nlohmann::json::parse(text);
  for (const auto& [key, value] : doc.items()) {
    if (value.is_number()) {
      out.set(key, value.get<double>());
    } else if (value.is_string()) {
      out.set(key, value.get<std::string>());
    } else {
      throw std::invalid_argument("hyperparameter '" + key + "' must be a number or string");
    }
  }
  return out;
}

}  // namespace dfo
