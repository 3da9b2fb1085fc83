#include "dfo/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>

#include "dfo/errors.hpp"
#include "dfo/fs_util.hpp"
#include "dfo/random.hpp"

namespace dfo {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view csv) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const auto comma = csv.find(',', start);
    const auto item = trim(csv.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_real(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw ConfigError(what + ": '" + s + "' is not a number");
  return v;
}

std::uint64_t parse_u64(const std::string& s, const std::string& what) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ConfigError(what + ": '" + s + "' is not an unsigned integer");
  }
  return v;
}

bool parse_bool(const std::string& s, const std::string& what) {
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  throw ConfigError(what + ": '" + s + "' is not a boolean");
}

}  // namespace

bool ExperimentConfig::standardizes(ClassifierKind kind) const {
  const auto it = standardize.find(kind);
  return it != standardize.end() ? it->second : kind_prefers_standardized(kind);
}

std::vector<double> parse_fraction_list(std::string_view csv) {
  std::vector<double> out;
  for (const auto& item : split_list(csv)) {
    const double p = parse_real(item, "fractions");
    if (!(p > 0.0 && p <= 1.0)) throw ConfigError("fraction " + item + " is outside (0, 1]");
    if (std::find(out.begin(), out.end(), p) != out.end()) throw ConfigError("fraction " + item + " is repeated");
    out.push_back(p);
  }
  if (out.empty()) throw ConfigError("fraction list is empty");
  return out;
}

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  ExperimentConfig cfg;
  bool have_seed = false, have_manifest = false;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  for (int line_no = 1; std::getline(in, raw); ++line_no) {
    const std::string line = trim(raw);
    const std::string where = "line " + std::to_string(line_no);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const std::string name = section + "." + key;

    if (name == "data.manifest") {
      cfg.manifest = base_dir / value;
      have_manifest = true;
    } else if (name == "data.feature_set") {
      cfg.feature_set = value;
    } else if (name == "run.seed") {
      cfg.seed = parse_u64(value, name);
      have_seed = true;
    } else if (name == "run.output_dir") {
      cfg.output_dir = base_dir / value;
    } else if (name == "split.ratios") {
      const auto items = split_list(value);
      if (items.size() != 3) throw ConfigError(name + " needs three comma-separated values");
      for (std::size_t i = 0; i < 3; ++i) cfg.ratios[i] = parse_real(items[i], name);
      const double sum = cfg.ratios[0] + cfg.ratios[1] + cfg.ratios[2];
      if (cfg.ratios[0] <= 0 || cfg.ratios[1] <= 0 || cfg.ratios[2] <= 0 || std::abs(sum - 1.0) > 1e-9) {
        throw ConfigError(name + " must be three positive numbers summing to 1");
      }
    } else if (name == "experiment.classifiers") {
      cfg.classifiers.clear();
      for (const auto& item : split_list(value)) {
        const auto kind = parse_kind(item);
        if (!kind) throw ConfigError(name + ": unknown classifier '" + item + "'");
        if (std::find(cfg.classifiers.begin(), cfg.classifiers.end(), *kind) != cfg.classifiers.end()) {
          throw ConfigError(name + ": '" + item + "' is repeated");
        }
        cfg.classifiers.push_back(*kind);
      }
      if (cfg.classifiers.empty()) throw ConfigError(name + " is empty");
    } else if (name == "experiment.selectors") {
      cfg.selectors.clear();
      for (const auto& item : split_list(value)) {
        const auto method = parse_method(item);
        if (!method) throw ConfigError(name + ": unknown selector '" + item + "'");
        if (std::find(cfg.selectors.begin(), cfg.selectors.end(), *method) != cfg.selectors.end()) {
          throw ConfigError(name + ": '" + item + "' is repeated");
        }
        cfg.selectors.push_back(*method);
      }
    } else if (name == "experiment.fractions") {
      cfg.fractions = parse_fraction_list(value);
    } else if (name == "experiment.budget") {
      cfg.budget = parse_u64(value, name);
      if (cfg.budget < 1) throw ConfigError(name + " must be at least 1");
    } else if (name == "experiment.objective") {
      if (value == "accuracy") cfg.objective = TuningObjective::kAccuracy;
      else if (value == "macro_f1") cfg.objective = TuningObjective::kMacroF1;
      else throw ConfigError(name + ": expected accuracy or macro_f1");
    } else if (section == "standardize") {
      if (key == "lasso") {
        cfg.standardize_lasso = parse_bool(value, name);
      } else if (const auto kind = parse_kind(key)) {
        cfg.standardize[*kind] = parse_bool(value, name);
      } else {
        throw ConfigError(where + ": unknown key " + name);
      }
    } else {
      throw ConfigError(where + ": unknown key " + name);
    }
  }
  if (!have_seed) throw ConfigError("[run] seed is required");
  if (!have_manifest) throw ConfigError("[data] manifest is required");
  if (cfg.output_dir.empty()) cfg.output_dir = base_dir / "run";
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file_text(path);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  return parse_config(text, path.parent_path());
}

StableHasher& StableHasher::add(std::string_view field) {
  state_ = mix64(state_ ^ fnv1a64(field)) + 0x9E3779B97F4A7C15ULL;
  return *this;
}

std::string StableHasher::hex() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(state_));
  return buf;
}

std::string canonical_config(const ExperimentConfig& c) {
  std::string out;
  out += "manifest=" + c.manifest.lexically_normal().generic_string() + "\n";
  out += "feature_set=" + c.feature_set + "\n";
  out += "seed=" + std::to_string(c.seed) + "\n";
  out += "ratios=" + format_double(c.ratios[0]) + "," + format_double(c.ratios[1]) + "," + format_double(c.ratios[2]) + "\n";
  out += "classifiers=";
  for (auto k : c.classifiers) out += std::string(kind_name(k)) + ",";
  out += "\nselectors=";
  for (auto m : c.selectors) out += std::string(method_name(m)) + ",";
  out += "\nfractions=";
  for (double p : c.fractions) out += format_double(p) + ",";
  out += "\nbudget=" + std::to_string(c.budget) + "\n";
  out += std::string("objective=") + (c.objective == TuningObjective::kAccuracy ? "accuracy" : "macro_f1") + "\n";
  out += "standardize=";
  for (auto k : kAllClassifierKinds) out += std::string(kind_name(k)) + ":" + (c.standardizes(k) ? "1" : "0") + ",";
  out += std::string("lasso:") + (c.standardize_lasso ? "1" : "0") + "\n";
  return out;
}

std::string config_hash(const ExperimentConfig& config) { return StableHasher().add(canonical_config(config)).hex(); }

}  // namespace dfo
