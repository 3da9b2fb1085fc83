#include "dfo/tuning.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

#include "dfo/evaluation.hpp"

namespace dfo {

Distribution Distribution::uniform(double lo, double hi) { return {Type::kUniform, lo, hi, 1, {}}; }
Distribution Distribution::log_uniform(double lo, double hi) { return {Type::kLogUniform, lo, hi, 1, {}}; }
Distribution Distribution::int_range(std::int64_t lo, std::int64_t hi, std::int64_t step) {
  return {Type::kIntRange, static_cast<double>(lo), static_cast<double>(hi), step, {}};
}
Distribution Distribution::categorical(std::vector<ParamValue> choices) {
  return {Type::kCategorical, 0.0, 0.0, 1, std::move(choices)};
}

ParamValue Distribution::sample(Rng& rng) const {
  switch (type) {
    case Type::kUniform: return rng.uniform(lo, hi);
    case Type::kLogUniform: return std::exp(rng.uniform(std::log(lo), std::log(hi)));
    case Type::kIntRange: {
      const auto count = static_cast<std::uint64_t>((static_cast<std::int64_t>(hi) - static_cast<std::int64_t>(lo)) / step) + 1;
      return lo + static_cast<double>(static_cast<std::int64_t>(rng.below(count)) * step);
    }
    case Type::kCategorical: return choices[static_cast<std::size_t>(rng.below(choices.size()))];
  }
  throw std::logic_error("unknown distribution");
}

void SearchSpace::validate() const {
  for (const auto& [name, dist] : params) {
    switch (dist.type) {
      case Distribution::Type::kCategorical:
        if (dist.choices.empty()) throw std::invalid_argument("categorical '" + name + "' has no choices");
        break;
      case Distribution::Type::kLogUniform:
        if (!(dist.lo > 0.0)) throw std::invalid_argument("log-uniform '" + name + "' needs lo > 0");
        [[fallthrough]];
      default:
        if (dist.type == Distribution::Type::kIntRange ? !(dist.lo <= dist.hi) : !(dist.lo < dist.hi)) {
          throw std::invalid_argument("'" + name + "' has an empty range");
        }
        if (dist.type == Distribution::Type::kIntRange && dist.step < 1) {
          throw std::invalid_argument("'" + name + "' needs a positive step");
        }
    }
  }
}

HyperParams SearchSpace::sample(Rng& rng) const {
  HyperParams out;
  for (const auto& [name, dist] : params) out.set(name, dist.sample(rng));
  return out;
}

SearchSpace default_search_space(ClassifierKind kind) {
  using D = Distribution;
  switch (kind) {
    case ClassifierKind::kLR: return {{{"C", D::log_uniform(1e-3, 1e3)}}};
    case ClassifierKind::kKNN:
      return {{{"k", D::int_range(1, 31, 2)}, {"metric", D::categorical({std::string("euclidean"), std::string("manhattan")})}}};
    case ClassifierKind::kSVM:
      return {{{"C", D::log_uniform(1e-2, 1e3)},
               {"kernel", D::categorical({std::string("linear"), std::string("rbf")})},
               {"gamma", D::log_uniform(1e-4, 1.0)}}};
    case ClassifierKind::kMLP:
      return {{{"hidden", D::int_range(32, 512)},
               {"lr", D::log_uniform(1e-4, 1e-1)},
               {"epochs", D::categorical({200.0})},
               {"patience", D::categorical({20.0})}}};
    case ClassifierKind::kRF:
    case ClassifierKind::kET:
      // max_depth 0 means unlimited.
      return {{{"trees", D::int_range(100, 500)},
               {"max_depth", D::categorical({8.0, 12.0, 16.0, 24.0, 32.0, 0.0})},
               {"min_leaf", D::int_range(1, 8)}}};
    case ClassifierKind::kGBDT:
      return {{{"trees", D::int_range(100, 500)}, {"leaves", D::int_range(15, 63)}, {"lr", D::log_uniform(1e-2, 0.3)}}};
  }
  throw std::logic_error("unknown classifier kind");
}

SearchResult random_search(ClassifierKind kind, const SearchSpace& space, std::size_t budget, const Matrix& x_train,
                           const LabelVector& y_train, const Matrix& x_val, const LabelVector& y_val,
                           std::uint64_t seed, TuningObjective objective, unsigned jobs) {
  if (budget < 1) throw std::invalid_argument("search budget must be at least 1");
  space.validate();

  SearchResult result;
  result.trials.resize(budget);
  Rng sampler(derive_seed(seed, "space"));
  for (std::size_t t = 0; t < budget; ++t) {
    result.trials[t].trial = t;
    result.trials[t].params = space.sample(sampler);
    result.trials[t].seed = derive_seed(seed, static_cast<std::uint64_t>(t));
  }

  auto run = [&](TrialRecord& rec) {
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto model = fit(kind, x_train, y_train, rec.params, rec.seed);
      const auto pred = predict(model, x_val);
      const auto m = metrics(confusion(y_val.labels, pred, y_val.num_classes()));
      rec.val_score = objective == TuningObjective::kAccuracy ? m.accuracy : m.f1_macro;
    } catch (const std::exception& e) {
      rec.val_score = 0.0;
      rec.error = e.what();
    }
    rec.fit_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(budget)));
  if (workers == 1) {
    for (auto& rec : result.trials) run(rec);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t t = next++; t < budget; t = next++) run(result.trials[t]);
      });
    }
  }

  for (std::size_t t = 1; t < budget; ++t) {
    if (result.trials[t].val_score > result.trials[result.best_trial].val_score) result.best_trial = t;
  }
  result.best_params = result.trials[result.best_trial].params;
  return result;
}

std::string trials_to_csv(const std::vector<TrialRecord>& trials) {
  auto quote = [](const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
      if (c == '"') out += '"';
      out += c;
    }
    return out + '"';
  };
  std::string out = "trial,seed,params_json,val_score,status\n";
  for (const auto& t : trials) {
    out += std::to_string(t.trial) + ',' + std::to_string(t.seed) + ',' + quote(t.params.to_json()) + ',' +
           format_double(t.val_score) + ',' + (t.error.empty() ? std::string("ok") : quote("error: " + t.error)) + '\n';
  }
  return out;
}

}  // namespace dfo
