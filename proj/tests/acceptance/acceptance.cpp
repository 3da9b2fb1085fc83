// Acceptance suite: one PASS/FAIL line per criterion P1..P10.
//
//   acceptance            run everything
//   acceptance P3 P9      run a subset

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "dfo/classifiers.hpp"
#include "dfo/config.hpp"
#include "dfo/decision_tree.hpp"
#include "dfo/evaluation.hpp"
#include "dfo/feature_selection.hpp"
#include "dfo/fs_util.hpp"
#include "dfo/pipeline.hpp"
#include "dfo/pooling.hpp"
#include "dfo/tuning.hpp"
#include "support/synthetic.hpp"

namespace fs = std::filesystem;
using namespace dfo;

namespace {

const fs::path kFixtures = DFO_FIXTURE_DIR;

// Failure details collected while a criterion runs.
struct Check {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 8) failures.push_back(what);
  }
  bool ok() const { return failures.empty(); }
};

struct Criterion {
  const char* id;
  const char* title;
  double limit_seconds;
  std::function<void(Check&)> body;
};

// ------------------------------------------------------------------- P1 --
void p1_subset_counts(Check& c) {
  const double fractions[] = {0.5, 0.4, 0.3, 0.2, 0.1, 0.05};
  const std::size_t expect768[] = {384, 308, 231, 154, 77, 39};
  for (int i = 0; i < 6; ++i) {
    const auto got = subset_size(768, fractions[i]);
    c.expect(got == expect768[i], "768 @ " + format_double(fractions[i]) + " -> " + std::to_string(got));
  }
  c.expect(subset_size(1024, 0.1) == 103, "1024 @ 0.1");
  c.expect(subset_size(2048, 0.1) == 205, "2048 @ 0.1");
  c.expect(subset_size(320, 0.5) == 160, "320 @ 0.5");
}

// ------------------------------------------------------------------- P2 --
void p2_split_arithmetic(Check& c) {
  const std::size_t counts[] = {1764, 1320, 1306};
  std::array<std::size_t, 3> total{};
  LabelVector y;
  y.class_names = {"Highly fresh", "Fresh", "Not fresh"};
  for (int k = 0; k < 3; ++k) {
    const auto s = split_sizes(counts[k], kDefaultRatios);
    for (int i = 0; i < 3; ++i) total[i] += s[i];
    y.labels.insert(y.labels.end(), counts[k], k);
  }
  c.expect(total[0] == 2807, "train total " + std::to_string(total[0]));
  c.expect(total[1] == 701, "val total " + std::to_string(total[1]));
  c.expect(total[2] == 882, "test total " + std::to_string(total[2]));
  c.expect(total[0] + total[1] + total[2] == 4390, "grand total");
  const auto split = stratified_split(y, kDefaultRatios, 42);
  c.expect(split.train.size() == 2807 && split.val.size() == 701 && split.test.size() == 882,
           "stratified_split sizes differ from the arithmetic");
}

// ------------------------------------------------------------------- P3 --
void p3_gap_oracle(Check& c) {
  Rng rng(3);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto ch = 1 + rng.below(16), h = 1 + rng.below(12), w = 1 + rng.below(12);
    std::vector<double> v(ch * h * w);
    for (auto& x : v) x = rng.normal() * 10.0;
    const auto pooled = global_average_pool(Tensor({ch, h, w}, v)).vector;
    for (std::size_t k = 0; k < ch; ++k) {
      long double sum = 0;
      for (std::size_t i = 0; i < h * w; ++i) sum += v[k * h * w + i];
      worst = std::max(worst, std::abs(pooled[k] - static_cast<double>(sum / static_cast<long double>(h * w))));
    }
  }
  c.expect(worst <= 1e-12, "max |GAP - mean| = " + format_double(worst));
}

// ------------------------------------------------------------------- P4 --
void p4_metric_oracle(Check& c) {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(5));
    const std::size_t n = 1 + rng.below(500);
    std::vector<int> t(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = static_cast<int>(rng.below(k));
      p[i] = rng.uniform() < 0.7 ? t[i] : static_cast<int>(rng.below(k));
    }
    const auto cm = confusion(t, p, k);
    const auto m = metrics(cm);
    std::vector<std::vector<std::size_t>> oracle(k, std::vector<std::size_t>(k, 0));
    for (std::size_t i = 0; i < n; ++i) ++oracle[t[i]][p[i]];
    std::size_t diag = 0;
    double prec_sum = 0, rec_sum = 0, f1_sum = 0, f1_weighted = 0;
    for (int a = 0; a < k; ++a) {
      std::size_t row = 0, col = 0;
      for (int b = 0; b < k; ++b) {
        c.expect(cm.at(a, b) == oracle[a][b], "confusion cell mismatch");
        row += oracle[a][b];
        col += oracle[b][a];
      }
      diag += oracle[a][a];
      const double prec = col ? double(oracle[a][a]) / col : 0.0;
      const double rec = row ? double(oracle[a][a]) / row : 0.0;
      const double f1 = prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
      prec_sum += prec;
      rec_sum += rec;
      f1_sum += f1;
      f1_weighted += f1 * row / n;
      c.expect(std::abs(m.precision[a] - prec) <= 1e-12 && std::abs(m.recall[a] - rec) <= 1e-12 &&
                   std::abs(m.f1[a] - f1) <= 1e-12,
               "per-class metric mismatch");
    }
    c.expect(m.accuracy == double(diag) / n, "accuracy mismatch");
    c.expect(m.recall_weighted == m.accuracy, "weighted recall != accuracy");
    c.expect(std::abs(m.precision_macro - prec_sum / k) <= 1e-12, "macro precision");
    c.expect(std::abs(m.recall_macro - rec_sum / k) <= 1e-12, "macro recall");
    c.expect(std::abs(m.f1_macro - f1_sum / k) <= 1e-12, "macro f1");
    c.expect(std::abs(m.f1_weighted - f1_weighted) <= 1e-12, "weighted f1");
  }
}

// ------------------------------------------------------------------- P5 --
void p5_classifier_floor(Check& c) {
  // 3 classes x 200 rows, d = 20, class c centred at 4 sigma on axis c.
  const auto data = testing::gaussian_blobs(200, 20, 3, 4.0, 42);
  const auto split = stratified_split(data.y, kDefaultRatios, derive_seed(42, "split"));
  const auto ytr = take_labels(data.y, split.train), yva = take_labels(data.y, split.val),
             yte = take_labels(data.y, split.test);
  for (auto kind : kAllClassifierKinds) {
    Matrix xtr = take_rows(data.x, split.train), xva = take_rows(data.x, split.val),
           xte = take_rows(data.x, split.test);
    if (kind_prefers_standardized(kind)) {
      const auto s = standardize_fit(xtr);
      xtr = s.apply(xtr);
      xva = s.apply(xva);
      xte = s.apply(xte);
    }
    const auto t0 = std::chrono::steady_clock::now();
    const auto search = random_search(kind, default_search_space(kind), 30, xtr, ytr, xva, yva,
                                      derive_seed(42, kind_name(kind)));
    const auto model = fit(kind, xtr, ytr, search.best_params, search.best().seed);
    const double acc = testing::accuracy(predict(model, xte), yte.labels);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("    %-5s test accuracy %.4f (%zu test rows, %.1f s)\n", std::string(kind_name(kind)).c_str(), acc,
                yte.size(), secs);
    c.expect(acc >= 0.95, std::string(kind_name(kind)) + " accuracy " + format_double(acc));
  }
}

// ------------------------------------------------------------------- P6 --
void p6_injected_signal(Check& c) {
  int gbdt_hits = 0, rf_hits = 0, lasso_hits = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const std::size_t signal = (seed * 13) % 64;
    const auto data = testing::injected_signal(400, 64, signal, seed);
    gbdt_hits += rank_by_gbdt(data.x, data.y, default_gbdt_selector_params(), seed).order.front() == signal;
    rf_hits += rank_by_rf(data.x, data.y, default_rf_selector_params(), seed).order.front() == signal;

    const auto x = standardize_fit(data.x).apply(data.x);
    const double lambda = 0.1 * lasso_lambda_max(x, data.y.labels, 2);
    const auto lasso = fit_lasso(x, data.y.labels, 2, {lambda, 5000, 1e-6});
    bool signal_kept = false;
    std::size_t noise_zero = 0;
    for (std::size_t j = 0; j < 64; ++j) {
      const bool nz = lasso.weights(0, j) != 0.0 || lasso.weights(1, j) != 0.0;
      if (j == signal) signal_kept = nz;
      else noise_zero += !nz;
    }
    const bool ok = signal_kept && noise_zero * 5 >= 63 * 4;
    lasso_hits += ok;
    if (!ok) c.expect(false, "seed " + std::to_string(seed) + ": lasso kept signal=" + std::to_string(signal_kept) +
                                 ", zeroed " + std::to_string(noise_zero) + "/63 noise");
  }
  std::printf("    gbdt %d/10, rf %d/10, lasso %d/10\n", gbdt_hits, rf_hits, lasso_hits);
  c.expect(gbdt_hits == 10, "GBDT ranked the signal first in " + std::to_string(gbdt_hits) + "/10 seeds");
  c.expect(rf_hits == 10, "RF ranked the signal first in " + std::to_string(rf_hits) + "/10 seeds");
}

// ------------------------------------------------------------------- P7 --
void p7_solvers(Check& c) {
  const auto data = testing::gaussian_blobs(50, 10, 3, 1.0, 7);
  const auto x = standardize_fit(data.x).apply(data.x);
  const double lmax = lasso_lambda_max(x, data.y.labels, 3);
  for (double f : {0.0, 0.05, 0.3, 0.9}) {
    const auto fit = fit_lasso(x, data.y.labels, 3, {f * lmax, 5000, 1e-8});
    for (std::size_t i = 1; i < fit.objective_history.size(); ++i) {
      c.expect(fit.objective_history[i] <= fit.objective_history[i - 1],
               "objective rose at step " + std::to_string(i) + " (lambda factor " + format_double(f) + ")");
    }
  }
  for (double f : {1.0, 1.5, 10.0}) {
    const auto fit = fit_lasso(x, data.y.labels, 3, {f * lmax, 5000, 1e-8});
    c.expect(std::all_of(fit.weights.values().begin(), fit.weights.values().end(), [](double v) { return v == 0.0; }),
             "nonzero weights at " + format_double(f) + " * lambda_max");
  }
  const auto dense = fit_lasso(x, data.y.labels, 3, {0.0, 5000, 1e-8});
  std::size_t nz = 0;
  for (std::size_t j = 0; j < x.cols(); ++j) {
    bool any = false;
    for (int k = 0; k < 3; ++k) any |= dense.weights(k, j) != 0.0;
    nz += any;
  }
  c.expect(nz == x.cols(), "lambda=0 kept " + std::to_string(nz) + " of " + std::to_string(x.cols()) + " features");

  // MLP gradient check.
  Rng rng(8);
  MlpModel m;
  m.w1 = Matrix(6, 10);
  m.w2 = Matrix(3, 6);
  for (auto& v : m.w1.values()) v = 0.5 * rng.normal();
  for (auto& v : m.w2.values()) v = 0.5 * rng.normal();
  m.b1.assign(6, 0.05);
  m.b2 = {0.1, -0.1, 0.0};
  const Matrix xs = take_rows(x, std::vector<std::size_t>{0, 5, 9, 17, 33, 48, 61, 99});
  std::vector<int> ys;
  for (std::size_t i : {0, 5, 9, 17, 33, 48, 61, 99}) ys.push_back(data.y.labels[i]);
  MlpModel grad;
  detail::mlp_loss_grad(m, xs, ys, 0.3, &grad);
  double worst = 0.0;
  auto check_slot = [&](double& slot, double analytic) {
    const double keep = slot, h = 1e-6;
    slot = keep + h;
    const double up = detail::mlp_loss_grad(m, xs, ys, 0.3, nullptr);
    slot = keep - h;
    const double down = detail::mlp_loss_grad(m, xs, ys, 0.3, nullptr);
    slot = keep;
    const double numeric = (up - down) / (2 * h);
    worst = std::max(worst, std::abs(analytic - numeric) / std::max({1e-8, std::abs(analytic), std::abs(numeric)}));
  };
  for (std::size_t i = 0; i < m.w1.values().size(); ++i) check_slot(m.w1.values()[i], grad.w1.values()[i]);
  for (std::size_t i = 0; i < m.w2.values().size(); ++i) check_slot(m.w2.values()[i], grad.w2.values()[i]);
  for (std::size_t i = 0; i < m.b1.size(); ++i) check_slot(m.b1[i], grad.b1[i]);
  for (std::size_t i = 0; i < m.b2.size(); ++i) check_slot(m.b2[i], grad.b2[i]);
  std::printf("    worst MLP gradient relative error %.2e\n", worst);
  c.expect(worst <= 1e-4, "MLP gradient relative error " + format_double(worst));
}

// ------------------------------------------------------------------- P8 --
std::vector<std::pair<std::string, std::string>> report_csvs(const fs::path& out) {
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& e : fs::recursive_directory_iterator(out / "report")) {
    if (e.is_regular_file() && e.path().extension() == ".csv") {
      files.emplace_back(fs::relative(e.path(), out).generic_string(), read_file_text(e.path()));
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

void p8_determinism(Check& c) {
  const auto base = load_config(kFixtures / "mini" / "experiment.cfg");
  const fs::path root = fs::temp_directory_path() / "dfo_acceptance_p8";
  fs::remove_all(root);
  std::vector<std::vector<std::pair<std::string, std::string>>> runs;
  const std::pair<const char*, unsigned> plan[] = {{"a_jobs1", 1}, {"b_jobs1", 1}, {"c_jobs8", 8}};
  for (const auto& [name, jobs] : plan) {
    auto cfg = base;
    cfg.output_dir = root / name;
    const auto t0 = std::chrono::steady_clock::now();
    Pipeline(cfg, jobs).run_all();
    std::printf("    run %s: %.1f s\n", name, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    runs.push_back(report_csvs(cfg.output_dir));
  }
  const auto& report = runs[0];
  const auto it = std::find_if(report.begin(), report.end(), [](const auto& f) { return f.first == "report/report.csv"; });
  c.expect(it != report.end(), "report.csv missing");
  if (it != report.end()) {
    const auto rows = std::count(it->second.begin(), it->second.end(), '\n') - 1;
    c.expect(rows == 133, "report has " + std::to_string(rows) + " cells, expected 133");
  }
  c.expect(runs[0] == runs[1], "two --jobs 1 runs differ");
  c.expect(runs[0] == runs[2], "--jobs 1 and --jobs 8 differ");
  std::printf("    %zu report CSVs compared across 3 runs\n", report.size());
  fs::remove_all(root);
}

// ------------------------------------------------------------------- P9 --
void p9_oracles(Check& c) {
  const auto train = testing::gaussian_blobs(40, 6, 3, 1.0, 9);
  Rng rng(10);
  Matrix queries(50, 6);
  for (auto& v : queries.values()) v = rng.normal() * 2.0;
  for (const char* metric : {"euclidean", "manhattan"}) {
    const auto model = fit(ClassifierKind::kKNN, train.x, train.y, {{"k", 5.0}, {"metric", std::string(metric)}}, 0);
    const auto pred = predict(model, queries);
    for (std::size_t q = 0; q < 50; ++q) {
      std::vector<std::pair<double, std::size_t>> all;
      for (std::size_t i = 0; i < train.x.rows(); ++i) {
        double d = 0;
        for (std::size_t j = 0; j < 6; ++j) {
          const double diff = queries(q, j) - train.x(i, j);
          d += metric[0] == 'e' ? diff * diff : std::abs(diff);
        }
        all.emplace_back(d, i);
      }
      std::sort(all.begin(), all.end());
      int votes[3] = {0, 0, 0};
      for (int t = 0; t < 5; ++t) ++votes[train.y.labels[all[t].second]];
      const int expect = static_cast<int>(std::max_element(votes, votes + 3) - votes);
      c.expect(pred[q] == expect, std::string(metric) + " query " + std::to_string(q));
    }
  }
  Matrix x(4, 1);
  for (int i = 0; i < 4; ++i) x(i, 0) = i + 1;
  const std::vector<int> y{0, 0, 1, 1};
  const std::vector<std::size_t> rows{0, 1, 2, 3};
  Rng tree_rng(1);
  const auto tree = grow_tree(x, y, 2, rows, {}, tree_rng);
  c.expect(tree.root().feature == 0 && tree.root().threshold == 2.5,
           "4-point tree split at " + format_double(tree.root().threshold));
  c.expect(tree.leaf_count() == 2, "4-point tree has " + std::to_string(tree.leaf_count()) + " leaves");
}

// ------------------------------------------------------------------ P10 --
void p10_report_golden(Check& c) {
  const fs::path dir = kFixtures / "golden";
  const auto doc = nlohmann::json::parse(read_file_text(dir / "cells.json"));
  const auto class_names = doc["class_names"].get<std::vector<std::string>>();
  std::vector<ReportCell> cells;
  for (const auto& item : doc["cells"]) {
    ReportCell cell;
    cell.config = {doc["feature_set"].get<std::string>(), item["selector"].get<std::string>(),
                   item["fraction"].get<double>(), item["dimension"].get<std::size_t>(),
                   *parse_kind(item["classifier"].get<std::string>())};
    cell.confusion.num_classes = static_cast<int>(item["confusion"].size());
    for (const auto& row : item["confusion"])
      for (const auto& v : row) cell.confusion.counts.push_back(v.get<std::size_t>());
    cell.metrics = metrics(cell.confusion);
    cells.push_back(std::move(cell));
  }
  const auto report = build_report(cells, class_names);
  c.expect(report.report_csv == read_file_text(dir / "report.csv"), "report.csv differs from golden");
  std::set<std::string> seen;
  for (const auto& t : report.tables) {
    seen.insert(t.name);
    if (!fs::exists(dir / (t.name + ".csv"))) {
      c.expect(false, "unexpected table " + t.name);
      continue;
    }
    c.expect(t.csv == read_file_text(dir / (t.name + ".csv")), t.name + ".csv differs from golden");
    c.expect(t.text == read_file_text(dir / (t.name + ".txt")), t.name + ".txt differs from golden");
  }
  c.expect(seen == std::set<std::string>{"classifiers", "selection_gbdt", "selection_lasso"}, "table set differs");
  c.expect(!report.confusion_csvs.empty() && report.confusion_csvs[0].first == "none_p1_LR" &&
               report.confusion_csvs[0].second == read_file_text(dir / "confusion_none_p1_LR.csv"),
           "confusion CSV differs from golden");
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {"P1", "subset-count arithmetic reproduces the published dimensions", 1.0, p1_subset_counts},
      {"P2", "split arithmetic on 1764/1320/1306 gives 2807/701/882", 1.0, p2_split_arithmetic},
      {"P3", "GAP equals a brute-force mean on 1000 maps (1e-12)", 5.0, p3_gap_oracle},
      {"P4", "confusion/metrics match a nested-loop oracle; weighted recall == accuracy", 5.0, p4_metric_oracle},
      {"P5", "all 7 classifiers reach >= 0.95 on the Gaussian benchmark after 30 trials", 300.0, p5_classifier_floor},
      {"P6", "injected signal ranked first (GBDT, RF) and kept by Lasso at 0.1 lambda_max", 120.0, p6_injected_signal},
      {"P7", "Lasso monotone/zero/dense behaviour and MLP gradient check", 60.0, p7_solvers},
      {"P8", "mini pipeline (133 cells) byte-identical across reruns and --jobs 1 vs 8", 600.0, p8_determinism},
      {"P9", "KNN equals brute force on 50 queries; 4-point tree splits at 2.5", 10.0, p9_oracles},
      {"P10", "report tables match the golden files", 1.0, p10_report_golden},
  };
  std::set<std::string> only(argv + 1, argv + argc);
  int failed = 0;
  for (const auto& cr : criteria) {
    if (!only.empty() && !only.contains(cr.id)) continue;
    Check check;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.body(check);
    } catch (const std::exception& e) {
      check.failures.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > cr.limit_seconds) {
      check.failures.push_back("took " + format_double(secs) + " s, limit " + format_double(cr.limit_seconds) + " s");
    }
    std::printf("%-3s %s  %8.2fs  %s\n", cr.id, check.ok() ? "PASS" : "FAIL", secs, cr.title);
    for (const auto& f : check.failures) std::printf("      - %s\n", f.c_str());
    std::fflush(stdout);
    failed += !check.ok();
  }
  return failed == 0 ? 0 : 1;
}
