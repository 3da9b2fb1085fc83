#include "doctest.h"

#include <cmath>

#include "dfo/evaluation.hpp"
#include "dfo/random.hpp"

using namespace dfo;

namespace {

ReportCell make_cell(const std::string& selector, double fraction, std::size_t dim, ClassifierKind kind,
                     std::vector<std::size_t> counts) {
  ReportCell cell;
  cell.config = {"swin_t/high", selector, fraction, dim, kind};
  cell.confusion = {2, std::move(counts)};
  cell.metrics = metrics(cell.confusion);
  return cell;
}

}  // namespace

TEST_CASE("metrics agree with a nested-loop oracle") {
  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(4));
    const std::size_t n = 1 + rng.below(60);
    std::vector<int> t(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = static_cast<int>(rng.below(k));
      p[i] = rng.uniform() < 0.6 ? t[i] : static_cast<int>(rng.below(k));
    }
    const auto cm = confusion(t, p, k);
    const auto m = metrics(cm);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < n; ++i) correct += t[i] == p[i];
    CHECK(m.accuracy == static_cast<double>(correct) / n);
    CHECK(m.recall_weighted == m.accuracy);
    double pm = 0, rm = 0, fm = 0;
    for (int c = 0; c < k; ++c) {
      std::size_t tp = 0, fp = 0, fn = 0;
      for (std::size_t i = 0; i < n; ++i) {
        tp += t[i] == c && p[i] == c;
        fp += t[i] != c && p[i] == c;
        fn += t[i] == c && p[i] != c;
      }
      const double prec = tp + fp ? double(tp) / (tp + fp) : 0.0;
      const double rec = tp + fn ? double(tp) / (tp + fn) : 0.0;
      const double f1 = prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
      CHECK(m.precision[c] == doctest::Approx(prec).epsilon(1e-12));
      CHECK(m.recall[c] == doctest::Approx(rec).epsilon(1e-12));
      CHECK(m.f1[c] == doctest::Approx(f1).epsilon(1e-12));
      CHECK(m.support[c] == tp + fn);
      pm += prec / k;
      rm += rec / k;
      fm += f1 / k;
    }
    CHECK(m.precision_macro == doctest::Approx(pm).epsilon(1e-12));
    CHECK(m.recall_macro == doctest::Approx(rm).epsilon(1e-12));
    CHECK(m.f1_macro == doctest::Approx(fm).epsilon(1e-12));
  }
}

TEST_CASE("confusion input errors") {
  const int t[] = {0, 1}, p[] = {0};
  CHECK_THROWS_AS(confusion(t, p, 2), std::invalid_argument);
  const int bad[] = {0, 2};
  CHECK_THROWS_AS(confusion(t, bad, 2), std::invalid_argument);
}

TEST_CASE("percent formatting rounds half up") {
  CHECK(format_percent(0.85884) == "85.88");
  CHECK(format_percent(0.8599) == "85.99");
  CHECK(format_percent(0.85885) == "85.89");
  CHECK(format_percent(1.0) == "100.00");
  CHECK(format_percent(0.0) == "0.00");
  CHECK(format_percent(2.0 / 3.0) == "66.67");
}

TEST_CASE("impact formatting is signed with a zero floor") {
  CHECK(format_impact(0.0009) == "+0.09%");
  CHECK(format_impact(0.8599 - 0.8588) == "+0.11%");
  CHECK(format_impact(-0.0103) == "-1.03%");
  CHECK(format_impact(1e-6) == "+0.00%");
  CHECK(format_impact(-1e-6) == "+0.00%");
  CHECK(format_impact(0.0) == "+0.00%");
}

TEST_CASE("fraction labels and cell stems") {
  CHECK(format_fraction_label(1.0, true) == "100% (Full set)");
  CHECK(format_fraction_label(0.5, false) == "50%");
  CHECK(format_fraction_label(0.05, false) == "5%");
  CHECK(cell_stem({"x", "gbdt", 0.1, 77, ClassifierKind::kET}) == "gbdt_p0.1_ET");
  CHECK(cell_stem({"x", "none", 1.0, 768, ClassifierKind::kGBDT}) == "none_p1_GBDT");
}

TEST_CASE("report layout") {
  std::vector<ReportCell> cells{
      make_cell("none", 1.0, 768, ClassifierKind::kLR, {40, 10, 5, 45}),
      make_cell("none", 1.0, 768, ClassifierKind::kET, {45, 5, 5, 45}),
      make_cell("gbdt", 0.5, 384, ClassifierKind::kLR, {44, 6, 5, 45}),
      make_cell("gbdt", 0.5, 384, ClassifierKind::kET, {46, 4, 5, 45}),
      make_cell("gbdt", 0.1, 77, ClassifierKind::kLR, {30, 20, 10, 40}),
      make_cell("gbdt", 0.1, 77, ClassifierKind::kET, {30, 20, 10, 40}),
  };
  const std::vector<std::string> names{"fresh", "stale"};
  const auto report = build_report(cells, names);

  CHECK(report.report_csv.rfind("feature_set,selector,fraction,dimension,classifier,accuracy,", 0) == 0);
  CHECK(std::count(report.report_csv.begin(), report.report_csv.end(), '\n') == 7);
  REQUIRE(report.tables.size() == 2);
  CHECK(report.tables[0].name == "classifiers");
  CHECK(report.tables[0].csv.rfind("Model,ACC,Recall,Precision,F1\n", 0) == 0);
  CHECK(report.tables[1].name == "selection_gbdt");
  const auto& sel = report.tables[1].csv;
  CHECK(sel.find("100% (Full set),768,ET,90.00,Baseline\n") != std::string::npos);
  CHECK(sel.find("50%,384,ET,91.00,+1.00%\n") != std::string::npos);
  // Equal accuracy: the earlier classifier in cell order wins.
  CHECK(sel.find("10%,77,LR,70.00,-20.00%\n") != std::string::npos);
  CHECK(report.confusion_csvs.size() == 6);
  CHECK(report.confusion_csvs[0].first == "none_p1_LR");
  CHECK(report.confusion_csvs[0].second == "true\\pred,fresh,stale\nfresh,40,10\nstale,5,45\n");
  CHECK(build_report(cells, names).report_csv == report.report_csv);
}

TEST_CASE("report without selectors has a baseline-only selection table") {
  std::vector<ReportCell> cells{make_cell("none", 1.0, 10, ClassifierKind::kKNN, {5, 0, 0, 5})};
  const std::vector<std::string> names{"a", "b"};
  const auto report = build_report(cells, names);
  REQUIRE(report.tables.size() == 2);
  CHECK(report.tables[1].name == "selection");
  CHECK(report.tables[1].csv.find("Baseline") != std::string::npos);
}
