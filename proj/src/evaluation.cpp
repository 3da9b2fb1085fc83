#include "dfo/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

namespace dfo {

std::size_t ConfusionMatrix::total() const {
  std::size_t s = 0;
  for (auto c : counts) s += c;
  return s;
}

std::size_t ConfusionMatrix::row_sum(int truth) const {
  std::size_t s = 0;
  for (int j = 0; j < num_classes; ++j) s += at(truth, j);
  return s;
}

std::size_t ConfusionMatrix::col_sum(int predicted) const {
  std::size_t s = 0;
  for (int i = 0; i < num_classes; ++i) s += at(i, predicted);
  return s;
}

std::size_t ConfusionMatrix::trace() const {
  std::size_t s = 0;
  for (int i = 0; i < num_classes; ++i) s += at(i, i);
  return s;
}

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred, int num_classes) {
  if (y_true.size() != y_pred.size()) throw std::invalid_argument("label vectors differ in length");
  ConfusionMatrix cm{num_classes, std::vector<std::size_t>(static_cast<std::size_t>(num_classes * num_classes), 0)};
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] < 0 || y_true[i] >= num_classes || y_pred[i] < 0 || y_pred[i] >= num_classes) {
      throw std::invalid_argument("label out of range at position " + std::to_string(i));
    }
    ++cm.counts[static_cast<std::size_t>(y_true[i] * num_classes + y_pred[i])];
  }
  return cm;
}

MetricSet metrics(const ConfusionMatrix& cm) {
  const std::size_t total = cm.total();
  if (total == 0) throw std::invalid_argument("confusion matrix is empty");
  const auto k = static_cast<std::size_t>(cm.num_classes);
  MetricSet m;
  m.precision.resize(k);
  m.recall.resize(k);
  m.f1.resize(k);
  m.support.resize(k);
  const double n = static_cast<double>(total);
  m.accuracy = static_cast<double>(cm.trace()) / n;
  double wp = 0.0, wf = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    const int ci = static_cast<int>(c);
    const auto tp = static_cast<double>(cm.at(ci, ci));
    const auto rows = cm.row_sum(ci), cols = cm.col_sum(ci);
    m.support[c] = rows;
    m.precision[c] = cols == 0 ? 0.0 : tp / static_cast<double>(cols);
    m.recall[c] = rows == 0 ? 0.0 : tp / static_cast<double>(rows);
    const double denom = m.precision[c] + m.recall[c];
    m.f1[c] = denom == 0.0 ? 0.0 : 2.0 * m.precision[c] * m.recall[c] / denom;
    m.precision_macro += m.precision[c];
    m.recall_macro += m.recall[c];
    m.f1_macro += m.f1[c];
    wp += static_cast<double>(rows) * m.precision[c];
    wf += static_cast<double>(rows) * m.f1[c];
  }
  m.precision_macro /= static_cast<double>(k);
  m.recall_macro /= static_cast<double>(k);
  m.f1_macro /= static_cast<double>(k);
  m.precision_weighted = wp / n;
  m.recall_weighted = static_cast<double>(cm.trace()) / n;
  m.f1_weighted = wf / n;
  return m;
}

namespace {

// Half-up rounding to two decimals of `value` (already in percent units).
double round2(double value) { return std::floor(value * 100.0 + 0.5 + 1e-7) / 100.0; }

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string method_title(const std::string& selector) {
  if (selector == "gbdt") return "GBDT (boosting)";
  if (selector == "rf") return "RF (bagging)";
  if (selector == "lasso") return "Lasso (L1)";
  return selector;
}

std::string render_text(const std::string& title, const std::vector<std::string>& header,
                        const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    std::string s = "|";
    for (std::size_t c = 0; c < cells.size(); ++c) s += ' ' + cells[c] + std::string(width[c] - cells[c].size(), ' ') + " |";
    return s + '\n';
  };
  std::string out = title + '\n' + line(header) + '|';
  for (auto w : width) out += std::string(w + 2, '-') + '|';
  out += '\n';
  for (const auto& row : rows) out += line(row);
  return out;
}

std::string render_csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  auto join = [](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c > 0) s += ',';
      s += cells[c];
    }
    return s + '\n';
  };
  std::string out = join(header);
  for (const auto& row : rows) out += join(row);
  return out;
}

}  // namespace

std::string format_percent(double fraction) { return fixed(round2(fraction * 100.0), 2); }

std::string format_impact(double delta) {
  const double magnitude = round2(std::abs(delta) * 100.0);
  const char sign = (delta < 0.0 && magnitude > 0.0) ? '-' : '+';
  return sign + fixed(magnitude, 2) + '%';
}

std::string format_fraction_label(double fraction, bool full) {
  if (full) return "100% (Full set)";
  std::string s = fixed(round2(fraction * 100.0), 2);
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s + '%';
}

std::string cell_stem(const CellConfig& config) {
  return config.selector + "_p" + format_double(config.fraction) + "_" + std::string(kind_name(config.classifier));
}

EvalReport build_report(std::span<const ReportCell> cells, std::span<const std::string> class_names) {
  if (cells.empty()) throw std::invalid_argument("report needs at least one cell");
  EvalReport report;

  report.report_csv =
      "feature_set,selector,fraction,dimension,classifier,accuracy,precision_macro,recall_macro,f1_macro,"
      "precision_weighted,recall_weighted,f1_weighted\n";
  for (const auto& cell : cells) {
    const auto& c = cell.config;
    const auto& m = cell.metrics;
    report.report_csv += c.feature_set + ',' + c.selector + ',' + format_double(c.fraction) + ',' +
                         std::to_string(c.dimension) + ',' + std::string(kind_name(c.classifier)) + ',' +
                         fixed(m.accuracy, 6) + ',' + fixed(m.precision_macro, 6) + ',' + fixed(m.recall_macro, 6) +
                         ',' + fixed(m.f1_macro, 6) + ',' + fixed(m.precision_weighted, 6) + ',' +
                         fixed(m.recall_weighted, 6) + ',' + fixed(m.f1_weighted, 6) + '\n';

    std::string cm_csv = "true\\pred";
    for (int j = 0; j < cell.confusion.num_classes; ++j) {
      cm_csv += ',' + (static_cast<std::size_t>(j) < class_names.size() ? class_names[static_cast<std::size_t>(j)]
                                                                        : std::to_string(j));
    }
    cm_csv += '\n';
    for (int i = 0; i < cell.confusion.num_classes; ++i) {
      cm_csv += static_cast<std::size_t>(i) < class_names.size() ? class_names[static_cast<std::size_t>(i)]
                                                                 : std::to_string(i);
      for (int j = 0; j < cell.confusion.num_classes; ++j) cm_csv += ',' + std::to_string(cell.confusion.at(i, j));
      cm_csv += '\n';
    }
    report.confusion_csvs.emplace_back(cell_stem(c), std::move(cm_csv));
  }

  // Per-classifier table over the full feature set, plus the baseline.
  const ReportCell* baseline = nullptr;
  std::vector<std::vector<std::string>> clf_rows;
  std::string feature_set = cells.front().config.feature_set;
  for (const auto& cell : cells) {
    if (cell.config.selector != "none") continue;
    feature_set = cell.config.feature_set;
    clf_rows.push_back({std::string(kind_label(cell.config.classifier)), format_percent(cell.metrics.accuracy),
                        format_percent(cell.metrics.recall_macro), format_percent(cell.metrics.precision_macro),
                        format_percent(cell.metrics.f1_macro)});
    if (baseline == nullptr || cell.metrics.accuracy > baseline->metrics.accuracy) baseline = &cell;
  }
  if (!clf_rows.empty()) {
    const std::vector<std::string> header{"Model", "ACC", "Recall", "Precision", "F1"};
    report.tables.push_back({"classifiers", render_csv(header, clf_rows),
                             render_text("Performance of ML classifiers on " + feature_set +
                                             " features (%, macro-averaged)",
                                         header, clf_rows)});
  }

  std::vector<std::string> selectors;
  for (const auto& cell : cells) {
    if (cell.config.selector != "none" &&
        std::find(selectors.begin(), selectors.end(), cell.config.selector) == selectors.end()) {
      selectors.push_back(cell.config.selector);
    }
  }
  const std::vector<std::string> header{"Feature subset", "Dimension", "Best classifier", "Accuracy", "Impact"};
  auto baseline_row = [&]() -> std::vector<std::string> {
    return {format_fraction_label(1.0, true), std::to_string(baseline->config.dimension),
            std::string(kind_label(baseline->config.classifier)), format_percent(baseline->metrics.accuracy),
            "Baseline"};
  };
  if (selectors.empty() && baseline != nullptr) {
    const std::vector<std::vector<std::string>> rows{baseline_row()};
    report.tables.push_back({"selection", render_csv(header, rows),
                             render_text("Best classifier per feature subset (%)", header, rows)});
  }
  for (const auto& selector : selectors) {
    std::vector<double> fractions;
    std::map<double, const ReportCell*> best;
    for (const auto& cell : cells) {
      if (cell.config.selector != selector) continue;
      const double p = cell.config.fraction;
      if (!best.contains(p)) fractions.push_back(p);
      const ReportCell*& slot = best[p];
      if (slot == nullptr || cell.metrics.accuracy > slot->metrics.accuracy) slot = &cell;
    }
    std::vector<std::vector<std::string>> rows;
    if (baseline != nullptr) rows.push_back(baseline_row());
    for (double p : fractions) {
      const auto* cell = best[p];
      rows.push_back({format_fraction_label(p, false), std::to_string(cell->config.dimension),
                      std::string(kind_label(cell->config.classifier)), format_percent(cell->metrics.accuracy),
                      baseline != nullptr ? format_impact(cell->metrics.accuracy - baseline->metrics.accuracy) : "-"});
    }
    report.tables.push_back({"selection_" + selector, render_csv(header, rows),
                             render_text("Impact of feature selection using " + method_title(selector) + " (%)",
                                         header, rows)});
  }
  return report;
}

}  // namespace dfo
