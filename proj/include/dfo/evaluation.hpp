#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dfo/classifiers.hpp"

namespace dfo {

/// counts[i*K + j] = samples of true class i predicted as j.
struct ConfusionMatrix {
  int num_classes = 0;
  std::vector<std::size_t> counts;

  std::size_t at(int truth, int predicted) const {
    return counts[static_cast<std::size_t>(truth * num_classes + predicted)];
  }
  std::size_t total() const;
  std::size_t row_sum(int truth) const;
  std::size_t col_sum(int predicted) const;
  std::size_t trace() const;

  bool operator==(const ConfusionMatrix&) const = default;
};

struct MetricSet {
  double accuracy = 0.0;
  std::vector<double> precision, recall, f1;  // per class
  std::vector<std::size_t> support;
  double precision_macro = 0.0, recall_macro = 0.0, f1_macro = 0.0;
  double precision_weighted = 0.0, recall_weighted = 0.0, f1_weighted = 0.0;
};

/// Throws std::invalid_argument on a length mismatch or a label outside [0,K).
ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred, int num_classes);

/// Per-class metrics are 0 where their denominator is 0. The weighted recall
/// numerator sum_c support_c * recall_c is accumulated as sum_c cm[c][c], so
/// weighted recall equals accuracy bit-for-bit.
MetricSet metrics(const ConfusionMatrix& cm);

/// Identity of one evaluated configuration.
struct CellConfig {
  std::string feature_set;
  std::string selector;  // "none" for the full feature set
  double fraction = 1.0;
  std::size_t dimension = 0;
  ClassifierKind classifier = ClassifierKind::kLR;
};

struct ReportCell {
  CellConfig config;
  MetricSet metrics;
  ConfusionMatrix confusion;
};

struct RenderedTable {
  std::string name;  // file stem, e.g. "classifiers" or "selection_gbdt"
  std::string csv;
  std::string text;
};

struct EvalReport {
  std::string report_csv;
  std::vector<RenderedTable> tables;
  /// (file stem, CSV) per cell, in cell order.
  std::vector<std::pair<std::string, std::string>> confusion_csvs;
};

/// Percent with two decimals, half-up: 0.85884 -> "85.88".
std::string format_percent(double fraction);
/// Signed percentage-point change, half-up on the magnitude: 0.0009 -> "+0.09%".
/// A change that rounds to zero renders as "+0.00%".
std::string format_impact(double delta);
/// Fraction label for tables: 1.0 -> "100% (Full set)", 0.05 -> "5%".
std::string format_fraction_label(double fraction, bool full);
/// Stable file stem for a cell, e.g. "gbdt_p0.1_ET".
std::string cell_stem(const CellConfig& config);

/// Assembles the report. Cells with selector "none" form the per-classifier
/// metric table and the baseline (best accuracy among them, earliest cell on
/// ties). Every other selector gets a per-fraction best-classifier table whose
/// first row is the baseline. Class names label confusion CSV rows/columns.
EvalReport build_report(std::span<const ReportCell> cells, std::span<const std::string> class_names);

}  // namespace dfo
