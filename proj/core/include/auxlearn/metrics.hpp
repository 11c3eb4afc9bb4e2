#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace auxlearn {

/// K x K count matrix; rows are true classes, columns are predicted classes.
struct ConfusionMatrix {
  std::vector<std::vector<long long>> counts;
  std::vector<std::string> class_names;

  int num_classes() const { return static_cast<int>(class_names.size()); }
  long long total() const;
  long long row_sum(int c) const;
  long long col_sum(int c) const;
};

/// Per-class scores. A missing value marks an undefined metric (zero
/// denominator, e.g. a class that was never predicted); it is rendered "NA"
/// and never silently coerced to 0.
struct ClassMetrics {
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
};

struct ClassReport {
  std::vector<ClassMetrics> per_class;
  double accuracy = 0.0;
};

/// Counts (true, predicted) label pairs. Throws std::invalid_argument on
/// length mismatch or an out-of-range label. `class_names` defines K; the
/// overload taking `num_classes` fills in "class0", "class1", ...
ConfusionMatrix confusion_matrix(std::span<const int> true_labels,
                                 std::span<const int> predicted_labels,
                                 std::vector<std::string> class_names);
ConfusionMatrix confusion_matrix(std::span<const int> true_labels,
                                 std::span<const int> predicted_labels,
                                 int num_classes);

/// precision[c] = counts[c][c] / colsum(c), recall[c] = counts[c][c] /
/// rowsum(c), f1 their harmonic mean, accuracy = trace / total. Zero
/// denominators yield unset optionals. Throws std::invalid_argument on an
/// empty or malformed matrix.
ClassReport class_report(const ConfusionMatrix& cm);

/// max(counts) / sum(counts): the accuracy of always predicting the largest
/// class. Throws std::invalid_argument unless at least one count is positive
/// and none are negative.
double majority_baseline(std::span<const long long> class_counts);

/// Fixed-point decimal string, round-half-even at `decimals` places.
std::string format_fixed(double value, int decimals);

/// Fixed-point decimal string truncated (not rounded) at `decimals` places:
/// 0.8139534 -> "0.81395" at 5 places.
std::string format_fixed_truncated(double value, int decimals);

/// Truncated percentage: 0.8139534 -> "81.39%" at 2 places.
std::string format_percent_truncated(double fraction, int decimals);

/// One evaluated experiment, ready for rendering.
struct ExperimentReport {
  std::string label;
  ClassReport report;
  ConfusionMatrix matrix;
  std::optional<double> test_loss;
};

/// Aligned plain-text tables: a test-results table (5-decimal accuracy and
/// loss), a per-class precision/recall/F1 table (2 decimals, grouped by
/// class, "NA" where a metric is undefined or an experiment lacks the
/// class), and one confusion matrix per experiment.
std::string render_report_text(const std::vector<ExperimentReport>& reports);

/// Machine-readable twin of render_report_text: one
/// "experiment,class,precision,recall,f1,accuracy,loss" row per
/// (experiment, class) pair, reals in shortest round-trip form, "NA" for
/// undefined values.
std::string render_report_csv(const std::vector<ExperimentReport>& reports);

}  // namespace auxlearn
