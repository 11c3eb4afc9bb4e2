#include "auxlearn/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace auxlearn {

namespace {

void check_matrix(const ConfusionMatrix& cm) {
  const std::size_t k = cm.class_names.size();
  if (k == 0) {
    throw std::invalid_argument("confusion matrix: no classes");
  }
  if (cm.counts.size() != k) {
    throw std::invalid_argument("confusion matrix: row count does not match class count");
  }
  for (const auto& row : cm.counts) {
    if (row.size() != k) {
      throw std::invalid_argument("confusion matrix: ragged rows");
    }
    for (long long cell : row) {
      if (cell < 0) {
        throw std::invalid_argument("confusion matrix: negative cell");
      }
    }
  }
}

std::string shortest_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_optional(const std::optional<double>& v, int decimals) {
  return v ? format_fixed(*v, decimals) : "NA";
}

std::string csv_field(const std::optional<double>& v) {
  return v ? shortest_double(*v) : "NA";
}

// Column-aligned plain-text table. Alignment is 'l' or 'r' per column.
struct TextTable {
  std::vector<std::string> header;
  std::string align;
  std::vector<std::vector<std::string>> rows;

  void append_to(std::string& out) const {
    std::vector<std::size_t> width(header.size());
    for (std::size_t i = 0; i < header.size(); ++i) {
      width[i] = header[i].size();
    }
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        width[i] = std::max(width[i], row[i].size());
      }
    }
    auto emit = [&](const std::vector<std::string>& row) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i > 0) out += "  ";
        const std::size_t pad = width[i] - row[i].size();
        if (align[i] == 'r') {
          out.append(pad, ' ');
          out += row[i];
        } else {
          out += row[i];
          if (i + 1 < row.size()) out.append(pad, ' ');
        }
      }
      out += '\n';
    };
    emit(header);
    for (const auto& row : rows) emit(row);
  }
};

void append_section_title(std::string& out, const std::string& title) {
  out += title;
  out += '\n';
  out.append(title.size(), '-');
  out += '\n';
}

void check_reports(const std::vector<ExperimentReport>& reports) {
  if (reports.empty()) {
    throw std::invalid_argument("report rendering: no experiments");
  }
  for (const ExperimentReport& r : reports) {
    check_matrix(r.matrix);
    if (r.report.per_class.size() != r.matrix.class_names.size()) {
      throw std::invalid_argument("report rendering: experiment '" + r.label +
                                  "' has mismatched class report and matrix");
    }
  }
}

// Union of class names across experiments, in first-appearance order.
std::vector<std::string> class_union(const std::vector<ExperimentReport>& reports) {
  std::vector<std::string> names;
  for (const ExperimentReport& r : reports) {
    for (const std::string& name : r.matrix.class_names) {
      if (std::find(names.begin(), names.end(), name) == names.end()) {
        names.push_back(name);
      }
    }
  }
  return names;
}

int find_class(const ConfusionMatrix& cm, const std::string& name) {
  for (int c = 0; c < cm.num_classes(); ++c) {
    if (cm.class_names[c] == name) return c;
  }
  return -1;
}

}  // namespace

long long ConfusionMatrix::total() const {
  long long sum = 0;
  for (const auto& row : counts) {
    for (long long cell : row) sum += cell;
  }
  return sum;
}

long long ConfusionMatrix::row_sum(int c) const {
  long long sum = 0;
  for (long long cell : counts[c]) sum += cell;
  return sum;
}

long long ConfusionMatrix::col_sum(int c) const {
  long long sum = 0;
  for (const auto& row : counts) sum += row[c];
  return sum;
}

ConfusionMatrix confusion_matrix(std::span<const int> true_labels,
                                 std::span<const int> predicted_labels,
                                 std::vector<std::string> class_names) {
  const int k = static_cast<int>(class_names.size());
  if (k < 1) {
    throw std::invalid_argument("confusion_matrix: need at least one class");
  }
  if (true_labels.size() != predicted_labels.size()) {
    throw std::invalid_argument("confusion_matrix: label sequences differ in length");
  }
  ConfusionMatrix cm;
  cm.class_names = std::move(class_names);
  cm.counts.assign(k, std::vector<long long>(k, 0));
  for (std::size_t i = 0; i < true_labels.size(); ++i) {
    const int t = true_labels[i];
    const int p = predicted_labels[i];
    if (t < 0 || t >= k || p < 0 || p >= k) {
      throw std::invalid_argument("confusion_matrix: label out of range at index " +
                                  std::to_string(i));
    }
    ++cm.counts[t][p];
  }
  return cm;
}

ConfusionMatrix confusion_matrix(std::span<const int> true_labels,
                                 std::span<const int> predicted_labels,
                                 int num_classes) {
  if (num_classes < 1) {
    throw std::invalid_argument("confusion_matrix: need at least one class");
  }
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(num_classes));
  for (int c = 0; c < num_classes; ++c) {
    names.push_back("class" + std::to_string(c));
  }
  return confusion_matrix(true_labels, predicted_labels, std::move(names));
}

ClassReport class_report(const ConfusionMatrix& cm) {
  check_matrix(cm);
  const long long total = cm.total();
  if (total == 0) {
    throw std::invalid_argument("class_report: empty confusion matrix");
  }
  ClassReport report;
  long long diagonal = 0;
  for (int c = 0; c < cm.num_classes(); ++c) {
    const long long tp = cm.counts[c][c];
    const long long col = cm.col_sum(c);
    const long long row = cm.row_sum(c);
    diagonal += tp;
    ClassMetrics m;
    if (col > 0) m.precision = static_cast<double>(tp) / static_cast<double>(col);
    if (row > 0) m.recall = static_cast<double>(tp) / static_cast<double>(row);
    if (m.precision && m.recall && *m.precision + *m.recall > 0.0) {
      m.f1 = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
    }
    report.per_class.push_back(m);
  }
  report.accuracy = static_cast<double>(diagonal) / static_cast<double>(total);
  return report;
}

double majority_baseline(std::span<const long long> class_counts) {
  if (class_counts.empty()) {
    throw std::invalid_argument("majority_baseline: no classes");
  }
  long long sum = 0;
  long long largest = 0;
  for (long long count : class_counts) {
    if (count < 0) {
      throw std::invalid_argument("majority_baseline: negative count");
    }
    sum += count;
    largest = std::max(largest, count);
  }
  if (sum == 0) {
    throw std::invalid_argument("majority_baseline: all counts are zero");
  }
  return static_cast<double>(largest) / static_cast<double>(sum);
}

std::string format_fixed(double value, int decimals) {
  if (decimals < 0 || decimals > 60) {
    throw std::invalid_argument("format_fixed: decimals out of range");
  }
  char buf[512];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

std::string format_fixed_truncated(double value, int decimals) {
  if (decimals < 0 || decimals > 60) {
    throw std::invalid_argument("format_fixed_truncated: decimals out of range");
  }
  // Render with guard digits, then cut the string: avoids the carry a direct
  // rounding at `decimals` could introduce.
  char buf[512];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals + 9, value);
  std::string s(buf);
  const std::size_t dot = s.find('.');
  if (decimals == 0) return s.substr(0, dot);
  return s.substr(0, dot + 1 + static_cast<std::size_t>(decimals));
}

std::string format_percent_truncated(double fraction, int decimals) {
  return format_fixed_truncated(fraction * 100.0, decimals) + "%";
}

std::string render_report_text(const std::vector<ExperimentReport>& reports) {
  check_reports(reports);
  std::string out;

  TextTable results;
  results.header = {"Experiment", "Test Accuracy", "Test Loss"};
  results.align = "lrr";
  for (const ExperimentReport& r : reports) {
    results.rows.push_back({r.label, format_fixed(r.report.accuracy, 5),
                            r.test_loss ? format_fixed(*r.test_loss, 5) : "NA"});
  }
  append_section_title(out, "Test results");
  results.append_to(out);
  out += '\n';

  TextTable scores;
  scores.header = {"Class", "Experiment", "Precision", "Recall", "F1-Score"};
  scores.align = "llrrr";
  for (const std::string& name : class_union(reports)) {
    for (const ExperimentReport& r : reports) {
      const int c = find_class(r.matrix, name);
      if (c < 0) {
        scores.rows.push_back({name, r.label, "NA", "NA", "NA"});
        continue;
      }
      const ClassMetrics& m = r.report.per_class[static_cast<std::size_t>(c)];
      scores.rows.push_back({name, r.label, format_optional(m.precision, 2),
                             format_optional(m.recall, 2),
                             format_optional(m.f1, 2)});
    }
  }
  append_section_title(out, "Precision, recall and F1-score");
  scores.append_to(out);
  out += '\n';

  append_section_title(out, "Confusion matrices");
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const ExperimentReport& r = reports[i];
    out += "[" + r.label + "]  rows: true class, columns: predicted class\n";
    TextTable cm;
    cm.header.push_back("");
    cm.align = "l";
    for (const std::string& name : r.matrix.class_names) {
      cm.header.push_back(name);
      cm.align += 'r';
    }
    for (int t = 0; t < r.matrix.num_classes(); ++t) {
      std::vector<std::string> row{r.matrix.class_names[t]};
      for (int p = 0; p < r.matrix.num_classes(); ++p) {
        row.push_back(std::to_string(r.matrix.counts[t][p]));
      }
      cm.rows.push_back(std::move(row));
    }
    cm.append_to(out);
    if (i + 1 < reports.size()) out += '\n';
  }
  return out;
}

std::string render_report_csv(const std::vector<ExperimentReport>& reports) {
  check_reports(reports);
  auto check_field = [](const std::string& field) {
    if (field.find(',') != std::string::npos ||
        field.find('\n') != std::string::npos) {
      throw std::invalid_argument("report rendering: field contains a comma or newline: " +
                                  field);
    }
  };
  std::string out = "experiment,class,precision,recall,f1,accuracy,loss\n";
  const std::vector<std::string> classes = class_union(reports);
  for (const ExperimentReport& r : reports) {
    check_field(r.label);
    for (const std::string& name : classes) {
      check_field(name);
      const int c = find_class(r.matrix, name);
      const ClassMetrics* m =
          c >= 0 ? &r.report.per_class[static_cast<std::size_t>(c)] : nullptr;
      out += r.label;
      out += ',';
      out += name;
      out += ',';
      out += m ? csv_field(m->precision) : "NA";
      out += ',';
      out += m ? csv_field(m->recall) : "NA";
      out += ',';
      out += m ? csv_field(m->f1) : "NA";
      out += ',';
      out += shortest_double(r.report.accuracy);
      out += ',';
      out += csv_field(r.test_loss);
      out += '\n';
    }
  }
  return out;
}

}  // namespace auxlearn
