#include "auxlearn/dataset_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "auxlearn/errors.hpp"

namespace auxlearn {

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) {
    throw std::invalid_argument("dataset: could not format value");
  }
  return std::string(buf, ptr);
}

std::vector<std::string> split_on(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

long parse_long(const std::string& token, int line_no, const char* what) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ParseError("dataset line " + std::to_string(line_no) + ": bad " +
                     what + " '" + token + "'");
  }
  return v;
}

double parse_feature(const std::string& token, int line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc{} || ptr != token.data() + token.size() ||
      !std::isfinite(v)) {
    throw ParseError("dataset line " + std::to_string(line_no) +
                     ": bad feature value '" + token + "'");
  }
  return v;
}

}  // namespace

std::vector<long> Dataset::class_counts() const {
  std::vector<long> counts(class_names.size(), 0);
  for (const LabeledExample& ex : examples) {
    counts.at(static_cast<std::size_t>(ex.label)) += 1;
  }
  return counts;
}

std::string write_dataset_text(const Dataset& dataset) {
  if (dataset.class_names.empty()) {
    throw std::invalid_argument("dataset: class names required");
  }
  const int dim = dataset.feature_dim();
  std::ostringstream out;
  out << "auxlearn-dataset,dim=" << dim << ",classes=" << dataset.num_classes()
      << ",names=";
  for (std::size_t i = 0; i < dataset.class_names.size(); ++i) {
    const std::string& name = dataset.class_names[i];
    if (name.find_first_of(",;\n") != std::string::npos) {
      throw std::invalid_argument("dataset: class name '" + name +
                                  "' must not contain ',' ';' or newlines");
    }
    if (i) out << ';';
    out << name;
  }
  out << '\n';
  for (int j = 0; j < dim; ++j) {
    out << 'f' << j << ',';
  }
  out << "label\n";
  for (const LabeledExample& ex : dataset.examples) {
    if (ex.label < 0 || ex.label >= dataset.num_classes()) {
      throw std::invalid_argument("dataset: label out of range");
    }
    if (ex.features.size() != dim) {
      throw std::invalid_argument("dataset: inconsistent feature dimension");
    }
    for (int j = 0; j < dim; ++j) {
      out << format_double(ex.features[j]) << ',';
    }
    out << ex.label << '\n';
  }
  return out.str();
}

Dataset read_dataset_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;

  if (!std::getline(in, line)) {
    throw ParseError("dataset: empty file");
  }
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto meta = split_on(line, ',');
  if (meta.size() != 4 || meta[0] != "auxlearn-dataset" ||
      meta[1].rfind("dim=", 0) != 0 || meta[2].rfind("classes=", 0) != 0 ||
      meta[3].rfind("names=", 0) != 0) {
    throw ParseError(
        "dataset line 1: expected "
        "'auxlearn-dataset,dim=<D>,classes=<K>,names=<a;b;...>'");
  }
  const long dim = parse_long(meta[1].substr(4), 1, "dim");
  const long k = parse_long(meta[2].substr(8), 1, "class count");
  if (dim < 1 || k < 2) {
    throw ParseError("dataset line 1: dim must be >= 1 and classes >= 2");
  }
  Dataset dataset;
  dataset.class_names = split_on(meta[3].substr(6), ';');
  if (static_cast<long>(dataset.class_names.size()) != k) {
    throw ParseError("dataset line 1: declared " + std::to_string(k) +
                     " classes but " +
                     std::to_string(dataset.class_names.size()) + " names");
  }

  if (!std::getline(in, line)) {
    throw ParseError("dataset: missing column header row");
  }
  ++line_no;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_on(line, ',');
    if (static_cast<long>(fields.size()) != dim + 1) {
      throw ParseError("dataset line " + std::to_string(line_no) +
                       ": expected " + std::to_string(dim + 1) +
                       " fields, got " + std::to_string(fields.size()));
    }
    LabeledExample ex;
    ex.features.resize(dim);
    for (long j = 0; j < dim; ++j) {
      ex.features[j] = parse_feature(fields[static_cast<std::size_t>(j)], line_no);
    }
    const long label = parse_long(fields.back(), line_no, "label");
    if (label < 0 || label >= k) {
      throw ParseError("dataset line " + std::to_string(line_no) + ": label " +
                       std::to_string(label) + " out of range [0, " +
                       std::to_string(k) + ")");
    }
    ex.label = static_cast<int>(label);
    dataset.examples.push_back(std::move(ex));
  }
  return dataset;
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open dataset for writing: " + path.string());
  }
  out << write_dataset_text(dataset);
  if (!out) {
    throw std::runtime_error("failed writing dataset: " + path.string());
  }
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open dataset: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return read_dataset_text(buf.str());
}

}  // namespace auxlearn
