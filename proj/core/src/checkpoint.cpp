#include "auxlearn/checkpoint.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "auxlearn/errors.hpp"

namespace auxlearn {

namespace {

constexpr const char* kMagic = "auxlearn-mlp";
constexpr int kVersion = 1;

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) {
    throw ParseError("checkpoint: could not format value");
  }
  return std::string(buf, ptr);
}

double parse_double(std::string_view token, int line_no) {
  double v = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end) {
    throw ParseError("checkpoint line " + std::to_string(line_no) +
                     ": bad number '" + std::string(token) + "'");
  }
  if (!std::isfinite(v)) {
    throw ParseError("checkpoint line " + std::to_string(line_no) +
                     ": non-finite value");
  }
  return v;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) {
    tokens.push_back(tok);
  }
  return tokens;
}

const char* activation_name(Activation a) {
  return a == Activation::Relu ? "relu" : "tanh";
}

Activation parse_activation(const std::string& name, int line_no) {
  if (name == "relu") return Activation::Relu;
  if (name == "tanh") return Activation::Tanh;
  throw ParseError("checkpoint line " + std::to_string(line_no) +
                   ": unknown activation '" + name + "'");
}

// Line-oriented reader keeping a 1-based line counter for error messages.
class LineReader {
 public:
  explicit LineReader(const std::string& text) : in_(text) {}

  bool next(std::string& line) {
    if (!std::getline(in_, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++line_no_;
    return true;
  }

  std::string require(const char* what) {
    std::string line;
    if (!next(line)) {
      throw ParseError("checkpoint: unexpected end of file, expected " +
                       std::string(what));
    }
    return line;
  }

  int line_no() const { return line_no_; }

 private:
  std::istringstream in_;
  int line_no_ = 0;
};

}  // namespace

std::string save_model_text(const MlpModel& model) {
  for (int l = 0; l < model.num_layers(); ++l) {
    if (!model.weights[l].allFinite() || !model.biases[l].allFinite()) {
      throw ParseError("checkpoint: refusing to save non-finite parameters");
    }
  }
  std::ostringstream out;
  out << kMagic << ' ' << kVersion << '\n';
  out << "activation " << activation_name(model.activation) << '\n';
  out << "layer_dims";
  for (int d : model.layer_dims) {
    out << ' ' << d;
  }
  out << '\n';
  for (int l = 0; l < model.num_layers(); ++l) {
    const Matrix& w = model.weights[l];
    out << "weights " << l << ' ' << w.rows() << ' ' << w.cols() << '\n';
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) {
        if (j) out << ' ';
        out << format_double(w(i, j));
      }
      out << '\n';
    }
    const Vector& b = model.biases[l];
    out << "biases " << l << ' ' << b.size() << '\n';
    for (Eigen::Index j = 0; j < b.size(); ++j) {
      if (j) out << ' ';
      out << format_double(b[j]);
    }
    out << '\n';
  }
  out << "end\n";
  return out.str();
}

MlpModel load_model_text(const std::string& text) {
  LineReader reader(text);

  auto header = split_ws(reader.require("header"));
  if (header.size() != 2 || header[0] != kMagic) {
    throw ParseError("checkpoint line 1: expected '" + std::string(kMagic) +
                     " <version>' header");
  }
  if (header[1] != std::to_string(kVersion)) {
    throw ParseError("checkpoint: unsupported format version '" + header[1] + "'");
  }

  auto act_line = split_ws(reader.require("activation"));
  if (act_line.size() != 2 || act_line[0] != "activation") {
    throw ParseError("checkpoint line " + std::to_string(reader.line_no()) +
                     ": expected 'activation <name>'");
  }
  const Activation activation = parse_activation(act_line[1], reader.line_no());

  auto dims_line = split_ws(reader.require("layer_dims"));
  if (dims_line.size() < 3 || dims_line[0] != "layer_dims") {
    throw ParseError("checkpoint line " + std::to_string(reader.line_no()) +
                     ": expected 'layer_dims <d0> <d1> ...'");
  }
  std::vector<int> dims;
  for (std::size_t i = 1; i < dims_line.size(); ++i) {
    int d = 0;
    auto [ptr, ec] = std::from_chars(dims_line[i].data(),
                                     dims_line[i].data() + dims_line[i].size(), d);
    if (ec != std::errc{} || ptr != dims_line[i].data() + dims_line[i].size() ||
        d < 1) {
      throw ParseError("checkpoint line " + std::to_string(reader.line_no()) +
                       ": bad layer dim '" + dims_line[i] + "'");
    }
    dims.push_back(d);
  }

  MlpModel model;
  model.layer_dims = dims;
  model.activation = activation;
  const int layers = static_cast<int>(dims.size()) - 1;

  for (int l = 0; l < layers; ++l) {
    auto w_header = split_ws(reader.require("weights header"));
    if (w_header.size() != 4 || w_header[0] != "weights" ||
        w_header[1] != std::to_string(l) ||
        w_header[2] != std::to_string(dims[l]) ||
        w_header[3] != std::to_string(dims[l + 1])) {
      throw ParseError("checkpoint line " + std::to_string(reader.line_no()) +
                       ": expected 'weights " + std::to_string(l) + " " +
                       std::to_string(dims[l]) + " " +
                       std::to_string(dims[l + 1]) + "'");
    }
    Matrix w(dims[l], dims[l + 1]);
    for (int i = 0; i < dims[l]; ++i) {
      auto row = split_ws(reader.require("weight row"));
      if (static_cast<int>(row.size()) != dims[l + 1]) {
        throw ParseError("checkpoint line " + std::to_string(reader.line_no()) +
                         ": expected " + std::to_string(dims[l + 1]) +
                         " values, got " + std::to_string(row.size()));
      }
      for (int j = 0; j < dims[l + 1]; ++j) {
        w(i, j) = parse_double(row[j], reader.line_no());
      }
    }
    model.weights.push_back(std::move(w));

    auto b_header = split_ws(reader.require("biases header"));
    if (b_header.size() != 3 || b_header[0] != "biases" ||
        b_header[1] != std::to_string(l) ||
        b_header[2] != std::to_string(dims[l + 1])) {
      throw ParseError("checkpoint line " + std::to_string(reader.line_no()) +
                       ": expected 'biases " + std::to_string(l) + " " +
                       std::to_string(dims[l + 1]) + "'");
    }
    auto b_row = split_ws(reader.require("bias row"));
    if (static_cast<int>(b_row.size()) != dims[l + 1]) {
      throw ParseError("checkpoint line " + std::to_string(reader.line_no()) +
                       ": expected " + std::to_string(dims[l + 1]) +
                       " bias values");
    }
    Vector b(dims[l + 1]);
    for (int j = 0; j < dims[l + 1]; ++j) {
      b[j] = parse_double(b_row[j], reader.line_no());
    }
    model.biases.push_back(std::move(b));
  }

  const std::string tail = reader.require("'end'");
  if (tail != "end") {
    throw ParseError("checkpoint line " + std::to_string(reader.line_no()) +
                     ": expected 'end', got '" + tail + "'");
  }
  return model;
}

void save_model(const MlpModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open checkpoint for writing: " +
                             path.string());
  }
  out << save_model_text(model);
  if (!out) {
    throw std::runtime_error("failed writing checkpoint: " + path.string());
  }
}

MlpModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open checkpoint: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_model_text(buf.str());
}

}  // namespace auxlearn
