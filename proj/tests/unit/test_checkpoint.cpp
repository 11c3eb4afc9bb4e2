#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "auxlearn/checkpoint.hpp"
#include "auxlearn/errors.hpp"
#include "auxlearn/model.hpp"
#include "doctest.h"
#include "testutil.hpp"

using auxlearn::Activation;
using auxlearn::MlpModel;

namespace {

bool bitwise_equal(const MlpModel& a, const MlpModel& b) {
  if (a.layer_dims != b.layer_dims) return false;
  if (a.activation != b.activation) return false;
  for (std::size_t l = 0; l < a.weights.size(); ++l) {
    if ((a.weights[l].array() != b.weights[l].array()).any()) return false;
    if ((a.biases[l].array() != b.biases[l].array()).any()) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("checkpoint text round-trips a random model bit-exactly") {
  auto model = auxlearn::init_model({3, 9, 4}, Activation::Tanh, 5150);
  const std::string text = auxlearn::save_model_text(model);
  const MlpModel loaded = auxlearn::load_model_text(text);
  CHECK(bitwise_equal(model, loaded));
  CHECK(text.rfind("auxlearn-mlp 1\n", 0) == 0);

  // Serializing the loaded model again must reproduce the bytes.
  CHECK(auxlearn::save_model_text(loaded) == text);
}

TEST_CASE("checkpoint round-trips awkward floating-point values") {
  MlpModel model;
  model.layer_dims = {2, 3};
  model.activation = Activation::Relu;
  auxlearn::Matrix w(2, 3);
  w << 0.1, -0.0, std::numeric_limits<double>::denorm_min(),
      std::nextafter(1.0, 2.0), -1e-300, 123456789.123456789;
  model.weights = {w};
  auxlearn::Vector b(3);
  b << 1e300, std::numeric_limits<double>::min(), -0.3333333333333333;
  model.biases = {b};

  const MlpModel loaded = auxlearn::load_model_text(auxlearn::save_model_text(model));
  CHECK(bitwise_equal(model, loaded));
  CHECK(std::signbit(loaded.weights[0](0, 1)));  // -0.0 keeps its sign
  CHECK(loaded.activation == Activation::Relu);
}

TEST_CASE("checkpoint file round-trip through disk") {
  testutil::TempDir tmp;
  auto model = auxlearn::init_model({2, 5, 3}, Activation::Tanh, 808);
  const auto path = tmp.file("model.ckpt");
  auxlearn::save_model(model, path);
  const MlpModel loaded = auxlearn::load_model(path);
  CHECK(bitwise_equal(model, loaded));

  CHECK_THROWS_AS(auxlearn::load_model(tmp.file("missing.ckpt")),
                  std::runtime_error);
}

TEST_CASE("loading rejects malformed checkpoints with a line reference") {
  auto model = auxlearn::init_model({2, 2}, Activation::Tanh, 3);
  const std::string good = auxlearn::save_model_text(model);

  CHECK_THROWS_AS(auxlearn::load_model_text(""), auxlearn::ParseError);
  CHECK_THROWS_AS(auxlearn::load_model_text("auxlearn-mlp 2\n"), auxlearn::ParseError);
  CHECK_THROWS_AS(auxlearn::load_model_text("not-a-checkpoint\n"), auxlearn::ParseError);

  // Truncated: drop the trailing "end" line and everything after the header.
  const std::string truncated = good.substr(0, good.size() / 2);
  CHECK_THROWS_AS(auxlearn::load_model_text(truncated), auxlearn::ParseError);

  // Corrupt one numeric token.
  std::string corrupted = good;
  const auto pos = corrupted.find("weights 0");
  REQUIRE(pos != std::string::npos);
  const auto line_end = corrupted.find('\n', pos);
  corrupted.replace(line_end + 1, 3, "nan");
  CHECK_THROWS_AS(auxlearn::load_model_text(corrupted), auxlearn::ParseError);

  std::string garbage = good;
  const auto gpos = garbage.find("biases");
  garbage.replace(gpos, 6, "bogus!");
  try {
    auxlearn::load_model_text(garbage);
    FAIL("expected ParseError");
  } catch (const auxlearn::ParseError& e) {
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
}

TEST_CASE("checkpoints preserve the activation enum") {
  for (auto act : {Activation::Tanh, Activation::Relu}) {
    auto model = auxlearn::init_model({2, 3, 2}, act, 11);
    const MlpModel loaded =
        auxlearn::load_model_text(auxlearn::save_model_text(model));
    CHECK(loaded.activation == act);
  }
}
