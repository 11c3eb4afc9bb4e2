#include <cmath>
#include <limits>
#include <string>

#include "auxlearn/dataset_io.hpp"
#include "auxlearn/errors.hpp"
#include "doctest.h"
#include "testutil.hpp"

using auxlearn::Dataset;
using auxlearn::LabeledExample;
using auxlearn::Vector;

namespace {

Dataset sample_dataset() {
  Dataset d;
  d.class_names = {"cat", "dog", "others"};
  Vector a(2), b(2), c(2);
  a << -0.25, 0.5;
  b << 0.125, -1.0;
  c << 1.0, 0.0;
  d.examples = {{a, 0}, {b, 1}, {c, 2}};
  return d;
}

}  // namespace

TEST_CASE("dataset text round-trips bit-exactly") {
  const Dataset d = sample_dataset();
  const std::string text = auxlearn::write_dataset_text(d);
  CHECK(text.rfind("auxlearn-dataset,dim=2,classes=3,names=cat;dog;others\n", 0) == 0);

  const Dataset loaded = auxlearn::read_dataset_text(text);
  CHECK(loaded.class_names == d.class_names);
  REQUIRE(loaded.examples.size() == d.examples.size());
  for (std::size_t i = 0; i < d.examples.size(); ++i) {
    CHECK((loaded.examples[i].features.array() == d.examples[i].features.array()).all());
    CHECK(loaded.examples[i].label == d.examples[i].label);
  }
  CHECK(auxlearn::write_dataset_text(loaded) == text);
}

TEST_CASE("dataset io preserves awkward floating-point feature values") {
  Dataset d;
  d.class_names = {"a", "b"};
  Vector v(3);
  v << -0.0, std::numeric_limits<double>::denorm_min(), std::nextafter(0.5, 1.0);
  d.examples = {{v, 1}};

  const Dataset loaded = auxlearn::read_dataset_text(auxlearn::write_dataset_text(d));
  CHECK((loaded.examples[0].features.array() == v.array()).all());
  CHECK(std::signbit(loaded.examples[0].features[0]));
}

TEST_CASE("dataset file round-trip through disk") {
  testutil::TempDir tmp;
  const Dataset d = sample_dataset();
  const auto path = tmp.file("data.ds");
  auxlearn::write_dataset(d, path);
  const Dataset loaded = auxlearn::read_dataset(path);
  CHECK(auxlearn::write_dataset_text(loaded) == auxlearn::write_dataset_text(d));
  CHECK(loaded.feature_dim() == 2);
  CHECK(loaded.num_classes() == 3);
  CHECK(loaded.class_counts() == std::vector<long>{1, 1, 1});

  CHECK_THROWS_AS(auxlearn::read_dataset(tmp.file("absent.ds")), std::runtime_error);
}

TEST_CASE("dataset parsing rejects malformed input with a line reference") {
  CHECK_THROWS_AS(auxlearn::read_dataset_text(""), auxlearn::ParseError);
  CHECK_THROWS_AS(auxlearn::read_dataset_text("bogus header\n"), auxlearn::ParseError);

  const std::string good = auxlearn::write_dataset_text(sample_dataset());

  // Row with the wrong number of feature columns.
  try {
    auxlearn::read_dataset_text(
        "auxlearn-dataset,dim=2,classes=2,names=a;b\n"
        "f0,f1,label\n"
        "0.5,0\n");
    FAIL("expected ParseError");
  } catch (const auxlearn::ParseError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }

  // Label outside [0, classes).
  CHECK_THROWS_AS(auxlearn::read_dataset_text(
                      "auxlearn-dataset,dim=1,classes=2,names=a;b\n"
                      "f0,label\n"
                      "0.5,2\n"),
                  auxlearn::ParseError);

  // Class-name count disagreeing with the classes= field.
  CHECK_THROWS_AS(auxlearn::read_dataset_text(
                      "auxlearn-dataset,dim=1,classes=3,names=a;b\n"
                      "f0,label\n"),
                  auxlearn::ParseError);

  // Non-numeric feature.
  CHECK_THROWS_AS(auxlearn::read_dataset_text(
                      "auxlearn-dataset,dim=1,classes=2,names=a;b\n"
                      "f0,label\n"
                      "abc,0\n"),
                  auxlearn::ParseError);

  CHECK_NOTHROW(auxlearn::read_dataset_text(good));
}
