#include <string>

#include "auxlearn/errors.hpp"
#include "auxlearn/manifest.hpp"
#include "doctest.h"
#include "testutil.hpp"

using auxlearn::DatasetManifest;
using auxlearn::ManifestRecord;
using auxlearn::Split;

namespace {

DatasetManifest sample_manifest() {
  DatasetManifest m;
  m.class_names = {"cat", "dog", "others"};
  m.records = {
      {"cat-000001", 0, "n02123045", Split::Train},
      {"dog-000001", 1, "n02088364", Split::Test},
      {"others-000001", 2, std::nullopt, Split::Train},
      {"others-000002", 2, std::nullopt, Split::Test},
  };
  return m;
}

}  // namespace

TEST_CASE("split names round-trip") {
  CHECK(auxlearn::to_string(Split::Train) == "train");
  CHECK(auxlearn::to_string(Split::Test) == "test");
  CHECK(auxlearn::split_from_string("train") == Split::Train);
  CHECK(auxlearn::split_from_string("test") == Split::Test);
  CHECK_THROWS_AS(auxlearn::split_from_string("validation"), auxlearn::ParseError);
}

TEST_CASE("manifest text round-trips byte-exactly") {
  const auto manifest = sample_manifest();
  const std::string text = auxlearn::write_manifest_text(manifest);
  CHECK(text.rfind("example_id,class_name,source_synset,split\n", 0) == 0);

  const DatasetManifest loaded = auxlearn::read_manifest_text(text);
  CHECK(loaded.class_names == manifest.class_names);
  REQUIRE(loaded.records.size() == manifest.records.size());
  for (std::size_t i = 0; i < loaded.records.size(); ++i) {
    CHECK(loaded.records[i].example_id == manifest.records[i].example_id);
    CHECK(loaded.records[i].class_label == manifest.records[i].class_label);
    CHECK(loaded.records[i].source_synset == manifest.records[i].source_synset);
    CHECK(loaded.records[i].split == manifest.records[i].split);
  }
  CHECK(auxlearn::write_manifest_text(loaded) == text);
}

TEST_CASE("manifest file round-trip through disk") {
  testutil::TempDir tmp;
  const auto manifest = sample_manifest();
  const auto path = tmp.file("manifest.csv");
  auxlearn::write_manifest(manifest, path);
  const auto loaded = auxlearn::read_manifest(path);
  CHECK(auxlearn::write_manifest_text(loaded) ==
        auxlearn::write_manifest_text(manifest));

  CHECK_THROWS_AS(auxlearn::read_manifest(tmp.file("absent.csv")),
                  std::runtime_error);
}

TEST_CASE("class names are collected in order of first appearance") {
  const std::string text =
      "example_id,class_name,source_synset,split\n"
      "z1,zebra,,train\n"
      "a1,ant,,train\n"
      "z2,zebra,,test\n"
      "m1,moose,,train\n";
  const auto loaded = auxlearn::read_manifest_text(text);
  CHECK(loaded.class_names == std::vector<std::string>{"zebra", "ant", "moose"});
  CHECK(loaded.records[0].class_label == 0);
  CHECK(loaded.records[1].class_label == 1);
  CHECK(loaded.records[2].class_label == 0);
  CHECK(loaded.records[3].class_label == 2);
  CHECK(!loaded.records[0].source_synset.has_value());
}

TEST_CASE("class counts aggregate per split") {
  const auto manifest = sample_manifest();
  CHECK(manifest.class_counts() == std::vector<long>{1, 1, 2});
  CHECK(manifest.class_counts(Split::Train) == std::vector<long>{1, 0, 1});
  CHECK(manifest.class_counts(Split::Test) == std::vector<long>{0, 1, 1});
}

TEST_CASE("manifest writing rejects fields that break the delimited format") {
  DatasetManifest bad = sample_manifest();
  bad.records[0].example_id = "has,comma";
  CHECK_THROWS_AS(auxlearn::write_manifest_text(bad), std::invalid_argument);

  DatasetManifest newline = sample_manifest();
  newline.class_names[0] = "two\nlines";
  CHECK_THROWS_AS(auxlearn::write_manifest_text(newline), std::invalid_argument);
}

TEST_CASE("manifest parsing reports malformed rows with their line number") {
  const std::string missing_column =
      "example_id,class_name,source_synset,split\n"
      "x1,cat,n1,train\n"
      "x2,cat,n1\n";
  try {
    auxlearn::read_manifest_text(missing_column);
    FAIL("expected ParseError");
  } catch (const auxlearn::ParseError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }

  CHECK_THROWS_AS(auxlearn::read_manifest_text(""), auxlearn::ParseError);
  CHECK_THROWS_AS(auxlearn::read_manifest_text("wrong,header,row,here\n"),
                  auxlearn::ParseError);
  CHECK_THROWS_AS(auxlearn::read_manifest_text(
                      "example_id,class_name,source_synset,split\n"
                      "x1,cat,n1,weekend\n"),
                  auxlearn::ParseError);

  // Header-only text parses to an empty manifest.
  const auto empty = auxlearn::read_manifest_text(
      "example_id,class_name,source_synset,split\n");
  CHECK(empty.records.empty());
  CHECK(empty.class_names.empty());
}
