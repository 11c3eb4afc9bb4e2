#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "auxlearn/curation.hpp"
#include "auxlearn/errors.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "testutil.hpp"

using auxlearn::DatasetManifest;
using auxlearn::ExclusionList;
using auxlearn::ManifestRecord;
using auxlearn::Split;
using auxlearn::SynsetEntry;
using auxlearn::Vector;

namespace {

DatasetManifest make_manifest(const std::vector<long>& class_sizes,
                              Split split = Split::Train) {
  DatasetManifest m;
  for (std::size_t c = 0; c < class_sizes.size(); ++c) {
    m.class_names.push_back("class" + std::to_string(c));
  }
  for (std::size_t c = 0; c < class_sizes.size(); ++c) {
    for (long i = 0; i < class_sizes[c]; ++i) {
      m.records.push_back({"c" + std::to_string(c) + "-" + std::to_string(i),
                           static_cast<int>(c), std::nullopt, split});
    }
  }
  return m;
}

}  // namespace

TEST_CASE("synset mapping parses ids and comma-separated descriptions") {
  const auto entries = auxlearn::parse_synset_mapping(
      "n01440764 tench, Tinca tinca\n"
      "\n"
      "n02123045 tabby, tabby cat\n"
      "n03000134 chainlink fence\n");
  REQUIRE(entries.size() == 3);
  CHECK(entries[0].synset_id == "n01440764");
  CHECK(entries[0].names == std::vector<std::string>{"tench", "Tinca tinca"});
  CHECK(entries[1].names == std::vector<std::string>{"tabby", "tabby cat"});
  CHECK(entries[2].names == std::vector<std::string>{"chainlink fence"});

  CHECK(auxlearn::parse_synset_mapping("").empty());
}

TEST_CASE("synset mapping reports malformed lines by number") {
  try {
    auxlearn::parse_synset_mapping("n01 tench\njusttoken\n");
    FAIL("expected ParseError");
  } catch (const auxlearn::ParseError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(auxlearn::parse_synset_mapping("n01 \n"), auxlearn::ParseError);
}

TEST_CASE("synset mapping reads the thousand-class fixture from disk") {
  testutil::TempDir tmp;
  const auto fixture = testutil::make_synset_fixture();
  testutil::write_file(tmp.file("map.txt"), fixture.mapping_text);
  const auto entries = auxlearn::read_synset_mapping(tmp.file("map.txt"));
  CHECK(static_cast<int>(entries.size()) == fixture.num_entries);

  CHECK_THROWS_AS(auxlearn::read_synset_mapping(tmp.file("absent.txt")),
                  std::runtime_error);
}

TEST_CASE("breed-name normalization produces lowerCamelCase and is idempotent") {
  CHECK(auxlearn::normalize_breed_name("german-shepherd") == "germanShepherd");
  CHECK(auxlearn::normalize_breed_name("beagle") == "beagle");
  CHECK(auxlearn::normalize_breed_name("soft-coated-wheaten-terrier") ==
        "softCoatedWheatenTerrier");
  CHECK(auxlearn::normalize_breed_name("Tibetan-Mastiff") == "tibetanMastiff");

  for (const char* name :
       {"german-shepherd", "beagle", "soft-coated-wheaten-terrier",
        "Tibetan-Mastiff", "x"}) {
    const auto once = auxlearn::normalize_breed_name(name);
    CHECK(auxlearn::normalize_breed_name(once) == once);
  }

  CHECK_THROWS_AS(auxlearn::normalize_breed_name(""), std::invalid_argument);
}

TEST_CASE("default cat exclusions are the five house-cat classes") {
  CHECK(ExclusionList::default_cat_breed_names() ==
        std::vector<std::string>{"tabby", "tiger cat", "Persian cat",
                                 "Siamese cat", "Egyptian cat"});
}

TEST_CASE("exclusion matching is whole-name, case- and separator-insensitive") {
  const std::vector<SynsetEntry> entries = {
      {"n1", {"German shepherd", "German police dog", "alsatian"}},
      {"n2", {"tabby", "tabby cat"}},
      {"n3", {"catamaran"}},
      {"n4", {"Persian cat"}},
      {"n5", {"shepherd"}},
  };
  ExclusionList list;
  list.dog_breed_names = {"german-shepherd"};

  const auto result = auxlearn::build_exclusion_set(entries, list);
  // n1 via the dog breed; n2 and n4 via default cats. "catamaran" must not
  // match "Persian cat" or anything else, and the bare "shepherd" must not
  // match the longer breed name.
  CHECK(result.synset_ids ==
        std::unordered_set<std::string>{"n1", "n2", "n4"});
  // "tiger cat", "Siamese cat", "Egyptian cat" have no entry here.
  CHECK(result.unmatched_names ==
        std::vector<std::string>{"tiger cat", "Siamese cat", "Egyptian cat"});
}

TEST_CASE("empty exclusion lists exclude nothing") {
  const std::vector<SynsetEntry> entries = {{"n1", {"tabby"}}, {"n2", {"beagle"}}};
  ExclusionList list;
  list.dog_breed_names = {};
  list.cat_breed_names = {};
  const auto result = auxlearn::build_exclusion_set(entries, list);
  CHECK(result.synset_ids.empty());
  CHECK(result.unmatched_names.empty());
}

TEST_CASE("the thousand-class fixture retains exactly the non-pet classes") {
  const auto fixture = testutil::make_synset_fixture();
  const auto entries = auxlearn::parse_synset_mapping(fixture.mapping_text);
  ExclusionList list;
  list.dog_breed_names = fixture.dog_names;

  const auto result = auxlearn::build_exclusion_set(entries, list);
  CHECK(static_cast<int>(result.synset_ids.size()) ==
        fixture.num_dogs + fixture.num_cats);
  CHECK(static_cast<int>(entries.size()) -
            static_cast<int>(result.synset_ids.size()) ==
        875);
  CHECK(result.unmatched_names.empty());
}

TEST_CASE("exclusion files ignore comments and blank lines") {
  testutil::TempDir tmp;
  testutil::write_file(tmp.file("dogs.txt"),
                       "# breeds to drop\n"
                       "german-shepherd\n"
                       "\n"
                       "beagle\n");
  CHECK(auxlearn::read_exclusion_file(tmp.file("dogs.txt")) ==
        std::vector<std::string>{"german-shepherd", "beagle"});
  CHECK_THROWS_AS(auxlearn::read_exclusion_file(tmp.file("absent.txt")),
                  std::runtime_error);
}

TEST_CASE("split assignment hits the published per-class counts") {
  // Source pool sizes after exclusion: two kept pet classes and the
  // auxiliary pool, split 80/20.
  const auto manifest = make_manifest({12500, 12500, 109375});
  const auto split = auxlearn::assign_split(manifest, 0.8, 2020);

  CHECK(split.class_counts(Split::Train) ==
        std::vector<long>{10000, 10000, 87500});
  CHECK(split.class_counts(Split::Test) ==
        std::vector<long>{2500, 2500, 21875});
}

TEST_CASE("split assignment is a deterministic partition preserving order") {
  const auto manifest = make_manifest({13, 7});
  const auto a = auxlearn::assign_split(manifest, 0.8, 5);
  const auto b = auxlearn::assign_split(manifest, 0.8, 5);
  const auto c = auxlearn::assign_split(manifest, 0.8, 6);

  REQUIRE(a.records.size() == manifest.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].example_id == manifest.records[i].example_id);
    CHECK(a.records[i].split == b.records[i].split);
  }
  bool any_difference = false;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    if (a.records[i].split != c.records[i].split) any_difference = true;
  }
  CHECK(any_difference);

  // 13 * 0.8 = 10.4 -> 10 train; 7 * 0.8 = 5.6 -> 6 train.
  CHECK(a.class_counts(Split::Train) == std::vector<long>{10, 6});
  CHECK(a.class_counts(Split::Test) == std::vector<long>{3, 1});
}

TEST_CASE("split rounding is half away from zero per class") {
  const auto manifest = make_manifest({3});
  const auto split = auxlearn::assign_split(manifest, 0.5, 1);
  // 3 * 0.5 = 1.5 rounds to 2 train records.
  CHECK(split.class_counts(Split::Train) == std::vector<long>{2});
  CHECK(split.class_counts(Split::Test) == std::vector<long>{1});
}

TEST_CASE("split assignment validates its inputs") {
  const auto manifest = make_manifest({4});
  CHECK_THROWS_AS(auxlearn::assign_split(manifest, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(auxlearn::assign_split(manifest, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(auxlearn::assign_split(DatasetManifest{}, 0.8, 1),
                  std::invalid_argument);
}

TEST_CASE("ratio enforcement reproduces the published test-split counts") {
  const auto manifest = make_manifest({2500, 2500, 43750}, Split::Test);
  Vector ratios(3);
  ratios << 1.0, 1.0, 8.75;
  const auto balanced = auxlearn::enforce_ratio(manifest, ratios, 2020);
  CHECK(balanced.class_counts(Split::Test) ==
        std::vector<long>{2500, 2500, 21875});
}

TEST_CASE("ratio enforcement is per split, anchored, and order-preserving") {
  DatasetManifest manifest;
  manifest.class_names = {"a", "b"};
  // Train: 10 vs 100; test: 5 vs 5.
  for (int i = 0; i < 10; ++i)
    manifest.records.push_back({"a-tr-" + std::to_string(i), 0, std::nullopt, Split::Train});
  for (int i = 0; i < 100; ++i)
    manifest.records.push_back({"b-tr-" + std::to_string(i), 1, std::nullopt, Split::Train});
  for (int i = 0; i < 5; ++i)
    manifest.records.push_back({"a-te-" + std::to_string(i), 0, std::nullopt, Split::Test});
  for (int i = 0; i < 5; ++i)
    manifest.records.push_back({"b-te-" + std::to_string(i), 1, std::nullopt, Split::Test});

  Vector ratios(2);
  ratios << 1.0, 1.0;
  const auto balanced = auxlearn::enforce_ratio(manifest, ratios, 9);

  // Train anchors on class a (10 records): b drops to 10. Test is already
  // balanced, so it must pass through untouched.
  CHECK(balanced.class_counts(Split::Train) == std::vector<long>{10, 10});
  CHECK(balanced.class_counts(Split::Test) == std::vector<long>{5, 5});

  // The result is a subsequence of the input.
  std::size_t cursor = 0;
  for (const auto& rec : balanced.records) {
    while (cursor < manifest.records.size() &&
           manifest.records[cursor].example_id != rec.example_id) {
      ++cursor;
    }
    REQUIRE(cursor < manifest.records.size());
    ++cursor;
  }

  // Anchor class keeps every record.
  long kept_a = 0;
  for (const auto& rec : balanced.records) {
    if (rec.class_label == 0 && rec.split == Split::Train) ++kept_a;
  }
  CHECK(kept_a == 10);
}

TEST_CASE("ratio enforcement is a fixed point on proportional data") {
  const auto manifest = make_manifest({200, 200, 1750}, Split::Test);
  Vector ratios(3);
  ratios << 1.0, 1.0, 8.75;
  const auto once = auxlearn::enforce_ratio(manifest, ratios, 3);
  REQUIRE(once.records.size() == manifest.records.size());
  for (std::size_t i = 0; i < once.records.size(); ++i) {
    CHECK(once.records[i].example_id == manifest.records[i].example_id);
  }
}

TEST_CASE("ratio enforcement tracks the anchor within rounding error") {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 30; ++trial) {
    const int k = 2 + static_cast<int>(rng() % 3);
    std::vector<long> sizes;
    Vector ratios(k);
    for (int c = 0; c < k; ++c) {
      sizes.push_back(5 + static_cast<long>(rng() % 400));
      ratios[c] = 0.5 + static_cast<double>(rng() % 160) / 16.0;
    }
    const auto manifest = make_manifest(sizes);
    const auto balanced = auxlearn::enforce_ratio(manifest, ratios, rng());
    const auto counts = balanced.class_counts(Split::Train);

    double min_quotient = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      min_quotient =
          std::min(min_quotient, static_cast<double>(sizes[c]) / ratios[c]);
    }
    for (int c = 0; c < k; ++c) {
      CHECK(counts[c] <= sizes[c]);
      CHECK(std::abs(static_cast<double>(counts[c]) - min_quotient * ratios[c]) <=
            0.5 + 1e-9);
    }
  }
}

TEST_CASE("ratio enforcement validates its inputs") {
  const auto manifest = make_manifest({5, 5});
  Vector wrong_size(3);
  wrong_size << 1.0, 1.0, 1.0;
  CHECK_THROWS_AS(auxlearn::enforce_ratio(manifest, wrong_size, 1),
                  std::invalid_argument);
  Vector negative(2);
  negative << 1.0, -1.0;
  CHECK_THROWS_AS(auxlearn::enforce_ratio(manifest, negative, 1),
                  std::invalid_argument);

  const auto with_empty_class = make_manifest({5, 0});
  Vector ones(2);
  ones << 1.0, 1.0;
  CHECK_THROWS_AS(auxlearn::enforce_ratio(with_empty_class, ones, 1),
                  std::invalid_argument);
}

TEST_CASE("pixel scaling maps [0, 255] onto [-1, 1]") {
  const int raw[] = {0, 255, 128, 64};
  const Vector scaled = auxlearn::scale_pixels(raw);
  CHECK(scaled[0] == -1.0);
  CHECK(scaled[1] == 1.0);
  CHECK(scaled[2] == doctest::Approx(128.0 / 127.5 - 1.0));
  CHECK(scaled[3] == doctest::Approx(64.0 / 127.5 - 1.0));

  // The map is affine and invertible.
  for (int i = 0; i < 4; ++i) {
    CHECK((scaled[i] + 1.0) * 127.5 == doctest::Approx(raw[i]).epsilon(1e-12));
  }

  const int out_of_range[] = {-1};
  CHECK_THROWS_AS(auxlearn::scale_pixels(out_of_range), std::invalid_argument);
  const int too_big[] = {256};
  CHECK_THROWS_AS(auxlearn::scale_pixels(too_big), std::invalid_argument);
}

TEST_CASE("one-hot encoding places a single one") {
  const Vector v = auxlearn::one_hot(2, 4);
  CHECK(v.size() == 4);
  CHECK(v[2] == 1.0);
  CHECK(v.sum() == 1.0);
  CHECK_THROWS_AS(auxlearn::one_hot(4, 4), std::invalid_argument);
  CHECK_THROWS_AS(auxlearn::one_hot(-1, 4), std::invalid_argument);
}

TEST_CASE("image resizing is corner-aligned, bounded, and identity-preserving") {
  auxlearn::Image ramp;
  ramp.height = 5;
  ramp.width = 7;
  ramp.channels = 1;
  ramp.pixels.resize(35);
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 7; ++x) ramp.at(y, x, 0) = y * 10.0 + x;
  }

  const auto resized = auxlearn::resize_image(ramp, 64, 64);
  CHECK(resized.height == 64);
  CHECK(resized.width == 64);
  CHECK(resized.channels == 1);

  // Corners sample the input corners exactly.
  CHECK(resized.at(0, 0, 0) == doctest::Approx(ramp.at(0, 0, 0)));
  CHECK(resized.at(0, 63, 0) == doctest::Approx(ramp.at(0, 6, 0)));
  CHECK(resized.at(63, 0, 0) == doctest::Approx(ramp.at(4, 0, 0)));
  CHECK(resized.at(63, 63, 0) == doctest::Approx(ramp.at(4, 6, 0)));

  // Convexity: outputs stay inside the input range.
  const auto [lo, hi] =
      std::minmax_element(ramp.pixels.begin(), ramp.pixels.end());
  for (double v : resized.pixels) {
    CHECK(v >= *lo - 1e-12);
    CHECK(v <= *hi + 1e-12);
  }

  // Same-size resize is the identity.
  auxlearn::Image same;
  same.height = 3;
  same.width = 3;
  same.channels = 2;
  same.pixels.resize(18);
  for (std::size_t i = 0; i < same.pixels.size(); ++i) {
    same.pixels[i] = static_cast<double>(i);
  }
  const auto copied = auxlearn::resize_image(same, 3, 3);
  for (std::size_t i = 0; i < same.pixels.size(); ++i) {
    CHECK(copied.pixels[i] == doctest::Approx(same.pixels[i]));
  }

  // A constant image stays constant, even from a single pixel.
  auxlearn::Image dot;
  dot.height = 1;
  dot.width = 1;
  dot.channels = 1;
  dot.pixels = {0.25};
  const auto grown = auxlearn::resize_image(dot, 64, 64);
  for (double v : grown.pixels) CHECK(v == doctest::Approx(0.25));

  auxlearn::Image empty;
  CHECK_THROWS_AS(auxlearn::resize_image(empty, 64, 64), std::invalid_argument);
  CHECK_THROWS_AS(auxlearn::resize_image(ramp, 0, 64), std::invalid_argument);
}
