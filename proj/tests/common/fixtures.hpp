#pragma once

#include <algorithm>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

namespace testutil {

/// Synthetic synset mapping in the ILSVRC-2012 text layout: 1000 classes of
/// which exactly 120 match a dog-breed exclusion list and exactly 5 match the
/// default cat names.
struct SynsetFixture {
  std::string mapping_text;            // 1000 lines, "nXXXXXXXX desc, alias"
  std::vector<std::string> dog_names;  // 120 dash-separated breed names
  int num_entries = 1000;
  int num_dogs = 120;
  int num_cats = 5;
};

inline SynsetFixture make_synset_fixture() {
  SynsetFixture fixture;

  // Descriptions for the 120 dog classes.  Half use multi-word descriptions so
  // that the dash-separated exclusion names only match when separators are
  // ignored; half are single tokens.
  std::vector<std::string> dog_descriptions;
  for (int i = 0; i < 60; ++i) {
    dog_descriptions.push_back("Fixture" + std::to_string(i) + " terrier");
    fixture.dog_names.push_back("fixture" + std::to_string(i) + "-terrier");
  }
  for (int i = 0; i < 60; ++i) {
    dog_descriptions.push_back("fixhound" + std::to_string(i));
    fixture.dog_names.push_back("fixhound" + std::to_string(i));
  }

  const std::vector<std::string> cat_descriptions = {
      "tabby", "tiger cat", "Persian cat", "Siamese cat", "Egyptian cat"};

  std::vector<std::string> descriptions;
  descriptions.reserve(1000);
  for (const auto& d : dog_descriptions) descriptions.push_back(d + ", fixture dog");
  for (const auto& d : cat_descriptions) descriptions.push_back(d + ", fixture cat");
  for (int i = 0; i < 875; ++i) {
    descriptions.push_back("thing" + std::to_string(i) + ", object " + std::to_string(i));
  }

  // Interleave dog/cat/other entries deterministically so that no code path
  // can rely on the excluded classes being contiguous.
  std::mt19937_64 rng(12345);
  std::shuffle(descriptions.begin(), descriptions.end(), rng);

  for (int i = 0; i < 1000; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "n%08d", 7000001 + i);
    fixture.mapping_text += std::string(id) + " " + descriptions[i] + "\n";
  }
  return fixture;
}

}  // namespace testutil
