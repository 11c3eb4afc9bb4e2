#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "auxlearn/manifest.hpp"
#include "auxlearn/types.hpp"

namespace auxlearn {

/// One line of a synset mapping file: an id plus its comma-separated
/// human-readable descriptions.
struct SynsetEntry {
  std::string synset_id;
  std::vector<std::string> names;
};

/// Parses mapping text with one "<synset_id> <desc1, desc2, ...>" entry per
/// nonempty line. Throws ParseError citing the 1-based line number when a
/// line has no space separator or an empty description list.
std::vector<SynsetEntry> parse_synset_mapping(const std::string& text);
std::vector<SynsetEntry> read_synset_mapping(const std::filesystem::path& path);

/// Converts a dash-separated breed name to lowerCamelCase:
/// "german-shepherd" -> "germanShepherd". Only the first character of each
/// token is case-adjusted, which makes the transform idempotent.
/// Throws std::invalid_argument on an empty name.
std::string normalize_breed_name(std::string_view dash_name);

/// Breed names to exclude from an auxiliary-class source pool. Dog names are
/// given dash-separated and matched in normalized form; cat names are
/// matched verbatim.
struct ExclusionList {
  std::vector<std::string> dog_breed_names;
  std::vector<std::string> cat_breed_names = default_cat_breed_names();

  static std::vector<std::string> default_cat_breed_names();
};

struct ExclusionResult {
  std::unordered_set<std::string> synset_ids;
  /// Exclusion names (as given) that matched no synset; reported as
  /// warnings, never fatal.
  std::vector<std::string> unmatched_names;
};

/// Collects the ids of every entry whose description list contains any
/// excluded breed name. Matching is against whole descriptions (never
/// substrings), ignoring case and the dash/space token separators, so the
/// dash-separated breed "german-shepherd" matches the description
/// "German shepherd".
ExclusionResult build_exclusion_set(const std::vector<SynsetEntry>& entries,
                                    const ExclusionList& exclusions);

/// Reads an exclusion file: one breed name per line, lines starting with
/// '#' and blank lines ignored.
std::vector<std::string> read_exclusion_file(const std::filesystem::path& path);

/// Reassigns splits per class: round(n_c * train_fraction) records (half
/// away from zero) go to train, the rest to test, chosen by a seeded
/// shuffle. Record order is preserved.
DatasetManifest assign_split(const DatasetManifest& manifest,
                             double train_fraction, std::uint64_t seed);

/// Within each split, subsamples over-represented classes (seeded, without
/// replacement) so the class counts are proportional to `ratios`, anchored
/// on the class with the smallest count/ratio quotient. Under-represented
/// classes are never dropped from. Classes with zero records are an error.
DatasetManifest enforce_ratio(const DatasetManifest& manifest,
                              const Vector& ratios, std::uint64_t seed);

/// Maps raw pixel values in [0, 255] to [-1, 1] via x / 127.5 - 1.
Vector scale_pixels(std::span<const int> raw);

/// K-vector with a single 1 at `label`.
Vector one_hot(int label, int num_classes);

/// Row-major H x W x C pixel grid.
struct Image {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<double> pixels;

  double at(int y, int x, int c) const {
    return pixels[static_cast<std::size_t>((y * width + x) * channels + c)];
  }
  double& at(int y, int x, int c) {
    return pixels[static_cast<std::size_t>((y * width + x) * channels + c)];
  }
};

/// Bilinear resize with corner-aligned sampling. Output values are convex
/// combinations of input values.
Image resize_image(const Image& image, int out_height = 64, int out_width = 64);

}  // namespace auxlearn
