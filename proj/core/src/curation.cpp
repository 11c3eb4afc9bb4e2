#include "auxlearn/curation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "auxlearn/errors.hpp"

namespace auxlearn {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// Canonical key for whole-name matching: case-folded with the token
// separators removed, so the dash-separated breed "german-shepherd" (or its
// camel-case form) equals the mapping description "German shepherd". Names
// still have to match in full; this is not a substring test.
std::string match_key(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '-' || c == ' ') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

// Rounds half away from zero, the split/ratio rounding rule.
long round_half_away(double x) { return std::llround(x); }

}  // namespace

std::vector<SynsetEntry> parse_synset_mapping(const std::string& text) {
  std::vector<SynsetEntry> entries;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto space = line.find(' ');
    if (space == std::string::npos || space == 0) {
      throw ParseError("synset mapping line " + std::to_string(line_no) +
                       ": expected '<synset_id> <descriptions>'");
    }
    SynsetEntry entry;
    entry.synset_id = line.substr(0, space);
    std::string rest = line.substr(space + 1);
    std::string::size_type start = 0;
    while (true) {
      auto comma = rest.find(',', start);
      std::string name = trim(comma == std::string::npos
                                  ? rest.substr(start)
                                  : rest.substr(start, comma - start));
      if (!name.empty()) {
        entry.names.push_back(std::move(name));
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (entry.names.empty()) {
      throw ParseError("synset mapping line " + std::to_string(line_no) +
                       ": no descriptions for '" + entry.synset_id + "'");
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::vector<SynsetEntry> read_synset_mapping(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open synset mapping: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_synset_mapping(buf.str());
}

std::string normalize_breed_name(std::string_view dash_name) {
  if (dash_name.empty()) {
    throw std::invalid_argument("normalize_breed_name: empty name");
  }
  std::string out;
  out.reserve(dash_name.size());
  bool first_token = true;
  std::size_t pos = 0;
  while (pos <= dash_name.size()) {
    auto dash = dash_name.find('-', pos);
    auto token = dash_name.substr(pos, dash == std::string_view::npos
                                           ? std::string_view::npos
                                           : dash - pos);
    if (!token.empty()) {
      std::string piece(token);
      if (first_token) {
        piece[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(piece[0])));
        first_token = false;
      } else {
        piece[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(piece[0])));
      }
      out += piece;
    }
    if (dash == std::string_view::npos) break;
    pos = dash + 1;
  }
  if (out.empty()) {
    throw std::invalid_argument("normalize_breed_name: name '" +
                                std::string(dash_name) + "' has no tokens");
  }
  return out;
}

std::vector<std::string> ExclusionList::default_cat_breed_names() {
  return {"tabby", "tiger cat", "Persian cat", "Siamese cat", "Egyptian cat"};
}

ExclusionResult build_exclusion_set(const std::vector<SynsetEntry>& entries,
                                    const ExclusionList& exclusions) {
  // (match key, name as given)
  std::vector<std::pair<std::string, std::string>> candidates;
  candidates.reserve(exclusions.dog_breed_names.size() +
                     exclusions.cat_breed_names.size());
  for (const std::string& dog : exclusions.dog_breed_names) {
    candidates.emplace_back(match_key(normalize_breed_name(dog)), dog);
  }
  for (const std::string& cat : exclusions.cat_breed_names) {
    candidates.emplace_back(match_key(cat), cat);
  }

  ExclusionResult result;
  std::vector<bool> matched(candidates.size(), false);
  for (const SynsetEntry& entry : entries) {
    for (const std::string& name : entry.names) {
      const std::string key = match_key(name);
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (candidates[i].first == key) {
          result.synset_ids.insert(entry.synset_id);
          matched[i] = true;
        }
      }
    }
  }
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!matched[i]) {
      result.unmatched_names.push_back(candidates[i].second);
    }
  }
  return result;
}

std::vector<std::string> read_exclusion_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open exclusion file: " + path.string());
  }
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string name = trim(line);
    if (name.empty() || name[0] == '#') continue;
    names.push_back(name);
  }
  return names;
}

DatasetManifest assign_split(const DatasetManifest& manifest,
                             double train_fraction, std::uint64_t seed) {
  if (manifest.records.empty()) {
    throw std::invalid_argument("assign_split: empty manifest");
  }
  if (!(train_fraction > 0.0) || !(train_fraction < 1.0)) {
    throw std::invalid_argument("assign_split: train fraction must be in (0, 1)");
  }

  const int k = manifest.num_classes();
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < manifest.records.size(); ++i) {
    const int label = manifest.records[i].class_label;
    if (label < 0 || label >= k) {
      throw std::invalid_argument("assign_split: record '" +
                                  manifest.records[i].example_id +
                                  "' has out-of-range class label");
    }
    by_class[static_cast<std::size_t>(label)].push_back(i);
  }

  DatasetManifest out = manifest;
  std::mt19937_64 rng(seed);
  for (auto& indices : by_class) {
    std::shuffle(indices.begin(), indices.end(), rng);
    const long n_train = round_half_away(
        static_cast<double>(indices.size()) * train_fraction);
    for (std::size_t j = 0; j < indices.size(); ++j) {
      out.records[indices[j]].split =
          (static_cast<long>(j) < n_train) ? Split::Train : Split::Test;
    }
  }
  return out;
}

DatasetManifest enforce_ratio(const DatasetManifest& manifest,
                              const Vector& ratios, std::uint64_t seed) {
  const int k = manifest.num_classes();
  if (ratios.size() != k) {
    throw std::invalid_argument("enforce_ratio: expected " + std::to_string(k) +
                                " ratios, got " + std::to_string(ratios.size()));
  }
  for (Eigen::Index c = 0; c < ratios.size(); ++c) {
    if (!(ratios[c] > 0.0) || !std::isfinite(ratios[c])) {
      throw std::invalid_argument("enforce_ratio: ratio for class '" +
                                  manifest.class_names[static_cast<std::size_t>(c)] +
                                  "' must be positive");
    }
  }
  const std::vector<long> overall = manifest.class_counts();
  for (int c = 0; c < k; ++c) {
    if (overall[static_cast<std::size_t>(c)] == 0) {
      throw std::invalid_argument("enforce_ratio: class '" +
                                  manifest.class_names[static_cast<std::size_t>(c)] +
                                  "' has zero records");
    }
  }

  std::vector<bool> keep(manifest.records.size(), true);
  std::mt19937_64 rng(seed);

  for (Split split : {Split::Train, Split::Test}) {
    std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < manifest.records.size(); ++i) {
      if (manifest.records[i].split != split) continue;
      by_class[static_cast<std::size_t>(manifest.records[i].class_label)].push_back(i);
    }
    const long split_total = std::accumulate(
        by_class.begin(), by_class.end(), 0L,
        [](long acc, const auto& v) { return acc + static_cast<long>(v.size()); });
    if (split_total == 0) continue;  // split not populated at all

    // Anchor on the most constraining class: smallest count/ratio quotient.
    int anchor = -1;
    double min_quotient = 0.0;
    for (int c = 0; c < k; ++c) {
      const long count = static_cast<long>(by_class[static_cast<std::size_t>(c)].size());
      if (count == 0) {
        throw std::invalid_argument("enforce_ratio: class '" +
                                    manifest.class_names[static_cast<std::size_t>(c)] +
                                    "' has zero records in the " +
                                    to_string(split) + " split");
      }
      const double quotient = static_cast<double>(count) / ratios[c];
      if (anchor < 0 || quotient < min_quotient) {
        anchor = c;
        min_quotient = quotient;
      }
    }

    for (int c = 0; c < k; ++c) {
      auto& indices = by_class[static_cast<std::size_t>(c)];
      const long count = static_cast<long>(indices.size());
      const long target =
          std::min(count, round_half_away(min_quotient * ratios[c]));
      if (target >= count) continue;
      std::shuffle(indices.begin(), indices.end(), rng);
      for (std::size_t j = static_cast<std::size_t>(target); j < indices.size(); ++j) {
        keep[indices[j]] = false;
      }
    }
  }

  DatasetManifest out;
  out.class_names = manifest.class_names;
  for (std::size_t i = 0; i < manifest.records.size(); ++i) {
    if (keep[i]) {
      out.records.push_back(manifest.records[i]);
    }
  }
  return out;
}

Vector scale_pixels(std::span<const int> raw) {
  Vector out(static_cast<Eigen::Index>(raw.size()));
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] < 0 || raw[i] > 255) {
      throw std::invalid_argument("scale_pixels: value " +
                                  std::to_string(raw[i]) +
                                  " outside [0, 255]");
    }
    out[static_cast<Eigen::Index>(i)] = static_cast<double>(raw[i]) / 127.5 - 1.0;
  }
  return out;
}

Vector one_hot(int label, int num_classes) {
  if (num_classes < 1 || label < 0 || label >= num_classes) {
    throw std::invalid_argument("one_hot: label " + std::to_string(label) +
                                " out of range [0, " +
                                std::to_string(num_classes) + ")");
  }
  Vector v = Vector::Zero(num_classes);
  v[label] = 1.0;
  return v;
}

Image resize_image(const Image& image, int out_height, int out_width) {
  if (image.height < 1 || image.width < 1 || image.channels < 1) {
    throw std::invalid_argument("resize_image: empty image");
  }
  if (image.pixels.size() != static_cast<std::size_t>(image.height) *
                                 static_cast<std::size_t>(image.width) *
                                 static_cast<std::size_t>(image.channels)) {
    throw std::invalid_argument("resize_image: pixel buffer does not match dims");
  }
  if (out_height < 1 || out_width < 1) {
    throw std::invalid_argument("resize_image: output dims must be >= 1");
  }

  Image out;
  out.height = out_height;
  out.width = out_width;
  out.channels = image.channels;
  out.pixels.resize(static_cast<std::size_t>(out_height) *
                    static_cast<std::size_t>(out_width) *
                    static_cast<std::size_t>(image.channels));

  const double sy = out_height > 1
                        ? static_cast<double>(image.height - 1) / (out_height - 1)
                        : 0.0;
  const double sx = out_width > 1
                        ? static_cast<double>(image.width - 1) / (out_width - 1)
                        : 0.0;
  for (int y = 0; y < out_height; ++y) {
    const double src_y = y * sy;
    const int y0 = static_cast<int>(std::floor(src_y));
    const int y1 = std::min(y0 + 1, image.height - 1);
    const double fy = src_y - y0;
    for (int x = 0; x < out_width; ++x) {
      const double src_x = x * sx;
      const int x0 = static_cast<int>(std::floor(src_x));
      const int x1 = std::min(x0 + 1, image.width - 1);
      const double fx = src_x - x0;
      for (int c = 0; c < image.channels; ++c) {
        const double top = (1.0 - fx) * image.at(y0, x0, c) + fx * image.at(y0, x1, c);
        const double bottom = (1.0 - fx) * image.at(y1, x0, c) + fx * image.at(y1, x1, c);
        out.at(y, x, c) = (1.0 - fy) * top + fy * bottom;
      }
    }
  }
  return out;
}

}  // namespace auxlearn
