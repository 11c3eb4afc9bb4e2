#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace auxlearn {

enum class Split { Train, Test };

std::string to_string(Split split);
Split split_from_string(const std::string& name);

struct ManifestRecord {
  std::string example_id;
  int class_label = 0;  // index into DatasetManifest::class_names
  std::optional<std::string> source_synset;
  Split split = Split::Train;
};

/// Declarative listing of dataset records with their class names, source
/// synsets, and train/test split assignment.
struct DatasetManifest {
  std::vector<ManifestRecord> records;
  std::vector<std::string> class_names;

  int num_classes() const { return static_cast<int>(class_names.size()); }

  /// Per-class record counts, optionally restricted to one split.
  std::vector<long> class_counts(std::optional<Split> split = std::nullopt) const;
};

/// Serializes the manifest as delimited text with the header row
/// "example_id,class_name,source_synset,split". Fields must not contain
/// commas or newlines. write(read(text)) reproduces the text byte-exactly.
std::string write_manifest_text(const DatasetManifest& manifest);

/// Parses manifest text. Class names are collected in order of first
/// appearance. Throws ParseError with the line number on malformed rows.
DatasetManifest read_manifest_text(const std::string& text);

void write_manifest(const DatasetManifest& manifest,
                    const std::filesystem::path& path);
DatasetManifest read_manifest(const std::filesystem::path& path);

}  // namespace auxlearn
