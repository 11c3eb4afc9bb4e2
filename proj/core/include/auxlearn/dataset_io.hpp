#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "auxlearn/types.hpp"

namespace auxlearn {

/// Feature/label table for training and evaluation.
struct Dataset {
  std::vector<LabeledExample> examples;
  std::vector<std::string> class_names;

  int num_classes() const { return static_cast<int>(class_names.size()); }
  int feature_dim() const {
    return examples.empty() ? 0 : static_cast<int>(examples[0].features.size());
  }

  /// Per-class example counts.
  std::vector<long> class_counts() const;
};

/// Delimited dataset file. The first line carries the dimensions and class
/// names, the second is the column header row:
///
///   auxlearn-dataset,dim=2,classes=3,names=cat;dog;others
///   f0,f1,label
///   -0.25,0.5,0
///
/// Feature values use shortest-round-trip formatting, so read(write(d))
/// reproduces every value bit-exactly.
std::string write_dataset_text(const Dataset& dataset);
Dataset read_dataset_text(const std::string& text);

void write_dataset(const Dataset& dataset, const std::filesystem::path& path);
Dataset read_dataset(const std::filesystem::path& path);

}  // namespace auxlearn
