#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "auxlearn/dataset_io.hpp"
#include "auxlearn/manifest.hpp"
#include "auxlearn/types.hpp"

namespace auxlearn {

/// A known class: a Gaussian blob clipped to [-1, 1]^dim.
struct BlobClassSpec {
  std::string name;
  Vector center;
  double stddev = 0.06;
  long count = 0;
};

/// The dispersed auxiliary class: part uniform background over [-1, 1]^dim,
/// part ring samples (random direction, Gaussian radius).
struct OthersClassSpec {
  std::string name = "others";
  long count = 0;
  double uniform_fraction = 0.3;
  double ring_radius = 0.85;
  double ring_stddev = 0.05;
};

struct SyntheticSpec {
  int feature_dim = 2;
  std::vector<BlobClassSpec> known;
  OthersClassSpec others;
};

struct SyntheticDataset {
  Dataset data;
  DatasetManifest manifest;  // split defaults to train; assign_split reassigns
};

/// Deterministically generates the synthetic corpus: known-class blobs
/// followed by the auxiliary class, with exact per-class counts. Manifest
/// records align index-for-index with the examples.
SyntheticDataset generate_synthetic_dataset(const SyntheticSpec& spec,
                                            std::uint64_t seed);

/// Evenly spaced blob centers on a circle of the given radius in the first
/// two feature dimensions (remaining dimensions zero).
std::vector<Vector> blob_circle_centers(int num_classes, int feature_dim,
                                        double radius);

}  // namespace auxlearn
