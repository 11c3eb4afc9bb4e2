#include "auxlearn/synthetic.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace auxlearn {

namespace {

void clip_unit(Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v[i] = std::clamp(v[i], -1.0, 1.0);
  }
}

std::string make_example_id(const std::string& class_name, long index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06ld", index);
  return class_name + "-" + buf;
}

void validate(const SyntheticSpec& spec) {
  if (spec.feature_dim < 1) {
    throw std::invalid_argument("synthetic spec: feature_dim must be >= 1");
  }
  if (spec.known.empty()) {
    throw std::invalid_argument("synthetic spec: need at least one known class");
  }
  for (const BlobClassSpec& blob : spec.known) {
    if (blob.name.empty()) {
      throw std::invalid_argument("synthetic spec: blob class needs a name");
    }
    if (blob.count < 1) {
      throw std::invalid_argument("synthetic spec: class '" + blob.name +
                                  "' needs count >= 1");
    }
    if (blob.center.size() != spec.feature_dim) {
      throw std::invalid_argument("synthetic spec: center of '" + blob.name +
                                  "' does not match feature_dim");
    }
    if (!(blob.stddev > 0.0)) {
      throw std::invalid_argument("synthetic spec: stddev of '" + blob.name +
                                  "' must be positive");
    }
  }
  if (spec.others.name.empty()) {
    throw std::invalid_argument("synthetic spec: others class needs a name");
  }
  if (spec.others.count < 1) {
    throw std::invalid_argument("synthetic spec: others count must be >= 1");
  }
  if (spec.others.uniform_fraction < 0.0 || spec.others.uniform_fraction > 1.0) {
    throw std::invalid_argument("synthetic spec: uniform_fraction must be in [0, 1]");
  }
  if (!(spec.others.ring_radius > 0.0) || !(spec.others.ring_stddev >= 0.0)) {
    throw std::invalid_argument("synthetic spec: invalid ring parameters");
  }
}

}  // namespace

SyntheticDataset generate_synthetic_dataset(const SyntheticSpec& spec,
                                            std::uint64_t seed) {
  validate(spec);

  SyntheticDataset out;
  for (const BlobClassSpec& blob : spec.known) {
    out.data.class_names.push_back(blob.name);
  }
  out.data.class_names.push_back(spec.others.name);
  out.manifest.class_names = out.data.class_names;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);

  auto push_example = [&](const std::string& class_name, int label, long index,
                          Vector features) {
    clip_unit(features);
    out.data.examples.push_back({std::move(features), label});
    ManifestRecord record;
    record.example_id = make_example_id(class_name, index);
    record.class_label = label;
    record.split = Split::Train;
    out.manifest.records.push_back(std::move(record));
  };

  for (std::size_t c = 0; c < spec.known.size(); ++c) {
    const BlobClassSpec& blob = spec.known[c];
    for (long i = 0; i < blob.count; ++i) {
      Vector x(spec.feature_dim);
      for (int d = 0; d < spec.feature_dim; ++d) {
        x[d] = blob.center[d] + blob.stddev * normal(rng);
      }
      push_example(blob.name, static_cast<int>(c), i, std::move(x));
    }
  }

  const int others_label = static_cast<int>(spec.known.size());
  const long n_uniform = std::llround(
      spec.others.uniform_fraction * static_cast<double>(spec.others.count));
  for (long i = 0; i < spec.others.count; ++i) {
    Vector x(spec.feature_dim);
    if (i < n_uniform) {
      for (int d = 0; d < spec.feature_dim; ++d) {
        x[d] = uniform(rng);
      }
    } else {
      // Random direction, Gaussian radius around the ring.
      Vector dir(spec.feature_dim);
      double norm = 0.0;
      do {
        for (int d = 0; d < spec.feature_dim; ++d) {
          dir[d] = normal(rng);
        }
        norm = dir.norm();
      } while (norm < 1e-12);
      const double radius =
          spec.others.ring_radius + spec.others.ring_stddev * normal(rng);
      x = dir * (radius / norm);
    }
    push_example(spec.others.name, others_label, i, std::move(x));
  }

  return out;
}

std::vector<Vector> blob_circle_centers(int num_classes, int feature_dim,
                                        double radius) {
  if (num_classes < 1 || feature_dim < 2) {
    throw std::invalid_argument(
        "blob_circle_centers: need >= 1 class and feature_dim >= 2");
  }
  std::vector<Vector> centers;
  centers.reserve(static_cast<std::size_t>(num_classes));
  for (int c = 0; c < num_classes; ++c) {
    const double angle = 2.0 * M_PI * c / num_classes;
    Vector center = Vector::Zero(feature_dim);
    center[0] = radius * std::cos(angle);
    center[1] = radius * std::sin(angle);
    centers.push_back(std::move(center));
  }
  return centers;
}

}  // namespace auxlearn
