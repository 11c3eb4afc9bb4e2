#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "auxlearn/loss.hpp"
#include "auxlearn/types.hpp"

namespace auxlearn {

enum class Activation { Relu, Tanh };

/// A small feed-forward softmax classifier. weights[l] has shape
/// (layer_dims[l] x layer_dims[l+1]); biases[l] has length layer_dims[l+1].
/// The final layer feeds softmax; hidden layers use `activation`.
struct MlpModel {
  std::vector<int> layer_dims;
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
  Activation activation = Activation::Tanh;

  int input_dim() const { return layer_dims.front(); }
  int num_classes() const { return layer_dims.back(); }
  int num_layers() const { return static_cast<int>(weights.size()); }
};

/// Deterministically initializes a model: biases zero, weights drawn
/// uniformly from +-sqrt(6 / (fan_in + fan_out)) using the given seed.
/// Throws std::invalid_argument for fewer than two layer dims or a dim < 1.
MlpModel init_model(std::vector<int> layer_dims, Activation activation,
                    std::uint64_t seed);

/// Activations recorded by forward_cached, consumed by backward.
struct ForwardCache {
  std::vector<Vector> inputs;    // inputs[l]: vector entering layer l; inputs[0] = features
  std::vector<Vector> pre_acts;  // pre_acts[l]: W_l^T inputs[l] + b_l
  Vector prediction;             // softmax of the last pre-activation
};

ForwardCache forward_cached(const MlpModel& model, const Vector& features);

/// Probability vector over the classes for one feature vector.
Vector forward(const MlpModel& model, const Vector& features);

/// Parameter gradients, mirroring MlpModel's weights/biases structure.
struct Gradients {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
};

/// Backpropagates the chosen loss through the cached forward pass of one
/// example. `class_weights` is required for LossKind::Wcce.
Gradients backward(const MlpModel& model, const ForwardCache& cache,
                   const Vector& target, LossKind kind,
                   const ClassWeights* class_weights = nullptr,
                   const LossConfig& cfg = {});

/// In-place SGD update: param -= learning_rate * grad.
void sgd_step(MlpModel& model, const Gradients& grads, double learning_rate);

struct TrainConfig {
  double learning_rate = 0.05;
  int epochs = 200;
  int batch_size = 32;
  std::uint64_t seed = 0;
  LossKind loss_kind = LossKind::Cce;
  std::optional<ClassWeights> class_weights;  // required for Wcce
  LossConfig loss;
};

struct TrainReport {
  std::vector<double> epoch_loss;  // mean per-example loss, one entry per epoch
  int epochs_run = 0;
};

/// Minibatch SGD over the dataset. Shuffling uses a generator seeded with
/// cfg.seed, so identical (model, data, config) produce identical reports
/// and parameters. Epoch losses are the means of the per-example losses
/// evaluated on the forward passes used for the updates.
TrainReport train(MlpModel& model, std::span<const LabeledExample> dataset,
                  const TrainConfig& cfg);

/// Argmax class of forward(model, features); ties break to the lowest index.
int predict(const MlpModel& model, const Vector& features);

}  // namespace auxlearn
