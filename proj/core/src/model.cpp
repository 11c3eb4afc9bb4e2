#include "auxlearn/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace auxlearn {

namespace {

Vector apply_activation(const Vector& z, Activation act) {
  switch (act) {
    case Activation::Relu:
      return z.cwiseMax(0.0);
    case Activation::Tanh:
      return z.array().tanh();
  }
  throw std::invalid_argument("unknown activation");
}

// Derivative of the hidden activation, expressed through the cached
// pre-activation z and post-activation a (tanh' = 1 - a^2 reuses a).
Vector activation_derivative(const Vector& z, const Vector& a, Activation act) {
  switch (act) {
    case Activation::Relu:
      return (z.array() > 0.0).cast<double>();
    case Activation::Tanh:
      return 1.0 - a.array().square();
  }
  throw std::invalid_argument("unknown activation");
}

void check_feature_dim(const MlpModel& model, const Vector& features) {
  if (features.size() != model.input_dim()) {
    throw std::invalid_argument(
        "feature dimension " + std::to_string(features.size()) +
        " does not match model input dimension " +
        std::to_string(model.input_dim()));
  }
}

Vector loss_gradient(const Vector& predicted, const Vector& target,
                     LossKind kind, const ClassWeights* class_weights,
                     const LossConfig& cfg) {
  if (kind == LossKind::Wcce) {
    if (class_weights == nullptr) {
      throw std::invalid_argument("wcce backward requires class weights");
    }
    return wcce_grad(predicted, target, *class_weights, cfg);
  }
  return cce_grad(predicted, target, cfg);
}

double loss_value(const Vector& predicted, const Vector& target, LossKind kind,
                  const ClassWeights* class_weights, const LossConfig& cfg) {
  if (kind == LossKind::Wcce) {
    if (class_weights == nullptr) {
      throw std::invalid_argument("wcce loss requires class weights");
    }
    return wcce_loss(predicted, target, *class_weights, cfg);
  }
  return cce_loss(predicted, target, cfg);
}

Gradients zero_gradients(const MlpModel& model) {
  Gradients g;
  g.weights.reserve(model.weights.size());
  g.biases.reserve(model.biases.size());
  for (int l = 0; l < model.num_layers(); ++l) {
    g.weights.push_back(Matrix::Zero(model.weights[l].rows(), model.weights[l].cols()));
    g.biases.push_back(Vector::Zero(model.biases[l].size()));
  }
  return g;
}

void accumulate(Gradients& into, const Gradients& from) {
  for (std::size_t l = 0; l < into.weights.size(); ++l) {
    into.weights[l] += from.weights[l];
    into.biases[l] += from.biases[l];
  }
}

void scale(Gradients& g, double factor) {
  for (std::size_t l = 0; l < g.weights.size(); ++l) {
    g.weights[l] *= factor;
    g.biases[l] *= factor;
  }
}

}  // namespace

MlpModel init_model(std::vector<int> layer_dims, Activation activation,
                    std::uint64_t seed) {
  if (layer_dims.size() < 2) {
    throw std::invalid_argument("init_model: need at least 2 layer dims");
  }
  for (int d : layer_dims) {
    if (d < 1) {
      throw std::invalid_argument("init_model: every layer dim must be >= 1");
    }
  }

  MlpModel model;
  model.layer_dims = std::move(layer_dims);
  model.activation = activation;

  std::mt19937_64 rng(seed);
  const int layers = static_cast<int>(model.layer_dims.size()) - 1;
  model.weights.reserve(layers);
  model.biases.reserve(layers);
  for (int l = 0; l < layers; ++l) {
    const int fan_in = model.layer_dims[l];
    const int fan_out = model.layer_dims[l + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    Matrix w(fan_in, fan_out);
    for (int i = 0; i < fan_in; ++i) {
      for (int j = 0; j < fan_out; ++j) {
        w(i, j) = dist(rng);
      }
    }
    model.weights.push_back(std::move(w));
    model.biases.push_back(Vector::Zero(fan_out));
  }
  return model;
}

ForwardCache forward_cached(const MlpModel& model, const Vector& features) {
  check_feature_dim(model, features);
  ForwardCache cache;
  cache.inputs.reserve(model.num_layers());
  cache.pre_acts.reserve(model.num_layers());

  Vector a = features;
  for (int l = 0; l < model.num_layers(); ++l) {
    cache.inputs.push_back(a);
    Vector z = model.weights[l].transpose() * a + model.biases[l];
    cache.pre_acts.push_back(z);
    if (l + 1 < model.num_layers()) {
      a = apply_activation(z, model.activation);
    } else {
      a = softmax(z);
    }
  }
  cache.prediction = std::move(a);
  return cache;
}

Vector forward(const MlpModel& model, const Vector& features) {
  return forward_cached(model, features).prediction;
}

Gradients backward(const MlpModel& model, const ForwardCache& cache,
                   const Vector& target, LossKind kind,
                   const ClassWeights* class_weights, const LossConfig& cfg) {
  const int layers = model.num_layers();
  if (static_cast<int>(cache.inputs.size()) != layers ||
      static_cast<int>(cache.pre_acts.size()) != layers) {
    throw std::invalid_argument("backward: cache does not match model depth");
  }
  if (target.size() != model.num_classes()) {
    throw std::invalid_argument("backward: target dimension mismatch");
  }

  const Vector& p = cache.prediction;
  const Vector dloss_dp = loss_gradient(p, target, kind, class_weights, cfg);

  // Through softmax: dL/dz = (diag(p) - p p^T) dL/dp.
  Vector delta = p.cwiseProduct(dloss_dp) - p * p.dot(dloss_dp);

  Gradients grads;
  grads.weights.resize(layers);
  grads.biases.resize(layers);
  for (int l = layers - 1; l >= 0; --l) {
    grads.weights[l] = cache.inputs[l] * delta.transpose();
    grads.biases[l] = delta;
    if (l > 0) {
      const Vector upstream = model.weights[l] * delta;
      const Vector deriv = activation_derivative(
          cache.pre_acts[l - 1], cache.inputs[l], model.activation);
      delta = deriv.cwiseProduct(upstream);
    }
  }
  return grads;
}

void sgd_step(MlpModel& model, const Gradients& grads, double learning_rate) {
  if (grads.weights.size() != model.weights.size() ||
      grads.biases.size() != model.biases.size()) {
    throw std::invalid_argument("sgd_step: gradient layer count mismatch");
  }
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    if (grads.weights[l].rows() != model.weights[l].rows() ||
        grads.weights[l].cols() != model.weights[l].cols() ||
        grads.biases[l].size() != model.biases[l].size()) {
      throw std::invalid_argument("sgd_step: gradient shape mismatch at layer " +
                                  std::to_string(l));
    }
    model.weights[l] -= learning_rate * grads.weights[l];
    model.biases[l] -= learning_rate * grads.biases[l];
  }
}

TrainReport train(MlpModel& model, std::span<const LabeledExample> dataset,
                  const TrainConfig& cfg) {
  if (dataset.empty()) {
    throw std::invalid_argument("train: empty dataset");
  }
  if (!(cfg.learning_rate > 0.0) || !std::isfinite(cfg.learning_rate)) {
    throw std::invalid_argument("train: learning rate must be positive");
  }
  if (cfg.epochs < 0) {
    throw std::invalid_argument("train: epochs must be >= 0");
  }
  if (cfg.batch_size < 1) {
    throw std::invalid_argument("train: batch size must be >= 1");
  }
  const int k = model.num_classes();
  if (cfg.loss_kind == LossKind::Wcce) {
    if (!cfg.class_weights.has_value()) {
      throw std::invalid_argument("train: wcce requires class weights");
    }
    if (cfg.class_weights->num_classes() != k) {
      throw std::invalid_argument("train: class weight dimension mismatch");
    }
  }
  for (const LabeledExample& ex : dataset) {
    if (ex.label < 0 || ex.label >= k) {
      throw std::invalid_argument("train: label " + std::to_string(ex.label) +
                                  " out of range [0, " + std::to_string(k) + ")");
    }
    if (ex.features.size() != model.input_dim()) {
      throw std::invalid_argument("train: feature dimension mismatch");
    }
  }

  const ClassWeights* weights =
      cfg.class_weights.has_value() ? &*cfg.class_weights : nullptr;
  const std::size_t n = dataset.size();
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainReport report;
  report.epoch_loss.reserve(cfg.epochs);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    std::size_t pos = 0;
    while (pos < n) {
      const std::size_t batch_end =
          std::min(n, pos + static_cast<std::size_t>(cfg.batch_size));
      Gradients batch_grad = zero_gradients(model);
      for (std::size_t i = pos; i < batch_end; ++i) {
        const LabeledExample& ex = dataset[order[i]];
        ForwardCache cache = forward_cached(model, ex.features);
        Vector target = Vector::Zero(k);
        target[ex.label] = 1.0;
        epoch_loss += loss_value(cache.prediction, target, cfg.loss_kind,
                                 weights, cfg.loss);
        accumulate(batch_grad,
                   backward(model, cache, target, cfg.loss_kind, weights, cfg.loss));
      }
      scale(batch_grad, 1.0 / static_cast<double>(batch_end - pos));
      sgd_step(model, batch_grad, cfg.learning_rate);
      pos = batch_end;
    }
    report.epoch_loss.push_back(epoch_loss / static_cast<double>(n));
  }
  report.epochs_run = cfg.epochs;
  return report;
}

int predict(const MlpModel& model, const Vector& features) {
  const Vector p = forward(model, features);
  int best = 0;
  for (int c = 1; c < p.size(); ++c) {
    if (p[c] > p[best]) {
      best = c;
    }
  }
  return best;
}

}  // namespace auxlearn
