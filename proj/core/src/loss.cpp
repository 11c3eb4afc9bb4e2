#include "auxlearn/loss.hpp"

#include <cmath>
#include <stdexcept>

namespace auxlearn {

namespace {

void check_same_size(const Vector& a, const Vector& b, const char* what) {
  if (a.size() != b.size()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
}

void check_epsilon(const LossConfig& cfg) {
  if (!(cfg.epsilon >= 0.0) || !std::isfinite(cfg.epsilon)) {
    throw std::invalid_argument("loss epsilon must be finite and >= 0");
  }
}

}  // namespace

ClassWeights compute_class_weights(const Vector& class_ratios) {
  const auto k = class_ratios.size();
  if (k < 2) {
    throw std::invalid_argument("compute_class_weights: need at least 2 classes");
  }
  for (Eigen::Index c = 0; c < k; ++c) {
    if (!(class_ratios[c] > 0.0) || !std::isfinite(class_ratios[c])) {
      throw std::invalid_argument(
          "compute_class_weights: class ratio " + std::to_string(c) +
          " must be a positive finite number");
    }
  }
  const double total = class_ratios.sum();
  ClassWeights w;
  w.positive = (total - class_ratios.array()) / total;
  w.negative = 1.0 - w.positive.array();
  return w;
}

double wcce_loss(const Vector& predicted, const Vector& target,
                 const ClassWeights& weights, const LossConfig& cfg) {
  check_same_size(predicted, target, "wcce_loss(predicted, target)");
  check_same_size(predicted, weights.positive, "wcce_loss(predicted, w_p)");
  check_same_size(predicted, weights.negative, "wcce_loss(predicted, w_n)");
  check_epsilon(cfg);
  const double eps = cfg.epsilon;
  double loss = 0.0;
  for (Eigen::Index c = 0; c < predicted.size(); ++c) {
    const double p = predicted[c];
    const double y = target[c];
    loss -= weights.positive[c] * y * std::log(p + eps) +
            weights.negative[c] * (1.0 - y) * std::log(1.0 - p + eps);
  }
  return loss;
}

double cce_loss(const Vector& predicted, const Vector& target,
                const LossConfig& cfg) {
  check_same_size(predicted, target, "cce_loss(predicted, target)");
  check_epsilon(cfg);
  const double eps = cfg.epsilon;
  double loss = 0.0;
  for (Eigen::Index c = 0; c < predicted.size(); ++c) {
    loss -= target[c] * std::log(predicted[c] + eps);
  }
  return loss;
}

Vector wcce_grad(const Vector& predicted, const Vector& target,
                 const ClassWeights& weights, const LossConfig& cfg) {
  check_same_size(predicted, target, "wcce_grad(predicted, target)");
  check_same_size(predicted, weights.positive, "wcce_grad(predicted, w_p)");
  check_same_size(predicted, weights.negative, "wcce_grad(predicted, w_n)");
  check_epsilon(cfg);
  const double eps = cfg.epsilon;
  Vector grad(predicted.size());
  for (Eigen::Index c = 0; c < predicted.size(); ++c) {
    const double p = predicted[c];
    const double y = target[c];
    grad[c] = -weights.positive[c] * y / (p + eps) +
              weights.negative[c] * (1.0 - y) / (1.0 - p + eps);
  }
  return grad;
}

Vector cce_grad(const Vector& predicted, const Vector& target,
                const LossConfig& cfg) {
  check_same_size(predicted, target, "cce_grad(predicted, target)");
  check_epsilon(cfg);
  const double eps = cfg.epsilon;
  Vector grad(predicted.size());
  for (Eigen::Index c = 0; c < predicted.size(); ++c) {
    grad[c] = -target[c] / (predicted[c] + eps);
  }
  return grad;
}

Vector softmax(const Vector& logits) {
  if (logits.size() < 2) {
    throw std::invalid_argument("softmax: need at least 2 logits");
  }
  if (!logits.allFinite()) {
    throw std::invalid_argument("softmax: non-finite logit");
  }
  const double shift = logits.maxCoeff();
  Vector p = (logits.array() - shift).exp();
  p /= p.sum();
  return p;
}

}  // namespace auxlearn
