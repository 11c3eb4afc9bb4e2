#pragma once

#include "auxlearn/types.hpp"

namespace auxlearn {

/// Per-class weights for the weighted categorical cross-entropy.
/// For weights produced by compute_class_weights, negative[c] == 1 - positive[c]
/// exactly and 0 < positive[c] < 1. The loss functions themselves accept any
/// weight vectors of matching length.
struct ClassWeights {
  Vector positive;  // w_p
  Vector negative;  // w_n

  int num_classes() const { return static_cast<int>(positive.size()); }
};

/// Derives class weights from per-class ratios (or realized counts):
/// with T = sum of ratios, positive[c] = (T - ratio[c]) / T and
/// negative[c] = 1 - positive[c]. Scale-invariant in the ratios.
/// Throws std::invalid_argument for fewer than two classes or a
/// non-positive ratio.
ClassWeights compute_class_weights(const Vector& class_ratios);

struct LossConfig {
  /// Stabilizer added inside both log(p + eps) and log(1 - p + eps).
  /// Zero is permitted for exact-arithmetic checks.
  double epsilon = 1e-7;
};

enum class LossKind { Cce, Wcce };

/// Weighted categorical cross-entropy for one example:
///   sum_c -( w_p[c] * y[c] * log(p[c] + eps)
///          + w_n[c] * (1 - y[c]) * log(1 - p[c] + eps) )
/// Throws std::invalid_argument on dimension mismatch.
double wcce_loss(const Vector& predicted, const Vector& target,
                 const ClassWeights& weights, const LossConfig& cfg = {});

/// Plain categorical cross-entropy: sum_c -y[c] * log(p[c] + eps).
double cce_loss(const Vector& predicted, const Vector& target,
                const LossConfig& cfg = {});

/// Gradient of wcce_loss with respect to the prediction:
///   d/dp[c] = -w_p[c] * y[c] / (p[c] + eps)
///           +  w_n[c] * (1 - y[c]) / (1 - p[c] + eps)
Vector wcce_grad(const Vector& predicted, const Vector& target,
                 const ClassWeights& weights, const LossConfig& cfg = {});

/// Gradient of cce_loss with respect to the prediction.
Vector cce_grad(const Vector& predicted, const Vector& target,
                const LossConfig& cfg = {});

/// Numerically stable softmax (max-subtraction). Throws
/// std::invalid_argument for fewer than two logits or non-finite input.
Vector softmax(const Vector& logits);

}  // namespace auxlearn
