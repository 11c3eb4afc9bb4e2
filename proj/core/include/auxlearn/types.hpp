#pragma once

#include <Eigen/Core>

namespace auxlearn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// One unit of training/evaluation data: a feature vector with every
/// component in [-1, 1] and an integer class label.
struct LabeledExample {
  Vector features;
  int label = 0;
};

}  // namespace auxlearn
