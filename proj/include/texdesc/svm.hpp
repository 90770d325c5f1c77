// Copyright 2026 The texdesc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TEXDESC__SVM_HPP_
#define TEXDESC__SVM_HPP_

#include <span>
#include <string>
#include <string_view>

#include "texdesc/types.hpp"

namespace texdesc
{

/// Binary labels: 1 marks the positive class, 0 the negative one.
using BinaryLabels = std::vector<int>;

enum class KernelType { linear, rbf };

struct Kernel
{
  KernelType type = KernelType::linear;
  /// RBF width; a non-positive value means 1 / feature_count at training.
  double gamma = 0.0;

  double operator()(const Eigen::Ref<const Eigen::VectorXd> & a, const Eigen::Ref<const Eigen::VectorXd> & b) const
  {
    if (type == KernelType::linear) {
      return a.dot(b);
    }
    return std::exp(-gamma * (a - b).squaredNorm());
  }
};

inline std::string_view to_string(KernelType type)
{
  return type == KernelType::linear ? "linear" : "rbf";
}

inline KernelType parse_kernel_type(std::string_view token)
{
  if (token == "linear") return KernelType::linear;
  if (token == "rbf") return KernelType::rbf;
  throw ParseError("unknown kernel \"" + std::string(token) + "\"");
}

struct SvmParams
{
  Kernel kernel{};
  double C = 1.0;
  double tol = 1e-3;
  /// Iteration cap, in passes of n pair updates.
  long max_passes = 10000;
};

/// Per-feature affine transform fitted on training rows. Zero-variance
/// columns keep scale 1.
struct Standardization
{
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  static Standardization fit(const Eigen::Ref<const FeatureMatrix> & features);

  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd> & x) const
  {
    return ((x - mean).array() / scale.array()).matrix();
  }
};

struct DualSolution
{
  Eigen::VectorXd alpha;
  double bias = 0.0;
  /// Maximal KKT violation m(alpha) - M(alpha) at exit.
  double kkt_residual = 0.0;
  long iterations = 0;
  bool converged = false;
};

/// Sequential minimal optimization of the soft-margin dual
///   min 1/2 a'Qa - 1'a,  0 <= a <= C,  y'a = 0,  Q_ij = y_i y_j K_ij
/// over a precomputed Gram matrix. Working pair: the maximal violating pair
/// (ties to the lowest index). `signs` holds +1/-1.
DualSolution solve_dual(
  const Eigen::Ref<const Eigen::MatrixXd> & gram, std::span<const int> signs, double C, double tol,
  long max_iterations);

/// 1/2 a'Qa - 1'a for a candidate dual vector.
double dual_objective(const Eigen::Ref<const Eigen::MatrixXd> & gram, std::span<const int> signs,
                      const Eigen::Ref<const Eigen::VectorXd> & alpha);

struct SvmModel
{
  Kernel kernel{};
  double C = 1.0;
  double tol = 1e-3;
  /// Standardized support vectors, one per row.
  FeatureMatrix support_vectors;
  /// alpha_i * y_i for each support vector.
  Eigen::VectorXd dual_coeffs;
  double bias = 0.0;
  Standardization standardization;
  double kkt_residual = 0.0;
  long iterations = 0;
  bool converged = false;

  Eigen::Index dimension() const noexcept { return standardization.mean.size(); }
};

struct DecisionScore
{
  double raw = 0.0;
  /// raw >= 0 counts as positive.
  bool positive = true;
};

SvmModel train_svm(const Eigen::Ref<const FeatureMatrix> & features, std::span<const int> labels,
                   const SvmParams & params = {});

DecisionScore decision(const SvmModel & model, const Eigen::Ref<const Eigen::VectorXd> & x);

}  // namespace texdesc

#endif  // TEXDESC__SVM_HPP_
