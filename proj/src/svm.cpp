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

#include "texdesc/svm.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace texdesc
{

Standardization Standardization::fit(const Eigen::Ref<const FeatureMatrix> & features)
{
  Standardization s;
  const auto n = static_cast<double>(features.rows());
  s.mean = features.colwise().mean().transpose();
  s.scale.resize(features.cols());
  for (Eigen::Index c = 0; c < features.cols(); ++c) {
    const double var = (features.col(c).array() - s.mean(c)).square().sum() / n;
    const double sd = std::sqrt(var);
    s.scale(c) = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

double dual_objective(const Eigen::Ref<const Eigen::MatrixXd> & gram, std::span<const int> signs,
                      const Eigen::Ref<const Eigen::VectorXd> & alpha)
{
  Eigen::VectorXd ya(alpha.size());
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    ya(i) = signs[static_cast<std::size_t>(i)] * alpha(i);
  }
  return 0.5 * ya.dot(gram * ya) - alpha.sum();
}

DualSolution solve_dual(
  const Eigen::Ref<const Eigen::MatrixXd> & gram, std::span<const int> signs, double C, double tol,
  long max_iterations)
{
  constexpr double tau = 1e-12;
  const Eigen::Index n = gram.rows();
  const auto y = [&](Eigen::Index t) { return static_cast<double>(signs[static_cast<std::size_t>(t)]); };

  DualSolution sol;
  sol.alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd & a = sol.alpha;
  Eigen::VectorXd grad = Eigen::VectorXd::Constant(n, -1.0);

  const auto in_up = [&](Eigen::Index t) { return y(t) > 0 ? a(t) < C : a(t) > 0; };
  const auto in_low = [&](Eigen::Index t) { return y(t) > 0 ? a(t) > 0 : a(t) < C; };

  for (;;) {
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    Eigen::Index i = -1;
    Eigen::Index j = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      const double v = -y(t) * grad(t);
      if (in_up(t) && v > gmax) {
        gmax = v;
        i = t;
      }
      if (in_low(t) && v < gmin) {
        gmin = v;
        j = t;
      }
    }
    sol.kkt_residual = (i < 0 || j < 0) ? 0.0 : gmax - gmin;
    if (i < 0 || j < 0 || gmax - gmin < tol) {
      sol.converged = true;
      break;
    }
    if (sol.iterations >= max_iterations) {
      break;
    }
    ++sol.iterations;

    const double qii = gram(i, i);
    const double qjj = gram(j, j);
    const double qij = y(i) * y(j) * gram(i, j);
    const double old_ai = a(i);
    const double old_aj = a(j);
    if (y(i) != y(j)) {
      double quad = qii + qjj + 2.0 * qij;
      if (quad <= 0.0) {
        quad = tau;
      }
      const double delta = (-grad(i) - grad(j)) / quad;
      const double diff = a(i) - a(j);
      a(i) += delta;
      a(j) += delta;
      if (diff > 0.0) {
        if (a(j) < 0.0) {
          a(j) = 0.0;
          a(i) = diff;
        }
      } else if (a(i) < 0.0) {
        a(i) = 0.0;
        a(j) = -diff;
      }
      if (diff > 0.0) {
        if (a(i) > C) {
          a(i) = C;
          a(j) = C - diff;
        }
      } else if (a(j) > C) {
        a(j) = C;
        a(i) = C + diff;
      }
    } else {
      double quad = qii + qjj - 2.0 * qij;
      if (quad <= 0.0) {
        quad = tau;
      }
      const double delta = (grad(i) - grad(j)) / quad;
      const double sum = a(i) + a(j);
      a(i) -= delta;
      a(j) += delta;
      if (sum > C) {
        if (a(i) > C) {
          a(i) = C;
          a(j) = sum - C;
        }
      } else if (a(j) < 0.0) {
        a(j) = 0.0;
        a(i) = sum;
      }
      if (sum > C) {
        if (a(j) > C) {
          a(j) = C;
          a(i) = sum - C;
        }
      } else if (a(i) < 0.0) {
        a(i) = 0.0;
        a(j) = sum;
      }
    }

    const double dai = a(i) - old_ai;
    const double daj = a(j) - old_aj;
    for (Eigen::Index t = 0; t < n; ++t) {
      grad(t) += y(t) * (y(i) * gram(t, i) * dai + y(j) * gram(t, j) * daj);
    }
  }

  // Offset from free vectors, else the midpoint of the feasible interval.
  double upper = std::numeric_limits<double>::infinity();
  double lower = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  long free_count = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double yg = y(t) * grad(t);
    if (a(t) >= C) {
      if (y(t) < 0) {
        upper = std::min(upper, yg);
      } else {
        lower = std::max(lower, yg);
      }
    } else if (a(t) <= 0.0) {
      if (y(t) > 0) {
        upper = std::min(upper, yg);
      } else {
        lower = std::max(lower, yg);
      }
    } else {
      ++free_count;
      free_sum += yg;
    }
  }
  double rho = 0.0;
  if (free_count > 0) {
    rho = free_sum / static_cast<double>(free_count);
  } else if (std::isfinite(upper) && std::isfinite(lower)) {
    rho = 0.5 * (upper + lower);
  } else if (std::isfinite(upper)) {
    rho = upper;
  } else if (std::isfinite(lower)) {
    rho = lower;
  }
  sol.bias = -rho;
  return sol;
}

SvmModel train_svm(const Eigen::Ref<const FeatureMatrix> & features, std::span<const int> labels,
                   const SvmParams & params)
{
  const Eigen::Index n = features.rows();
  if (static_cast<Eigen::Index>(labels.size()) != n) {
    throw ConfigError("label count does not match feature rows");
  }
  if (features.cols() == 0) {
    throw ConfigError("cannot train on zero features");
  }
  if (!features.allFinite()) {
    throw DomainError("training features contain non-finite values");
  }
  if (!(params.C > 0.0) || !(params.tol > 0.0)) {
    throw ConfigError("SVM needs C > 0 and tol > 0");
  }
  std::vector<int> signs(labels.size());
  long positives = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    signs[i] = labels[i] ? 1 : -1;
    positives += labels[i] ? 1 : 0;
  }
  if (positives == 0 || positives == n) {
    throw TrainingError("SVM training needs both classes present");
  }

  SvmModel model;
  model.kernel = params.kernel;
  if (model.kernel.type == KernelType::rbf && !(model.kernel.gamma > 0.0)) {
    model.kernel.gamma = 1.0 / static_cast<double>(features.cols());
  }
  model.C = params.C;
  model.tol = params.tol;
  model.standardization = Standardization::fit(features);

  FeatureMatrix z(n, features.cols());
  for (Eigen::Index r = 0; r < n; ++r) {
    z.row(r) = model.standardization.apply(features.row(r).transpose()).transpose();
  }
  Eigen::MatrixXd gram(n, n);
  if (model.kernel.type == KernelType::linear) {
    gram = z * z.transpose();
  } else {
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c <= r; ++c) {
        gram(r, c) = gram(c, r) = model.kernel(z.row(r).transpose(), z.row(c).transpose());
      }
    }
  }

  const DualSolution sol = solve_dual(gram, signs, params.C, params.tol, params.max_passes * n);
  model.bias = sol.bias;
  model.kkt_residual = sol.kkt_residual;
  model.iterations = sol.iterations;
  model.converged = sol.converged;

  std::vector<Eigen::Index> support;
  for (Eigen::Index t = 0; t < n; ++t) {
    if (sol.alpha(t) > 0.0) {
      support.push_back(t);
    }
  }
  model.support_vectors.resize(static_cast<Eigen::Index>(support.size()), features.cols());
  model.dual_coeffs.resize(static_cast<Eigen::Index>(support.size()));
  for (std::size_t k = 0; k < support.size(); ++k) {
    const auto t = support[k];
    model.support_vectors.row(static_cast<Eigen::Index>(k)) = z.row(t);
    model.dual_coeffs(static_cast<Eigen::Index>(k)) = sol.alpha(t) * signs[static_cast<std::size_t>(t)];
  }
  return model;
}

DecisionScore decision(const SvmModel & model, const Eigen::Ref<const Eigen::VectorXd> & x)
{
  if (x.size() != model.dimension()) {
    throw ConfigError(
      "feature vector has " + std::to_string(x.size()) + " values, model expects " +
      std::to_string(model.dimension()));
  }
  const Eigen::VectorXd z = model.standardization.apply(x);
  double raw = model.bias;
  for (Eigen::Index k = 0; k < model.support_vectors.rows(); ++k) {
    raw += model.dual_coeffs(k) * model.kernel(model.support_vectors.row(k).transpose(), z);
  }
  return {raw, raw >= 0.0};
}

}  // namespace texdesc
