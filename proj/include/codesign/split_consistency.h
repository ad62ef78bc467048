/* Copyright 2026 The Codesign Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Gradient descent on a parameter vector split across two devices, checked
// against the unsplit model on strongly convex quadratics
//
//   L(w) = 1/2 w^T A w - b^T w,   grad L(w) = A w - b,
//
// where A is SPD with eigenvalues in [mu, L].

#ifndef CODESIGN_SPLIT_CONSISTENCY_H_
#define CODESIGN_SPLIT_CONSISTENCY_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace codesign {

struct QuadraticObjective {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  // w[0, split_index) lives on device 1, the rest on device 2.
  std::size_t split_index = 0;

  Eigen::Index dim() const { return b.size(); }
};

struct CurvatureBounds {
  double strong_convexity = 0.0;  // smallest eigenvalue of A
  double lipschitz = 0.0;         // largest eigenvalue of A
};

CurvatureBounds MeasureCurvature(const QuadraticObjective& obj);

// A = Q diag(eigs) Q^T with Q a random orthogonal matrix and eigenvalues
// drawn log-uniformly from [min_eig, max_eig]; b is standard normal.
QuadraticObjective RandomQuadratic(int dim, std::uint64_t seed,
                                   double min_eig = 0.2, double max_eig = 5.0);

double Loss(const QuadraticObjective& obj, const Eigen::VectorXd& w);
Eigen::VectorXd Minimizer(const QuadraticObjective& obj);

struct BlockGradients {
  Eigen::VectorXd first;
  Eigen::VectorXd second;
};

// Each device's partial gradient, computed row by row over its own block.
// Error(kDimensionMismatch) if w does not match the objective.
BlockGradients SplitGradient(const QuadraticObjective& obj,
                             const Eigen::VectorXd& w);

// w_n <- w_n - eta * g_n on each block independently.
Eigen::VectorXd SplitStep(const QuadraticObjective& obj,
                          const Eigen::VectorXd& w, double eta);

// min(2 / mu, 2 / L).
double MaxStepSize(const CurvatureBounds& bounds);

// -eta + mu / 2 * eta^2 < 0.
bool DescentConditionHolds(double eta, double strong_convexity);

struct RateCheck {
  CurvatureBounds bounds;
  double eta = 0.0;
  // First step k where L(w^k) - L* exceeds (1 - eta * mu / 2)^k times the
  // initial gap.
  std::optional<std::size_t> violated_at;
  std::vector<double> gaps;    // gaps[k] = L(w^k) - L*, k = 0..K
  std::vector<double> ratios;  // gaps[k + 1] / gaps[k] (0 when gaps[k] == 0)
  std::vector<double> bounds_at;  // (1 - eta mu / 2)^k * gaps[0]
};

// Runs K split steps from w0 and checks the geometric bound at every step.
// Error(kStepSizeOutOfRange) unless 0 < eta <= MaxStepSize.
RateCheck CheckRate(const QuadraticObjective& obj, const Eigen::VectorXd& w0,
                    double eta, std::size_t steps);

}  // namespace codesign

#endif  // CODESIGN_SPLIT_CONSISTENCY_H_
