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

#include "codesign/split_consistency.h"

#include <cmath>
#include <random>
#include <string>

#include "codesign/error.h"

namespace codesign {
namespace {

// Slack on the geometric bound for rounding in the gap evaluation.
constexpr double kBoundSlack = 1e-9;

// Row i of A w - b, summed over columns in index order.
double GradientRow(const QuadraticObjective& obj, const Eigen::VectorXd& w,
                   Eigen::Index i) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < w.size(); ++j) acc += obj.A(i, j) * w(j);
  return acc - obj.b(i);
}

void CheckDims(const QuadraticObjective& obj, const Eigen::VectorXd& w) {
  if (obj.A.rows() != obj.A.cols() || obj.A.rows() != obj.b.size() ||
      w.size() != obj.b.size() ||
      obj.split_index > static_cast<std::size_t>(obj.b.size())) {
    throw Error(ErrorCode::kDimensionMismatch,
                "w has " + std::to_string(w.size()) + " entries, objective has " +
                    std::to_string(obj.b.size()));
  }
}

// L(w) - L* as 1/2 (w - w*)^T A (w - w*), which avoids the cancellation of
// subtracting two nearly equal losses.
double Gap(const QuadraticObjective& obj, const Eigen::VectorXd& w,
           const Eigen::VectorXd& w_star) {
  const Eigen::VectorXd d = w - w_star;
  return 0.5 * d.dot(obj.A * d);
}

}  // namespace

CurvatureBounds MeasureCurvature(const QuadraticObjective& obj) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      obj.A, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& eig = solver.eigenvalues();
  return CurvatureBounds{.strong_convexity = eig.minCoeff(),
                         .lipschitz = eig.maxCoeff()};
}

QuadraticObjective RandomQuadratic(int dim, std::uint64_t seed, double min_eig,
                                   double max_eig) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> log_eig(std::log(min_eig),
                                                 std::log(max_eig));

  Eigen::MatrixXd g(dim, dim);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = normal(rng);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  const Eigen::MatrixXd q = qr.householderQ();

  Eigen::VectorXd eig(dim);
  for (int i = 0; i < dim; ++i) eig(i) = std::exp(log_eig(rng));

  QuadraticObjective obj;
  obj.A = q * eig.asDiagonal() * q.transpose();
  obj.A = 0.5 * (obj.A + obj.A.transpose());
  obj.b.resize(dim);
  for (int i = 0; i < dim; ++i) obj.b(i) = normal(rng);
  obj.split_index = static_cast<std::size_t>(dim / 2);
  return obj;
}

double Loss(const QuadraticObjective& obj, const Eigen::VectorXd& w) {
  return 0.5 * w.dot(obj.A * w) - obj.b.dot(w);
}

Eigen::VectorXd Minimizer(const QuadraticObjective& obj) {
  return obj.A.llt().solve(obj.b);
}

BlockGradients SplitGradient(const QuadraticObjective& obj,
                             const Eigen::VectorXd& w) {
  CheckDims(obj, w);
  const auto split = static_cast<Eigen::Index>(obj.split_index);
  BlockGradients g{Eigen::VectorXd(split), Eigen::VectorXd(w.size() - split)};
  for (Eigen::Index i = 0; i < split; ++i) g.first(i) = GradientRow(obj, w, i);
  for (Eigen::Index i = split; i < w.size(); ++i) {
    g.second(i - split) = GradientRow(obj, w, i);
  }
  return g;
}

Eigen::VectorXd SplitStep(const QuadraticObjective& obj,
                          const Eigen::VectorXd& w, double eta) {
  const BlockGradients g = SplitGradient(obj, w);
  const auto split = static_cast<Eigen::Index>(obj.split_index);
  Eigen::VectorXd next(w.size());
  for (Eigen::Index i = 0; i < split; ++i) next(i) = w(i) - eta * g.first(i);
  for (Eigen::Index i = split; i < w.size(); ++i) {
    next(i) = w(i) - eta * g.second(i - split);
  }
  return next;
}

double MaxStepSize(const CurvatureBounds& bounds) {
  return std::min(2.0 / bounds.strong_convexity, 2.0 / bounds.lipschitz);
}

bool DescentConditionHolds(double eta, double strong_convexity) {
  return -eta + 0.5 * strong_convexity * eta * eta < 0.0;
}

RateCheck CheckRate(const QuadraticObjective& obj, const Eigen::VectorXd& w0,
                    double eta, std::size_t steps) {
  CheckDims(obj, w0);
  RateCheck r;
  r.bounds = MeasureCurvature(obj);
  r.eta = eta;
  const double max_eta = MaxStepSize(r.bounds);
  if (!(eta > 0.0) || eta > max_eta) {
    throw Error(ErrorCode::kStepSizeOutOfRange,
                "eta=" + std::to_string(eta) + " outside (0, " +
                    std::to_string(max_eta) + "]");
  }

  const Eigen::VectorXd w_star = Minimizer(obj);
  const double contraction = 1.0 - 0.5 * eta * r.bounds.strong_convexity;

  Eigen::VectorXd w = w0;
  r.gaps.push_back(Gap(obj, w, w_star));
  r.bounds_at.push_back(r.gaps.front());
  double bound = r.gaps.front();
  for (std::size_t k = 1; k <= steps; ++k) {
    w = SplitStep(obj, w, eta);
    const double gap = Gap(obj, w, w_star);
    const double prev = r.gaps.back();
    r.ratios.push_back(prev > 0.0 ? gap / prev : 0.0);
    r.gaps.push_back(gap);
    bound *= contraction;
    r.bounds_at.push_back(bound);
    if (!r.violated_at && gap > bound * (1.0 + kBoundSlack)) r.violated_at = k;
  }
  return r;
}

}  // namespace codesign
