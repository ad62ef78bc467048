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
// Plan search over (cut, theta1, theta2), plus the continuous partition-point
// descent used as a refinement on top of the grid.

#ifndef CODESIGN_OPTIMIZER_H_
#define CODESIGN_OPTIMIZER_H_

#include <cstddef>
#include <vector>

#include "codesign/cost_model.h"

namespace codesign {

// Strict weak order used for every argmin: smaller Lagrangian, then smaller
// t_total, then smaller cut, then theta1, then theta2 in enum order.
bool RanksBefore(const PartitionPlan& a, const PartitionPlan& b);

// Every interior cut x 4 x 4 strategies, in (cut, theta1, theta2) order.
// threads == 0 picks the hardware concurrency.
std::vector<PartitionPlan> EnumerateCandidates(const Scenario& scenario,
                                               unsigned threads = 1);

struct GridSearchOptions {
  // Treat the intensity requirements on both devices as hard constraints.
  bool require_feasible = false;
  unsigned threads = 1;
};

struct GridSearchResult {
  PartitionPlan best;
  // Candidates sorted by RanksBefore; with require_feasible only the
  // feasible ones.
  std::vector<PartitionPlan> ranked;
};

// Error(kNoFeasiblePlan) if require_feasible filters out every candidate.
GridSearchResult GridSearch(const Scenario& scenario,
                            const GridSearchOptions& options = {});

// CODESIGN_THREADS, 0 or unset meaning "auto".
unsigned ThreadsFromEnv();

// Continuous relaxation of t_total. lambda is a full-structure FLOP share;
// prefix FLOP/byte sums and the transferred activation size are linearly
// interpolated between layer boundaries.
double RelaxedLatency(const ModelProfile& model, FusionStrategy theta1,
                      FusionStrategy theta2, const DeviceProfile& d1,
                      const DeviceProfile& d2, const LinkProfile& link,
                      double lambda);

struct DescentStep {
  double lambda = 0.0;
  double t_total = 0.0;
};

struct Refinement {
  double lambda = 0.0;
  std::vector<DescentStep> trace;  // starting point first
};

inline constexpr double kFiniteDifferenceStep = 1e-6;

// Fixed-step gradient descent on RelaxedLatency starting at start.lambda with
// the start plan's strategies. Gradients are central differences with
// kFiniteDifferenceStep; iterates are clamped to the open unit interval.
Refinement RefineLambda(const Scenario& scenario, const PartitionPlan& start,
                        double step, int iterations);

// Interior boundary whose cumulative full-structure FLOP share is nearest to
// lambda; ties go to the smaller index.
std::size_t SnapToBoundary(double lambda, const ModelProfile& model);

// Evaluates the boundaries on either side of lambda with the start plan's
// strategies and keeps the better one under RanksBefore.
PartitionPlan SnapAndCompare(const Scenario& scenario,
                             const PartitionPlan& start, double lambda);

}  // namespace codesign

#endif  // CODESIGN_OPTIMIZER_H_
