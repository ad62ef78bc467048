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
// Latency, accuracy-loss and Lagrangian evaluation of a candidate split.

#ifndef CODESIGN_COST_MODEL_H_
#define CODESIGN_COST_MODEL_H_

#include <cstddef>

#include "codesign/profiles.h"
#include "codesign/roofline.h"

namespace codesign {

struct CostBreakdown {
  double t1 = 0.0;       // terminal compute, s
  double t2 = 0.0;       // edge compute, s
  double t3 = 0.0;       // link transfer, s
  double t_total = 0.0;  // t1 + t2 + t3
  double accuracy_loss = 0.0;  // accuracy points
  double lagrangian = 0.0;     // t_total + lambda1 * accuracy_loss
};

struct PartitionPlan {
  std::size_t cut = 0;
  // Share of the full-structure FLOPs placed on the terminal device. This is
  // the partition point used to weight the two accuracy penalties.
  double lambda = 0.0;
  // FLOP and byte shares of sub-model 1 under the chosen strategies.
  double flop_fraction = 0.0;
  double byte_fraction = 0.0;
  double intensity_1 = 0.0;
  double intensity_2 = 0.0;
  FusionStrategy theta1 = FusionStrategy::kS3SsS1;
  FusionStrategy theta2 = FusionStrategy::kS3SsS1;
  CostBreakdown cost;
  Feasibility feasible;
};

// Everything a plan evaluation needs, held by reference.
struct Scenario {
  const ModelProfile& model;
  const DeviceProfile& terminal;
  const DeviceProfile& edge;
  const LinkProfile& link;
  const AccuracyPenaltyTable& penalties;
  double lambda1 = 0.0;
};

Scenario MakeScenario(const Config& config);
Scenario MakeScenario(const Config& config, double lambda1);

// Latency fields of a split at `cut` (layers [0, cut) on d1). Each segment
// runs at EffectiveRate of its own intensity; the link carries the cut
// layer's output activation. Error(kDegenerateSplit) unless
// 0 < cut < num_layers.
CostBreakdown Latency(const ModelProfile& model, std::size_t cut,
                      FusionStrategy theta1, FusionStrategy theta2,
                      const DeviceProfile& d1, const DeviceProfile& d2,
                      const LinkProfile& link);

// lambda * penalty(1, theta1) + (1 - lambda) * penalty(2, theta2).
double AccuracyLoss(FusionStrategy theta1, FusionStrategy theta2, double lambda,
                    const AccuracyPenaltyTable& table);

double Lagrangian(double t_total, double accuracy_loss, double lambda1);

// Cumulative full-structure FLOP share of layers [0, cut).
double PartitionFraction(const ModelProfile& model, std::size_t cut);

PartitionPlan EvaluatePlan(const Scenario& scenario, std::size_t cut,
                           FusionStrategy theta1, FusionStrategy theta2);

}  // namespace codesign

#endif  // CODESIGN_COST_MODEL_H_
