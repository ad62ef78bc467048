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
#include "codesign/cost_model.h"

#include <string>

#include "codesign/error.h"

namespace codesign {

Scenario MakeScenario(const Config& config) {
  return MakeScenario(config, config.lambda1);
}

Scenario MakeScenario(const Config& config, double lambda1) {
  return Scenario{.model = config.model,
                  .terminal = TerminalDevice(config),
                  .edge = EdgeDevice(config),
                  .link = config.link,
                  .penalties = config.penalties,
                  .lambda1 = lambda1};
}

CostBreakdown Latency(const ModelProfile& model, std::size_t cut,
                      FusionStrategy theta1, FusionStrategy theta2,
                      const DeviceProfile& d1, const DeviceProfile& d2,
                      const LinkProfile& link) {
  const std::size_t n = model.num_layers();
  if (cut == 0 || cut >= n) {
    throw Error(ErrorCode::kDegenerateSplit,
                "cut " + std::to_string(cut) + " leaves an empty segment (" +
                    std::to_string(n) + " layers)");
  }
  const Load first = SegmentLoad(model, 0, cut, theta1);
  const Load second = SegmentLoad(model, cut, n, theta2);

  CostBreakdown c;
  c.t1 = first.flops /
         EffectiveRate(d1, ModelIntensity(first.flops, first.bytes));
  c.t2 = second.flops /
         EffectiveRate(d2, ModelIntensity(second.flops, second.bytes));
  c.t3 = model.layers[cut - 1].output_activation_bytes / link.bandwidth +
         link.fixed_latency;
  c.t_total = c.t1 + c.t2 + c.t3;
  return c;
}

double AccuracyLoss(FusionStrategy theta1, FusionStrategy theta2, double lambda,
                    const AccuracyPenaltyTable& table) {
  // The selection over strategies is a one-hot pick, i.e. a table lookup.
  return lambda * table.Penalty(1, theta1) +
         (1.0 - lambda) * table.Penalty(2, theta2);
}

double Lagrangian(double t_total, double accuracy_loss, double lambda1) {
  return t_total + lambda1 * accuracy_loss;
}

double PartitionFraction(const ModelProfile& model, std::size_t cut) {
  const double head =
      SegmentLoad(model, 0, cut, FusionStrategy::kS3SsS1).flops;
  return head / TotalLoad(model, FusionStrategy::kS3SsS1).flops;
}

PartitionPlan EvaluatePlan(const Scenario& s, std::size_t cut,
                           FusionStrategy theta1, FusionStrategy theta2) {
  PartitionPlan plan;
  plan.cut = cut;
  plan.theta1 = theta1;
  plan.theta2 = theta2;
  plan.cost =
      Latency(s.model, cut, theta1, theta2, s.terminal, s.edge, s.link);
  plan.lambda = PartitionFraction(s.model, cut);
  plan.cost.accuracy_loss =
      AccuracyLoss(theta1, theta2, plan.lambda, s.penalties);
  plan.cost.lagrangian =
      Lagrangian(plan.cost.t_total, plan.cost.accuracy_loss, s.lambda1);

  const std::size_t n = s.model.num_layers();
  const Load first = SegmentLoad(s.model, 0, cut, theta1);
  const Load second = SegmentLoad(s.model, cut, n, theta2);
  plan.flop_fraction = first.flops / (first.flops + second.flops);
  plan.byte_fraction = first.bytes / (first.bytes + second.bytes);
  plan.intensity_1 = ModelIntensity(first.flops, first.bytes);
  plan.intensity_2 = ModelIntensity(second.flops, second.bytes);
  plan.feasible = CheckFeasibility(plan.intensity_1, plan.intensity_2,
                                   s.terminal, s.edge);
  return plan;
}

}  // namespace codesign
