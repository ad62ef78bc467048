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
#include "codesign/optimizer.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include "codesign/error.h"

namespace codesign {
namespace {

constexpr double kLambdaFloor = 1e-9;

std::vector<double> ReferencePrefix(const ModelProfile& model) {
  std::vector<double> prefix(model.num_layers() + 1, 0.0);
  for (std::size_t i = 0; i < model.num_layers(); ++i) {
    prefix[i + 1] = prefix[i] + model.layers[i].Flops(FusionStrategy::kS3SsS1);
  }
  return prefix;
}

// Fractional layer position u in [0, n] where the reference prefix reaches
// lambda * total.
double PositionOf(const std::vector<double>& prefix, double lambda) {
  const std::size_t n = prefix.size() - 1;
  const double target = std::clamp(lambda, 0.0, 1.0) * prefix[n];
  std::size_t k = 0;
  while (k + 1 < n && prefix[k + 1] < target) ++k;
  const double width = prefix[k + 1] - prefix[k];
  const double frac = std::clamp((target - prefix[k]) / width, 0.0, 1.0);
  return static_cast<double>(k) + frac;
}

double SegmentSeconds(const DeviceProfile& d, double flops, double bytes) {
  if (flops <= 0.0) return 0.0;
  return flops / EffectiveRate(d, ModelIntensity(flops, bytes));
}

}  // namespace

bool RanksBefore(const PartitionPlan& a, const PartitionPlan& b) {
  if (a.cost.lagrangian != b.cost.lagrangian) {
    return a.cost.lagrangian < b.cost.lagrangian;
  }
  if (a.cost.t_total != b.cost.t_total) return a.cost.t_total < b.cost.t_total;
  if (a.cut != b.cut) return a.cut < b.cut;
  if (a.theta1 != b.theta1) return a.theta1 < b.theta1;
  return a.theta2 < b.theta2;
}

unsigned ThreadsFromEnv() {
  const char* raw = std::getenv("CODESIGN_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;
  char* end = nullptr;
  const long v = std::strtol(raw, &end, 10);
  if (end == raw || v < 0) return 0;
  return static_cast<unsigned>(v);
}

std::vector<PartitionPlan> EnumerateCandidates(const Scenario& scenario,
                                               unsigned threads) {
  const std::size_t cuts = scenario.model.num_cuts();
  if (cuts == 0) {
    throw Error(ErrorCode::kDegenerateSplit, "model has no interior cut");
  }
  constexpr std::size_t kPerCut = kAllStrategies.size() * kAllStrategies.size();
  std::vector<PartitionPlan> out(cuts * kPerCut);

  auto fill = [&](std::size_t slot) {
    const std::size_t cut = slot / kPerCut + 1;
    const FusionStrategy t1 = kAllStrategies[(slot % kPerCut) / 4];
    const FusionStrategy t2 = kAllStrategies[slot % 4];
    out[slot] = EvaluatePlan(scenario, cut, t1, t2);
  };

  unsigned workers = threads == 0 ? std::thread::hardware_concurrency() : threads;
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(cuts)));
  if (workers == 1) {
    for (std::size_t slot = 0; slot < out.size(); ++slot) fill(slot);
    return out;
  }
  // Each worker owns a strided set of slots; the result layout does not
  // depend on scheduling.
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t slot = w; slot < out.size(); slot += workers) fill(slot);
    });
  }
  pool.clear();
  return out;
}

GridSearchResult GridSearch(const Scenario& scenario,
                            const GridSearchOptions& options) {
  std::vector<PartitionPlan> all =
      EnumerateCandidates(scenario, options.threads);
  if (options.require_feasible) {
    std::erase_if(all, [](const PartitionPlan& p) { return !p.feasible.both(); });
    if (all.empty()) {
      throw Error(ErrorCode::kNoFeasiblePlan,
                  "no cut satisfies the intensity requirement on both devices");
    }
  }
  std::sort(all.begin(), all.end(), RanksBefore);
  GridSearchResult result;
  result.best = all.front();
  result.ranked = std::move(all);
  return result;
}

double RelaxedLatency(const ModelProfile& model, FusionStrategy theta1,
                      FusionStrategy theta2, const DeviceProfile& d1,
                      const DeviceProfile& d2, const LinkProfile& link,
                      double lambda) {
  const std::size_t n = model.num_layers();
  const std::vector<double> prefix = ReferencePrefix(model);
  const double u = PositionOf(prefix, lambda);
  const std::size_t k = std::min(static_cast<std::size_t>(u), n - 1);
  const double frac = u - static_cast<double>(k);
  const LayerProfile& split = model.layers[k];

  const Load head = SegmentLoad(model, 0, k, theta1);
  const Load tail = SegmentLoad(model, k + 1, n, theta2);
  const double c1 = head.flops + frac * split.Flops(theta1);
  const double m1 = head.bytes + frac * split.Bytes(theta1);
  const double c2 = (1.0 - frac) * split.Flops(theta2) + tail.flops;
  const double m2 = (1.0 - frac) * split.Bytes(theta2) + tail.bytes;

  // Boundary b (1..n-1) ships layers[b-1]'s output; flat outside that range.
  double embedding;
  if (u <= 1.0) {
    embedding = model.layers.front().output_activation_bytes;
  } else if (u >= static_cast<double>(n - 1)) {
    embedding = model.layers[n - 2].output_activation_bytes;
  } else {
    const std::size_t lo = static_cast<std::size_t>(u);
    const double w = u - static_cast<double>(lo);
    embedding = (1.0 - w) * model.layers[lo - 1].output_activation_bytes +
                w * model.layers[lo].output_activation_bytes;
  }

  return SegmentSeconds(d1, c1, m1) + SegmentSeconds(d2, c2, m2) +
         embedding / link.bandwidth + link.fixed_latency;
}

Refinement RefineLambda(const Scenario& s, const PartitionPlan& start,
                        double step, int iterations) {
  auto objective = [&](double lambda) {
    return RelaxedLatency(s.model, start.theta1, start.theta2, s.terminal,
                          s.edge, s.link, lambda);
  };
  Refinement r;
  double lambda = start.lambda;
  r.trace.push_back({lambda, objective(lambda)});
  for (int it = 0; it < iterations; ++it) {
    const double h = kFiniteDifferenceStep;
    const double grad = (objective(lambda + h) - objective(lambda - h)) / (2 * h);
    lambda = std::clamp(lambda - step * grad, kLambdaFloor, 1.0 - kLambdaFloor);
    r.trace.push_back({lambda, objective(lambda)});
  }
  r.lambda = lambda;
  return r;
}

std::size_t SnapToBoundary(double lambda, const ModelProfile& model) {
  const std::vector<double> prefix = ReferencePrefix(model);
  const double target = lambda * prefix.back();
  std::size_t best = 1;
  double best_gap = std::abs(prefix[1] - target);
  for (std::size_t k = 2; k < model.num_layers(); ++k) {
    const double gap = std::abs(prefix[k] - target);
    if (gap < best_gap) {
      best = k;
      best_gap = gap;
    }
  }
  return best;
}

PartitionPlan SnapAndCompare(const Scenario& s, const PartitionPlan& start,
                             double lambda) {
  const std::size_t n = s.model.num_layers();
  const double u = PositionOf(ReferencePrefix(s.model), lambda);
  const auto clamp_cut = [n](double v) {
    return std::clamp<std::size_t>(static_cast<std::size_t>(v), 1, n - 1);
  };
  const std::size_t lo = clamp_cut(std::floor(u));
  const std::size_t hi = clamp_cut(std::ceil(u));
  const std::size_t snapped = SnapToBoundary(lambda, s.model);

  PartitionPlan best = EvaluatePlan(s, snapped, start.theta1, start.theta2);
  for (std::size_t cut : {lo, hi}) {
    PartitionPlan p = EvaluatePlan(s, cut, start.theta1, start.theta2);
    if (RanksBefore(p, best)) best = p;
  }
  return best;
}

}  // namespace codesign
