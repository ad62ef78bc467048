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

// Discrete-event simulation of the split pipeline
//
//   Poisson arrivals -> terminal (t1) -> link (t3) -> edge (t2) -> done
//
// Every stage is a single FIFO server with an unbounded queue and a
// deterministic service time.

#ifndef CODESIGN_SIMULATOR_H_
#define CODESIGN_SIMULATOR_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "codesign/cost_model.h"

namespace codesign {

inline constexpr std::size_t kStages = 3;  // terminal, link, edge

struct ServiceTimes {
  double terminal = 0.0;  // t1
  double link = 0.0;      // t3
  double edge = 0.0;      // t2

  double Sum() const { return terminal + link + edge; }
  double Bottleneck() const;
  std::array<double, kStages> InOrder() const { return {terminal, link, edge}; }
};

ServiceTimes FromCost(const CostBreakdown& cost);

struct SimConfig {
  double arrival_rate = 1.0;  // requests/s
  ServiceTimes service;
  double horizon = 1.0;  // simulated seconds
  std::uint64_t seed = 0;
  // Statistics ignore [0, warmup). Defaults to 10% of the horizon.
  std::optional<double> warmup;
  bool record_log = false;

  double Warmup() const { return warmup.value_or(0.1 * horizon); }
};

// Times are NaN for stages the request had not finished by the horizon.
struct RequestRecord {
  std::size_t id = 0;
  double arrival = 0.0;
  double start1 = 0.0;
  double end1 = 0.0;
  double end_link = 0.0;
  double end2 = 0.0;
};

struct ResponseTimeStats {
  double mean = 0.0;
  double p50 = 0.0;
  double p95 = 0.0;
  double max = 0.0;
};

struct SimReport {
  // Over completions inside [warmup, horizon].
  double throughput = 0.0;
  ResponseTimeStats response_time;
  std::size_t completed = 0;
  // Time-averaged number of requests at each stage (queued or in service)
  // over [warmup, horizon].
  std::array<double, kStages> queue_occupancy{};
  double mean_in_system = 0.0;
  // True when no request completed inside the window; the stats are zero.
  bool empty = true;

  // Whole-run bookkeeping: arrivals == departures + in_system_at_end.
  std::size_t arrivals = 0;
  std::size_t departures = 0;
  std::size_t in_system_at_end = 0;

  std::vector<RequestRecord> log;  // only with record_log
};

// Deterministic given config.seed.
SimReport RunSimulation(const SimConfig& config);

struct ValidationOptions {
  // Arrival rate as a multiple of the bottleneck rate.
  double load_factor = 3.0;
  // The horizon is sized so at least this many requests complete after
  // warmup.
  std::size_t min_completions = 10000;
  std::uint64_t seed = 0;
};

struct ModelValidation {
  double analytic = 0.0;   // 1 / max(t1, t2, t3)
  double simulated = 0.0;  // saturated throughput
  double relative_error = 0.0;
  SimReport report;
};

ModelValidation ValidateAgainstModel(const PartitionPlan& plan,
                                     const ValidationOptions& options = {});
ModelValidation ValidateAgainstModel(const ServiceTimes& service,
                                     const ValidationOptions& options = {});

}  // namespace codesign

#endif  // CODESIGN_SIMULATOR_H_
