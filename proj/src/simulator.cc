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

#include "codesign/simulator.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <random>

namespace codesign {
namespace {

enum class EventKind { kArrival, kServiceDone };

struct Event {
  double time;
  std::uint64_t seq;  // insertion order, breaks time ties
  EventKind kind;
  std::size_t stage;
  std::size_t request;
};

struct Later {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.seq > b.seq;
  }
};

struct Stage {
  std::deque<std::size_t> waiting;
  bool busy = false;
  std::size_t count = 0;  // waiting + in service
  double area = 0.0;      // integral of count over the stats window
};

double Percentile(const std::vector<double>& sorted, double q) {
  // Nearest rank.
  const auto rank = static_cast<std::size_t>(
      std::ceil(q * static_cast<double>(sorted.size())));
  return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

class PipelineSimulation {
 public:
  explicit PipelineSimulation(const SimConfig& config)
      : config_(config),
        service_(config.service.InOrder()),
        warmup_(config.Warmup()),
        rng_(config.seed),
        interarrival_(config.arrival_rate) {}

  SimReport Run() {
    Schedule(interarrival_(rng_), EventKind::kArrival, 0, 0);
    while (!events_.empty() && events_.top().time <= config_.horizon) {
      const Event e = events_.top();
      events_.pop();
      Advance(e.time);
      if (e.kind == EventKind::kArrival) {
        OnArrival(e.time);
      } else {
        OnServiceDone(e.time, e.stage, e.request);
      }
    }
    Advance(config_.horizon);
    return Summarize();
  }

 private:
  void Schedule(double time, EventKind kind, std::size_t stage,
                std::size_t request) {
    events_.push(Event{time, next_seq_++, kind, stage, request});
  }

  // Accumulates occupancy areas up to `now`, clipped to the stats window.
  void Advance(double now) {
    const double from = std::max(clock_, warmup_);
    const double to = std::min(now, config_.horizon);
    if (to > from) {
      for (Stage& s : stages_) s.area += static_cast<double>(s.count) * (to - from);
    }
    clock_ = now;
  }

  void OnArrival(double now) {
    const std::size_t id = records_.size();
    constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
    records_.push_back(RequestRecord{id, now, kNaN, kNaN, kNaN, kNaN});
    Enqueue(now, 0, id);
    Schedule(now + interarrival_(rng_), EventKind::kArrival, 0, 0);
  }

  void Enqueue(double now, std::size_t stage, std::size_t id) {
    Stage& s = stages_[stage];
    ++s.count;
    if (s.busy) {
      s.waiting.push_back(id);
    } else {
      Start(now, stage, id);
    }
  }

  void Start(double now, std::size_t stage, std::size_t id) {
    stages_[stage].busy = true;
    if (stage == 0) records_[id].start1 = now;
    Schedule(now + service_[stage], EventKind::kServiceDone, stage, id);
  }

  void OnServiceDone(double now, std::size_t stage, std::size_t id) {
    Stage& s = stages_[stage];
    --s.count;
    s.busy = false;
    if (!s.waiting.empty()) {
      const std::size_t next = s.waiting.front();
      s.waiting.pop_front();
      Start(now, stage, next);
    }
    RequestRecord& r = records_[id];
    switch (stage) {
      case 0: r.end1 = now; break;
      case 1: r.end_link = now; break;
      default: r.end2 = now; break;
    }
    if (stage + 1 < kStages) {
      Enqueue(now, stage + 1, id);
      return;
    }
    ++departures_;
    if (now >= warmup_) responses_.push_back(now - r.arrival);
  }

  SimReport Summarize() {
    SimReport report;
    report.arrivals = records_.size();
    report.departures = departures_;
    for (const Stage& s : stages_) report.in_system_at_end += s.count;

    const double window = config_.horizon - warmup_;
    for (std::size_t i = 0; i < kStages; ++i) {
      report.queue_occupancy[i] = window > 0.0 ? stages_[i].area / window : 0.0;
      report.mean_in_system += report.queue_occupancy[i];
    }

    report.completed = responses_.size();
    report.empty = responses_.empty();
    if (!report.empty) {
      report.throughput = static_cast<double>(report.completed) / window;
      std::vector<double> sorted = responses_;
      std::sort(sorted.begin(), sorted.end());
      double sum = 0.0;
      for (double r : responses_) sum += r;
      report.response_time.mean = sum / static_cast<double>(sorted.size());
      report.response_time.p50 = Percentile(sorted, 0.50);
      report.response_time.p95 = Percentile(sorted, 0.95);
      report.response_time.max = sorted.back();
    }
    if (config_.record_log) report.log = std::move(records_);
    return report;
  }

  const SimConfig& config_;
  const std::array<double, kStages> service_;
  const double warmup_;
  std::mt19937_64 rng_;
  std::exponential_distribution<double> interarrival_;

  std::priority_queue<Event, std::vector<Event>, Later> events_;
  std::uint64_t next_seq_ = 0;
  double clock_ = 0.0;
  std::array<Stage, kStages> stages_;
  std::vector<RequestRecord> records_;
  std::vector<double> responses_;
  std::size_t departures_ = 0;
};

}  // namespace

double ServiceTimes::Bottleneck() const {
  return std::max({terminal, link, edge});
}

ServiceTimes FromCost(const CostBreakdown& cost) {
  return ServiceTimes{.terminal = cost.t1, .link = cost.t3, .edge = cost.t2};
}

SimReport RunSimulation(const SimConfig& config) {
  return PipelineSimulation(config).Run();
}

ModelValidation ValidateAgainstModel(const ServiceTimes& service,
                                     const ValidationOptions& options) {
  ModelValidation v;
  const double bottleneck = service.Bottleneck();
  v.analytic = 1.0 / bottleneck;

  SimConfig config;
  config.service = service;
  config.arrival_rate = options.load_factor * v.analytic;
  config.seed = options.seed;
  // Completions after warmup (90% of the horizon) come out at the bottleneck
  // rate once the first request has crossed the pipeline.
  config.horizon =
      (static_cast<double>(options.min_completions) + 1.0) * bottleneck / 0.9 +
      service.Sum() / 0.9;
  v.report = RunSimulation(config);
  v.simulated = v.report.throughput;
  v.relative_error = std::abs(v.simulated - v.analytic) / v.analytic;
  return v;
}

ModelValidation ValidateAgainstModel(const PartitionPlan& plan,
                                     const ValidationOptions& options) {
  return ValidateAgainstModel(FromCost(plan.cost), options);
}

}  // namespace codesign
