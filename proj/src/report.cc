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

#include "codesign/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "codesign/error.h"

namespace codesign {
namespace {

using nlohmann::json;

constexpr std::string_view kPlanColumns =
    "cut,theta1,theta2,t1,t2,t3,t_total,dA,L,feasible1,feasible2";

std::vector<std::string> SplitComma(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    out.emplace_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double ParseDouble(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size()) {
    throw Error(ErrorCode::kSchemaMismatch, "not a number: '" + s + "'");
  }
  return v;
}

}  // namespace

std::string FormatNumber(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

json CostJson(const PartitionPlan& plan) {
  const CostBreakdown& c = plan.cost;
  return json{
      {"schema_version", kSchemaVersion},
      {"cut", plan.cut},
      {"theta1", StrategyName(plan.theta1)},
      {"theta2", StrategyName(plan.theta2)},
      {"lambda", plan.lambda},
      {"lambda_c", plan.flop_fraction},
      {"lambda_m", plan.byte_fraction},
      {"intensity1", plan.intensity_1},
      {"intensity2", plan.intensity_2},
      {"t1", c.t1},
      {"t2", c.t2},
      {"t3", c.t3},
      {"t_total", c.t_total},
      {"dA_total", c.accuracy_loss},
      {"lagrangian", c.lagrangian},
      {"feasible1", plan.feasible.first},
      {"feasible2", plan.feasible.second}};
}

std::string WritePlanCsv(const PlanCsvHeader& header,
                         std::span<const PartitionPlan> ranked) {
  std::ostringstream out;
  out << "# schema_version=" << kSchemaVersion << "\n";
  out << "# model=" << header.model << "\n";
  out << "# terminal=" << header.terminal << "\n";
  out << "# edge=" << header.edge << "\n";
  out << "# lambda1=" << FormatNumber(header.lambda1) << "\n";
  out << "# strict=" << (header.strict ? 1 : 0) << "\n";
  if (!ranked.empty()) {
    const PartitionPlan& best = ranked.front();
    out << "# best=" << best.cut << "," << StrategyName(best.theta1) << ","
        << StrategyName(best.theta2) << "\n";
  }
  if (header.refinement) {
    out << "# refined_lambda=" << FormatNumber(header.refinement->lambda) << "\n";
    out << "# refine_iterations=" << header.refinement->trace.size() - 1 << "\n";
  }
  if (header.refined_plan) {
    const PartitionPlan& p = *header.refined_plan;
    out << "# refined_plan=" << p.cut << "," << StrategyName(p.theta1) << ","
        << StrategyName(p.theta2) << "," << FormatNumber(p.cost.lagrangian)
        << "\n";
  }
  out << kPlanColumns << "\n";
  for (const PartitionPlan& p : ranked) {
    const CostBreakdown& c = p.cost;
    out << p.cut << "," << StrategyName(p.theta1) << ","
        << StrategyName(p.theta2) << "," << FormatNumber(c.t1) << ","
        << FormatNumber(c.t2) << "," << FormatNumber(c.t3) << ","
        << FormatNumber(c.t_total) << "," << FormatNumber(c.accuracy_loss)
        << "," << FormatNumber(c.lagrangian) << ","
        << (p.feasible.first ? 1 : 0) << "," << (p.feasible.second ? 1 : 0)
        << "\n";
  }
  return out.str();
}

PlanTable ParsePlanCsv(std::string_view text) {
  PlanTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  bool saw_columns = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos) continue;
      table.meta[line.substr(2, eq - 2)] = line.substr(eq + 1);
      continue;
    }
    if (!saw_columns) {
      if (line != kPlanColumns) {
        throw Error(ErrorCode::kSchemaMismatch, "unexpected plan columns: " + line);
      }
      saw_columns = true;
      continue;
    }
    const std::vector<std::string> f = SplitComma(line);
    if (f.size() != 11) {
      throw Error(ErrorCode::kSchemaMismatch, "plan row has " +
                                                  std::to_string(f.size()) +
                                                  " fields: " + line);
    }
    PlanRow row;
    row.cut = static_cast<std::size_t>(ParseDouble(f[0]));
    row.theta1 = f[1];
    row.theta2 = f[2];
    row.t1 = ParseDouble(f[3]);
    row.t2 = ParseDouble(f[4]);
    row.t3 = ParseDouble(f[5]);
    row.t_total = ParseDouble(f[6]);
    row.dA = ParseDouble(f[7]);
    row.L = ParseDouble(f[8]);
    row.feasible1 = f[9] == "1";
    row.feasible2 = f[10] == "1";
    table.rows.push_back(std::move(row));
  }
  if (!saw_columns) {
    throw Error(ErrorCode::kSchemaMismatch, "no plan table found");
  }
  const auto version = table.meta.find("schema_version");
  if (version == table.meta.end()) {
    throw Error(ErrorCode::kSchemaMismatch, "plan table has no schema_version");
  }
  table.schema_version = static_cast<int>(ParseDouble(version->second));
  return table;
}

json SimReportJson(const SimReport& r) {
  return json{
      {"throughput", r.throughput},
      {"response_time",
       {{"mean", r.response_time.mean},
        {"p50", r.response_time.p50},
        {"p95", r.response_time.p95},
        {"max", r.response_time.max}}},
      {"queue_occupancy",
       {{"terminal", r.queue_occupancy[0]},
        {"link", r.queue_occupancy[1]},
        {"edge", r.queue_occupancy[2]}}},
      {"mean_in_system", r.mean_in_system},
      {"completed", r.completed},
      {"empty", r.empty},
      {"arrivals", r.arrivals},
      {"departures", r.departures},
      {"in_system_at_end", r.in_system_at_end}};
}

std::string WriteCompletionCsv(std::span<const RequestRecord> log) {
  auto cell = [](double v) { return std::isnan(v) ? std::string() : FormatNumber(v); };
  std::ostringstream out;
  out << "id,arrival,start1,end1,end_link,end2\n";
  for (const RequestRecord& r : log) {
    out << r.id << "," << cell(r.arrival) << "," << cell(r.start1) << ","
        << cell(r.end1) << "," << cell(r.end_link) << "," << cell(r.end2)
        << "\n";
  }
  return out.str();
}

json CombineReport(const PlanTable& plan, const json& sim) {
  if (plan.schema_version != kSchemaVersion) {
    throw Error(ErrorCode::kSchemaMismatch,
                "plan schema_version " + std::to_string(plan.schema_version));
  }
  if (plan.rows.empty()) {
    throw Error(ErrorCode::kSchemaMismatch, "plan table has no candidates");
  }
  const auto meta = [&](const std::string& key) {
    const auto it = plan.meta.find(key);
    return it == plan.meta.end() ? std::string() : it->second;
  };

  const PlanRow& best = plan.rows.front();
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["model"] = meta("model");
  doc["plan"] = json{{"terminal", meta("terminal")},
                     {"edge", meta("edge")},
                     {"lambda1", ParseDouble(meta("lambda1").empty() ? "0" : meta("lambda1"))},
                     {"candidates", plan.rows.size()},
                     {"cut", best.cut},
                     {"theta1", best.theta1},
                     {"theta2", best.theta2},
                     {"t1", best.t1},
                     {"t2", best.t2},
                     {"t3", best.t3},
                     {"t_total", best.t_total},
                     {"dA_total", best.dA},
                     {"lagrangian", best.L},
                     {"feasible1", best.feasible1},
                     {"feasible2", best.feasible2}};

  const bool has_sim = sim.is_object() && sim.contains("report") &&
                       !sim.at("report").is_null();
  doc["analytical_only"] = !has_sim;
  if (!has_sim) {
    doc["simulation"] = nullptr;
    return doc;
  }
  if (!sim.contains("schema_version") ||
      sim.at("schema_version") != kSchemaVersion) {
    throw Error(ErrorCode::kSchemaMismatch, "simulation schema_version");
  }
  const std::string sim_model = sim.value("model", "");
  if (sim_model != meta("model")) {
    throw Error(ErrorCode::kSchemaMismatch,
                "plan model '" + meta("model") + "' vs simulation model '" +
                    sim_model + "'");
  }
  doc["simulation"] = sim.at("report");
  if (sim.contains("config")) doc["simulation_config"] = sim.at("config");
  if (sim.contains("plan")) doc["simulated_plan"] = sim.at("plan");
  if (sim.contains("validation")) doc["validation"] = sim.at("validation");

  const double analytic_bound = 1.0 / std::max({best.t1, best.t2, best.t3});
  doc["analytic_bottleneck_rate"] = analytic_bound;
  return doc;
}

}  // namespace codesign
