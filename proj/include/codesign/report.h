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

// Machine-readable outputs of the codesign tool: CSV for tables, JSON for
// structured reports. Every document carries schema_version = 1.

#ifndef CODESIGN_REPORT_H_
#define CODESIGN_REPORT_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "codesign/cost_model.h"
#include "codesign/optimizer.h"
#include "codesign/simulator.h"
#include "json.hpp"

namespace codesign {

inline constexpr int kSchemaVersion = 1;

// "%.10g"; bools as 0/1 are handled by callers.
std::string FormatNumber(double v);

nlohmann::json CostJson(const PartitionPlan& plan);

struct PlanCsvHeader {
  std::string model;
  std::string terminal;
  std::string edge;
  double lambda1 = 0.0;
  bool strict = false;
  std::optional<Refinement> refinement;
  std::optional<PartitionPlan> refined_plan;
};

// Comment lines ("# key=value") followed by the candidate table with columns
// cut,theta1,theta2,t1,t2,t3,t_total,dA,L,feasible1,feasible2, best first.
std::string WritePlanCsv(const PlanCsvHeader& header,
                         std::span<const PartitionPlan> ranked);

struct PlanRow {
  std::size_t cut = 0;
  std::string theta1;
  std::string theta2;
  double t1 = 0, t2 = 0, t3 = 0, t_total = 0, dA = 0, L = 0;
  bool feasible1 = false, feasible2 = false;
};

struct PlanTable {
  int schema_version = 0;
  std::map<std::string, std::string> meta;
  std::vector<PlanRow> rows;
};

// Error(kSchemaMismatch) on a malformed or foreign table.
PlanTable ParsePlanCsv(std::string_view text);

nlohmann::json SimReportJson(const SimReport& report);

// Completion log with columns id,arrival,start1,end1,end_link,end2; unfinished
// stages are left blank.
std::string WriteCompletionCsv(std::span<const RequestRecord> log);

// Merges a plan table and a simulate document. A sim document without a
// "report" section yields analytical_only = true. Error(kSchemaMismatch) on
// version or model-name disagreement.
nlohmann::json CombineReport(const PlanTable& plan, const nlohmann::json& sim);

}  // namespace codesign

#endif  // CODESIGN_REPORT_H_
