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

// codesign: roofline matrices, plan costing and search, fusion checks, the
// convergence lab and the pipeline simulator behind one command.
//
// Exit status: 0 on success, 1 on a domain error (printed as
// "<ErrorName>: <detail>"), 2 on a usage error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "codesign/cost_model.h"
#include "codesign/error.h"
#include "codesign/optimizer.h"
#include "codesign/profiles.h"
#include "codesign/reparam.h"
#include "codesign/report.h"
#include "codesign/roofline.h"
#include "codesign/simulator.h"
#include "codesign/split_consistency.h"

namespace codesign {
namespace {

using nlohmann::json;

void Emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw Error(ErrorCode::kParseError, "cannot write " + out_path);
  out << text;
}

std::string ReadText(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Picks the terminal/edge pair from flags, falling back to the config.
void ApplyDeviceFlags(Config& config, const std::string& terminal,
                      const std::string& edge) {
  if (!terminal.empty()) config.terminal_device = terminal;
  if (!edge.empty()) config.edge_device = edge;
  TerminalDevice(config);
  EdgeDevice(config);
}

std::string RooflineCsv(const Config& config) {
  std::ostringstream out;
  out << "model,device,intensity,balance,class\n";
  std::vector<const ModelProfile*> models{&config.model};
  for (const ModelProfile& m : config.extra_models) models.push_back(&m);
  for (const ModelProfile* m : models) {
    const Load load = TotalLoad(*m, FusionStrategy::kS3SsS1);
    const double intensity = ModelIntensity(load.flops, load.bytes);
    for (const DeviceProfile& d : config.devices) {
      out << m->name << "," << d.name << "," << FormatNumber(intensity) << ","
          << FormatNumber(MachineBalance(d)) << ","
          << BoundTag(Classify(intensity, d)) << "\n";
    }
  }
  return out.str();
}

std::string FuseCheckCsv(std::uint64_t seed, int trials) {
  std::ostringstream out;
  out << "strategy,trials,max_rel_error\n";
  for (const FuseCheckResult& r : RunFuseCheck(seed, trials)) {
    char err[32];
    std::snprintf(err, sizeof(err), "%.3e", r.max_relative_error);
    out << StrategyName(r.strategy) << "," << r.trials << "," << err << "\n";
  }
  return out.str();
}

std::string ConvergenceCsv(std::uint64_t seed, int dim, std::size_t steps,
                           std::optional<double> eta_flag) {
  const QuadraticObjective obj = RandomQuadratic(dim, seed);
  const CurvatureBounds bounds = MeasureCurvature(obj);
  const double eta = eta_flag.value_or(0.9 * MaxStepSize(bounds) *
                                       bounds.strong_convexity /
                                       bounds.lipschitz);
  const Eigen::VectorXd w0 = Eigen::VectorXd::Zero(dim);
  const RateCheck check = CheckRate(obj, w0, eta, steps);

  std::ostringstream out;
  out << "# schema_version=" << kSchemaVersion << "\n";
  out << "# mu=" << FormatNumber(bounds.strong_convexity) << "\n";
  out << "# L=" << FormatNumber(bounds.lipschitz) << "\n";
  out << "# eta=" << FormatNumber(eta) << "\n";
  out << "# violated_at="
      << (check.violated_at ? std::to_string(*check.violated_at) : "none")
      << "\n";
  out << "step,gap,bound,ratio,within_bound\n";
  for (std::size_t k = 0; k < check.gaps.size(); ++k) {
    char gap[32], bound[32];
    std::snprintf(gap, sizeof(gap), "%.6e", check.gaps[k]);
    std::snprintf(bound, sizeof(bound), "%.6e", check.bounds_at[k]);
    out << k << "," << gap << "," << bound << ","
        << (k == 0 ? std::string() : FormatNumber(check.ratios[k - 1])) << ","
        << (check.gaps[k] <= check.bounds_at[k] * (1.0 + 1e-9) ? 1 : 0) << "\n";
  }
  return out.str();
}

}  // namespace
}  // namespace codesign

int main(int argc, char** argv) {
  using namespace codesign;

  CLI::App app{"Partition-point and fusion-strategy co-design planner"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string terminal, edge;

  // roofline
  auto* roofline = app.add_subcommand(
      "roofline", "CC/MC matrix of every model against every device (CSV)");
  roofline->add_option("--config", config_path, "Config file")->required();
  roofline->add_option("--out", out_path, "Write output here instead of stdout");

  // cost
  std::size_t cut = 0;
  std::string theta1_name, theta2_name;
  std::optional<double> lambda1_flag;
  auto* cost = app.add_subcommand("cost", "Cost breakdown of one plan (JSON)");
  cost->add_option("--config", config_path, "Config file")->required();
  cost->add_option("--cut", cut, "Cut after this many layers")->required();
  cost->add_option("--theta1", theta1_name, "Strategy of sub-model 1")->required();
  cost->add_option("--theta2", theta2_name, "Strategy of sub-model 2")->required();
  cost->add_option("--lambda1", lambda1_flag, "Override the config lambda1");
  cost->add_option("--terminal", terminal, "Device hosting sub-model 1");
  cost->add_option("--edge", edge, "Device hosting sub-model 2");
  cost->add_option("--out", out_path, "Write output here instead of stdout");

  // plan
  bool strict = false;
  bool refine = false;
  double alpha = 1e-3;
  int iterations = 500;
  auto* plan = app.add_subcommand(
      "plan", "Grid search over cut x theta1 x theta2 (ranked CSV)");
  plan->add_option("--config", config_path, "Config file")->required();
  plan->add_flag("--strict", strict,
                 "Only accept plans meeting the intensity requirement on both "
                 "devices");
  plan->add_flag("--refine", refine,
                 "Run partition-point descent from the best plan and compare "
                 "the neighbouring cuts");
  plan->add_option("--alpha", alpha, "Descent step size for --refine")
      ->check(CLI::NonNegativeNumber);
  plan->add_option("--iters", iterations, "Descent iterations for --refine")
      ->check(CLI::NonNegativeNumber);
  plan->add_option("--lambda1", lambda1_flag, "Override the config lambda1");
  plan->add_option("--terminal", terminal, "Device hosting sub-model 1");
  plan->add_option("--edge", edge, "Device hosting sub-model 2");
  plan->add_option("--out", out_path, "Write output here instead of stdout");

  // fuse-check
  std::uint64_t seed = 0;
  int trials = 100;
  auto* fuse = app.add_subcommand(
      "fuse-check", "Randomized fused-kernel vs branch-sum equivalence (CSV)");
  fuse->add_option("--seed", seed, "RNG seed")->required();
  fuse->add_option("--trials", trials, "Trials per strategy")
      ->check(CLI::PositiveNumber);
  fuse->add_option("--out", out_path, "Write output here instead of stdout");

  // convergence-lab
  int dim = 16;
  std::size_t steps = 500;
  std::optional<double> eta_flag;
  auto* lab = app.add_subcommand(
      "convergence-lab",
      "Split gradient descent on a random SPD quadratic vs the geometric "
      "bound (CSV)");
  lab->add_option("--seed", seed, "RNG seed")->required();
  lab->add_option("--dim", dim, "Dimension")->required()->check(CLI::Range(2, 4096));
  lab->add_option("--steps", steps, "Steps")->required();
  lab->add_option("--eta", eta_flag,
                  "Step size (default 0.9 * min(2/mu, 2/L) * mu/L)");
  lab->add_option("--out", out_path, "Write output here instead of stdout");

  // simulate
  double rate = 0.0;
  double horizon = 0.0;
  std::optional<double> warmup;
  std::optional<std::size_t> sim_cut;
  std::string completions_path;
  bool validate = false;
  auto* simulate = app.add_subcommand(
      "simulate", "Discrete-event simulation of the split pipeline (JSON)");
  simulate->add_option("--config", config_path, "Config file")->required();
  simulate->add_option("--rate", rate, "Arrival rate, requests/s")
      ->required()->check(CLI::PositiveNumber);
  simulate->add_option("--horizon", horizon, "Simulated seconds")
      ->required()->check(CLI::PositiveNumber);
  simulate->add_option("--seed", seed, "RNG seed")->required();
  simulate->add_option("--warmup", warmup,
                       "Seconds excluded from statistics (default 10% of "
                       "horizon)")->check(CLI::NonNegativeNumber);
  simulate->add_option("--cut", sim_cut,
                       "Simulate this cut instead of the grid-search winner");
  simulate->add_option("--theta1", theta1_name, "Strategy of sub-model 1 with --cut");
  simulate->add_option("--theta2", theta2_name, "Strategy of sub-model 2 with --cut");
  simulate->add_option("--lambda1", lambda1_flag, "Override the config lambda1");
  simulate->add_option("--terminal", terminal, "Device hosting sub-model 1");
  simulate->add_option("--edge", edge, "Device hosting sub-model 2");
  simulate->add_option("--completions", completions_path,
                       "Also write the per-request completion CSV here");
  simulate->add_flag("--validate", validate,
                     "Add a saturated run comparing throughput with "
                     "1/max(t1,t2,t3)");
  simulate->add_option("--out", out_path, "Write output here instead of stdout");

  // report
  std::string plan_path, sim_path;
  auto* report = app.add_subcommand(
      "report", "Merge a plan CSV and a simulate JSON into one document");
  report->add_option("--plan", plan_path, "Output of `codesign plan`")->required();
  report->add_option("--sim", sim_path, "Output of `codesign simulate`");
  report->add_option("--out", out_path, "Write output here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*roofline) {
      Emit(RooflineCsv(LoadConfig(config_path)), out_path);
    } else if (*cost) {
      Config config = LoadConfig(config_path);
      ApplyDeviceFlags(config, terminal, edge);
      const Scenario scenario =
          MakeScenario(config, lambda1_flag.value_or(config.lambda1));
      const PartitionPlan p = EvaluatePlan(scenario, cut,
                                           ParseStrategy(theta1_name),
                                           ParseStrategy(theta2_name));
      Emit(CostJson(p).dump(2) + "\n", out_path);
    } else if (*plan) {
      Config config = LoadConfig(config_path);
      ApplyDeviceFlags(config, terminal, edge);
      const Scenario scenario =
          MakeScenario(config, lambda1_flag.value_or(config.lambda1));
      const GridSearchResult result = GridSearch(
          scenario, {.require_feasible = strict, .threads = ThreadsFromEnv()});
      PlanCsvHeader header;
      header.model = config.model.name;
      header.terminal = scenario.terminal.name;
      header.edge = scenario.edge.name;
      header.lambda1 = scenario.lambda1;
      header.strict = strict;
      if (refine) {
        header.refinement = RefineLambda(scenario, result.best, alpha, iterations);
        header.refined_plan =
            SnapAndCompare(scenario, result.best, header.refinement->lambda);
      }
      Emit(WritePlanCsv(header, result.ranked), out_path);
    } else if (*fuse) {
      Emit(FuseCheckCsv(seed, trials), out_path);
    } else if (*lab) {
      Emit(ConvergenceCsv(seed, dim, steps, eta_flag), out_path);
    } else if (*simulate) {
      Config config = LoadConfig(config_path);
      ApplyDeviceFlags(config, terminal, edge);
      const Scenario scenario =
          MakeScenario(config, lambda1_flag.value_or(config.lambda1));
      const PartitionPlan p =
          sim_cut ? EvaluatePlan(scenario, *sim_cut,
                                 ParseStrategy(theta1_name.empty() ? "S3_Ss_S1" : theta1_name),
                                 ParseStrategy(theta2_name.empty() ? "S3_Ss_S1" : theta2_name))
                  : GridSearch(scenario, {.threads = ThreadsFromEnv()}).best;
      SimConfig sim{.arrival_rate = rate,
                    .service = FromCost(p.cost),
                    .horizon = horizon,
                    .seed = seed,
                    .warmup = warmup,
                    .record_log = !completions_path.empty()};
      const SimReport r = RunSimulation(sim);

      json doc;
      doc["schema_version"] = kSchemaVersion;
      doc["model"] = config.model.name;
      doc["plan"] = {{"cut", p.cut},
                     {"theta1", StrategyName(p.theta1)},
                     {"theta2", StrategyName(p.theta2)}};
      doc["service_times"] = {{"t1", p.cost.t1}, {"t3", p.cost.t3}, {"t2", p.cost.t2}};
      doc["config"] = {{"arrival_rate", rate},
                       {"horizon", horizon},
                       {"warmup", sim.Warmup()},
                       {"seed", seed},
                       {"queue_policy", "FIFO"}};
      doc["report"] = SimReportJson(r);
      if (validate) {
        const ModelValidation v = ValidateAgainstModel(p, {.seed = seed});
        doc["validation"] = {{"analytic_bottleneck", v.analytic},
                             {"simulated", v.simulated},
                             {"rel_err", v.relative_error}};
      }
      if (!completions_path.empty()) {
        Emit(WriteCompletionCsv(r.log), completions_path);
      }
      Emit(doc.dump(2) + "\n", out_path);
    } else if (*report) {
      const PlanTable table = ParsePlanCsv(ReadText(plan_path));
      json sim = json::object();
      if (!sim_path.empty()) {
        const std::string text = ReadText(sim_path);
        if (text.find_first_not_of(" \t\r\n") != std::string::npos) {
          try {
            sim = json::parse(text);
          } catch (const json::parse_error& e) {
            throw Error(ErrorCode::kSchemaMismatch, sim_path + ": " + e.what());
          }
        }
      }
      Emit(CombineReport(table, sim).dump(2) + "\n", out_path);
    }
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "ParseError: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
