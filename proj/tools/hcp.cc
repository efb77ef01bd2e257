/* Copyright 2026 The HCP Authors. All Rights Reserved.

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

// hcp: verify, simulate, plan and scale 2D attention configurations.
//
// Exit status: 0 success, 1 verification failure, 2 bad configuration or
// usage.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif
#include <nlohmann/json.hpp>

#include "hcp/config.h"
#include "hcp/config_io.h"
#include "hcp/cost_model.h"
#include "hcp/planner.h"
#include "hcp/rank_grid.h"
#include "hcp/timeline.h"
#include "hcp/trace.h"
#include "hcp/verify.h"

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kBadConfig = 2;

struct Common {
  std::string config;
  std::string out;
  std::string format = "json";
  uint64_t seed = 42;
  std::string precision = "f64";
};

std::string Sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

void Emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << text;
  if (!f) throw std::runtime_error("write to " + path + " failed");
}

hcp::ConfigFile Load(const Common& c) {
  if (c.config.empty()) return {};
  return hcp::LoadConfigFile(c.config);
}

const hcp::ModelConfig& RequireModel(const hcp::ConfigFile& cfg) {
  if (!cfg.model) throw hcp::ConfigError("config needs a 'model' section");
  return *cfg.model;
}

const hcp::ParallelConfig& RequireParallel(const hcp::ConfigFile& cfg) {
  if (!cfg.parallel) throw hcp::ConfigError("config needs a 'parallel' section");
  return *cfg.parallel;
}

void CheckValid(const hcp::ModelConfig& m, const hcp::ParallelConfig& p,
                const hcp::ClusterConfig& c) {
  auto report = hcp::Validate(m, p, c);
  if (!report.ok()) throw hcp::ConfigError(report.ToString());
}

int RunVerify(const Common& c, std::optional<int64_t> flip) {
  const hcp::ConfigFile cfg = Load(c);
  const auto precision =
      c.precision == "f32" ? hcp::Precision::kF32 : hcp::Precision::kF64;

  std::vector<hcp::VerifyCase> cases;
  if (cfg.model && cfg.parallel) {
    CheckValid(*cfg.model, *cfg.parallel, cfg.cluster);
    for (bool causal : {true, false}) cases.push_back({*cfg.model, *cfg.parallel, causal});
  } else if (cfg.model) {
    cases = hcp::LatticeForModel(*cfg.model, cfg.cluster);
  } else {
    cases = hcp::DefaultLattice(cfg.cluster);
  }
  for (const auto& vc : cases) {
    if (vc.model.seq_len > hcp::kMaxVerifySeqLen) {
      throw hcp::ConfigError("verify needs S <= " +
                             std::to_string(hcp::kMaxVerifySeqLen));
    }
  }
  if (cases.empty()) throw hcp::ConfigError("no valid configuration to verify");

  nlohmann::json rows = nlohmann::json::array();
  std::ostringstream csv;
  csv << "config,max_abs_diff,pass\n";
  int64_t failed = 0;
  for (const auto& vc : cases) {
    std::optional<int64_t> f;
    if (flip && *flip < vc.par.sp()) f = flip;
    const auto r = hcp::RunVerifyCase(vc, cfg.cluster, c.seed, precision, f);
    if (!r.pass) ++failed;
    std::cout << (r.pass ? "ok   " : "FAIL ") << vc.Label()
              << "  max|d|=" << Sci(r.max_abs_diff) << '\n';
    rows.push_back({{"config", vc.Label()},
                    {"max_abs_diff", r.max_abs_diff},
                    {"pass", r.pass}});
    csv << vc.Label() << ',' << Sci(r.max_abs_diff) << ',' << (r.pass ? 1 : 0) << '\n';
  }
  std::cout << cases.size() - failed << '/' << cases.size() << " configs within "
            << Sci(hcp::Tolerance(precision)) << '\n';

  if (!c.out.empty()) {
    nlohmann::json report = {{"precision", c.precision},
                             {"seed", c.seed},
                             {"tolerance", hcp::Tolerance(precision)},
                             {"total", cases.size()},
                             {"failed", failed},
                             {"cases", rows}};
    Emit(c.format == "csv" ? csv.str() : report.dump(2) + "\n", c.out);
  }
  return failed == 0 ? kOk : kFailed;
}

int RunSimulate(const Common& c, const std::string& trace_path) {
  const hcp::ConfigFile cfg = Load(c);
  const auto& model = RequireModel(cfg);
  const auto& par = RequireParallel(cfg);
  CheckValid(model, par, cfg.cluster);
  const hcp::RankGrid grid = hcp::BuildRankGrid(par, cfg.cluster);
  const hcp::SimResult sim = hcp::Simulate(model, par, cfg.cluster, grid);
  const hcp::CostReport cost = hcp::Objective(model, par, cfg.cluster, grid);

  if (!trace_path.empty()) {
    hcp::WriteJsonFile(trace_path, hcp::ChromeTrace(hcp::TraceEvents(sim, grid)));
  }
  nlohmann::json summary = hcp::SummaryJson(sim);
  summary["objective"] = cost.objective;
  if (c.format == "csv") {
    std::ostringstream os;
    os << "metric,value\n";
    os << "makespan," << sim.makespan << '\n';
    os << "exposed_comm," << sim.exposed_comm << '\n';
    for (const auto& [link, busy] : sim.per_link_busy) {
      os << "busy_" << link << ',' << busy << '\n';
    }
    os << "objective," << cost.objective << '\n';
    Emit(os.str(), c.out);
  } else {
    Emit(summary.dump(2) + "\n", c.out);
  }
  return kOk;
}

int RunPlan(const Common& c, std::optional<int64_t> gpus, const std::string& key,
            const std::string& checkpoint, int64_t zero, bool simulate) {
  const hcp::ConfigFile cfg = Load(c);
  const auto& model = RequireModel(cfg);
  int64_t sp = 0;
  hcp::PlanOptions opt;
  if (gpus) {
    sp = *gpus;
  } else if (cfg.parallel) {
    sp = cfg.parallel->sp();
  } else {
    throw hcp::ConfigError("plan needs --gpus or a 'parallel' section");
  }
  if (cfg.parallel) opt.dp = cfg.parallel->dp;
  opt.key = key == "sim" ? hcp::RankKey::kSimMakespan : hcp::RankKey::kObjective;
  opt.checkpoint = checkpoint == "full"   ? hcp::CheckpointMode::kFull
                   : checkpoint == "none" ? hcp::CheckpointMode::kNone
                                          : hcp::CheckpointMode::kSelectivePlusPlus;
  opt.zero_shard_degree = zero;
  opt.simulate = simulate;
  const auto ranked = hcp::Plan(model, sp, cfg.cluster, opt);
  Emit(c.format == "csv" ? hcp::PlanCsv(ranked) : hcp::PlanJson(ranked).dump(2) + "\n",
       c.out);
  return kOk;
}

int RunScale(const Common& c, int64_t stages) {
  const hcp::ConfigFile cfg = Load(c);
  const auto& model = RequireModel(cfg);
  const int64_t dp = cfg.parallel ? cfg.parallel->dp : 1;
  const auto ulysses =
      hcp::Scalability(model, hcp::AttentionMode::kHeadParallel, stages, dp);
  const auto twod = hcp::Scalability(model, hcp::AttentionMode::kTwoD, stages, dp);
  if (c.format == "csv") {
    std::ostringstream os;
    os << "mode,max_sp,max_dp,max_gpus,pipeline_stages,dp,micro_batches,bubble_rate\n";
    for (const auto& r : {ulysses, twod}) {
      const auto j = hcp::ToJson(r);
      os << j["mode"].get<std::string>() << ',' << j["max_sp"].dump() << ','
         << r.max_dp << ',' << j["max_gpus"].dump() << ',' << r.pipeline_stages
         << ',' << r.dp << ',' << r.micro_batches << ',' << j["bubble_rate"].dump()
         << '\n';
    }
    Emit(os.str(), c.out);
  } else {
    nlohmann::json j = {{"head_parallel", hcp::ToJson(ulysses)},
                        {"2d", hcp::ToJson(twod)}};
    Emit(j.dump(2) + "\n", c.out);
  }
  return kOk;
}

void AddCommon(CLI::App* sub, Common& c, bool needs_config) {
  auto* opt = sub->add_option("--config", c.config, "JSON config file");
  if (needs_config) opt->required();
  sub->add_option("--out", c.out, "Output file (default: stdout)");
  sub->add_option("--format", c.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--seed", c.seed, "PRNG seed");
  sub->add_option("--precision", c.precision, "Arithmetic precision")
      ->check(CLI::IsMember({"f32", "f64"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D attention verification, simulation and planning"};
  app.require_subcommand(1);

  Common vc, sc, pc, kc;
  auto* verify = app.add_subcommand("verify", "Check 2D attention against the oracle");
  AddCommon(verify, vc, false);
  std::optional<int64_t> flip;
  verify->add_option("--flip-sign-rank", flip,
                     "Fault injection: negate this rank's output");

  auto* simulate = app.add_subcommand("simulate", "Simulate one layer's timeline");
  AddCommon(simulate, sc, true);
  std::string trace;
  simulate->add_option("--trace", trace, "Write a Chrome trace JSON here");

  auto* plan = app.add_subcommand("plan", "Rank configurations for a GPU count");
  AddCommon(plan, pc, true);
  std::optional<int64_t> gpus;
  std::string key = "objective";
  std::string checkpoint = "selective";
  int64_t zero = 1;
  bool with_sim = false;
  plan->add_option("--gpus", gpus, "Sequence-parallel degree d_sp")
      ->check(CLI::PositiveNumber);
  plan->add_option("--key", key, "Ranking key")->check(CLI::IsMember({"objective", "sim"}));
  plan->add_option("--checkpoint", checkpoint, "Activation checkpointing")
      ->check(CLI::IsMember({"full", "selective", "none"}));
  plan->add_option("--zero-shard", zero, "Model-state sharding degree")
      ->check(CLI::PositiveNumber);
  plan->add_flag("--simulate", with_sim, "Also report simulated makespans");

  auto* scale = app.add_subcommand("scale", "Scalability limits");
  AddCommon(scale, kc, true);
  int64_t stages = 1;
  scale->add_option("--pipeline-stages", stages, "Pipeline stages")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kBadConfig;
  }

  try {
    if (*verify) return RunVerify(vc, flip);
    if (*simulate) return RunSimulate(sc, trace);
    if (*plan) return RunPlan(pc, gpus, key, checkpoint, zero, with_sim);
    if (*scale) return RunScale(kc, stages);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadConfig;
  }
  return kBadConfig;
}
