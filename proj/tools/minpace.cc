// Copyright 2026 The minpace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// minpace: command-line front end.
//
//   minpace simulate --config c.json [--seed S] [--mode fluid] [--out trace.jsonl]
//   minpace fit      --config c.json [--log ticks.jsonl] [--anchor t] [--out fit.json]
//   minpace verify   {gap | exact | violation} ...
//   minpace bench    --config c.json [--out metrics.csv]
//   minpace shift    --config c.json --scenario cpa_tighten [--out metrics.csv]
//
// Results go to --out (or stdout); a JSON summary is printed on stdout.
// Failures print {"error": {"type": ..., "message": ...}} on stderr.

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "minpace/errors.hpp"
#include "minpace/experiment.hpp"
#include "minpace/predictors.hpp"
#include "minpace/serialization.hpp"
#include "minpace/theory.hpp"
#include "minpace/tick_log.hpp"

namespace {

using nlohmann::json;
using namespace minpace;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string mode;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c, bool needs_config) {
  auto* opt = cmd->add_option("--config", c.config, "JSON experiment config");
  if (needs_config) opt->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "base seed (overrides the config)");
  cmd->add_option("--mode", c.mode, "execution mode")->check(CLI::IsMember({"fluid", "stochastic"}));
  cmd->add_option("--out", c.out, "output path (default stdout)");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bench::ExperimentConfig load(const Common& c) {
  auto cfg = io::experiment_from_string(read_file(c.config));
  if (c.seed) cfg.campaign.seed = *c.seed;
  if (!c.mode.empty()) cfg.mode = market::mode_from_string(c.mode);
  bench::validate(cfg);
  return cfg;
}

// Writes through `body` to --out, or to stdout when no path was given.
void emit(const std::string& path, const std::function<void(std::ostream&)>& body) {
  if (path.empty()) {
    body(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  body(out);
  if (!out) throw std::runtime_error("write failed for " + path);
}

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

int run_simulate(const Common& c, int replication) {
  const auto cfg = load(c);
  const auto res = bench::run_replication(cfg, replication);
  emit(c.out, [&](std::ostream& os) { io::write_trace_jsonl(os, res); });
  if (!c.out.empty()) print(io::summary_json(res));
  return 0;
}

int run_fit(const Common& c, const std::string& log_path, const std::string& log_out,
            int anchor) {
  const auto cfg = load(c);
  std::vector<TickRecord> log;
  if (!log_path.empty()) {
    log = read_tick_log(std::filesystem::path(log_path));
  } else {
    const auto gt = bench::replication_ground_truth(cfg, 0);
    log = predict::exploration_log(gt, cfg.campaign.action_range,
                                   cfg.predictor.exploration_episodes, cfg.campaign.seed);
  }
  if (!log_out.empty()) write_tick_log(std::filesystem::path(log_out), log);
  Rng rng = make_rng(cfg.campaign.seed, 3);
  const auto fit = predict::fit_bundle(log, anchor, cfg.predictor.fit, rng);
  emit(c.out, [&](std::ostream& os) { os << io::to_json(fit).dump(2) << '\n'; });
  return 0;
}

int run_verify_gap(const Common& c, int instances, int depth) {
  const std::uint64_t seed = c.seed.value_or(0);
  const int grid = theory::admissible_grid_size(depth);
  json reports = json::array();
  int conclusive = 0;
  int held = 0;
  for (int i = 0; i < instances; ++i) {
    const auto inst = theory::random_gap_instance(seed + static_cast<std::uint64_t>(i), depth, grid);
    const auto rep = theory::gap_check(inst.gt, 1, inst.grid, inst.constraints, inst.tau);
    conclusive += rep.conclusive ? 1 : 0;
    held += rep.conclusive && rep.holds() ? 1 : 0;
    reports.push_back(io::to_json(rep));
  }
  emit(c.out, [&](std::ostream& os) { os << reports.dump(2) << '\n'; });
  if (!c.out.empty()) {
    print({{"instances", instances}, {"grid", grid}, {"conclusive", conclusive}, {"holds", held}});
  }
  return held == conclusive ? 0 : 3;
}

int run_verify_exact(const Common& c, int instances, int grid_n) {
  Rng rng = make_rng(c.seed.value_or(0), 5);
  json reports = json::array();
  int matched = 0;
  for (int i = 0; i < instances; ++i) {
    const auto cs = theory::random_exactness_case(rng);
    const auto rep =
        theory::exactness_check(cs.bundle, cs.constraints, cs.tau, cs.range, grid_n);
    matched += rep.match ? 1 : 0;
    reports.push_back(io::to_json(rep));
  }
  emit(c.out, [&](std::ostream& os) { os << reports.dump(2) << '\n'; });
  if (!c.out.empty()) print({{"instances", instances}, {"matched", matched}});
  return matched == instances ? 0 : 3;
}

int run_verify_violation(const Common& c, const std::vector<double>& eps,
                         const std::string& sign) {
  const auto cfg = load(c);
  const auto gt = bench::replication_ground_truth(cfg, 0);
  const auto ladder = theory::uniform_ladder(eps, predict::error_sign_from_string(sign));
  const auto rep = theory::violation_sweep(gt, cfg.campaign, ladder, cfg.mode);
  emit(c.out, [&](std::ostream& os) { io::write_violation_csv(os, rep); });
  if (!c.out.empty()) print(io::to_json(rep));
  return rep.holds() ? 0 : 3;
}

json summary_only(const bench::BenchmarkSummary& s) {
  auto j = io::to_json(s);
  j.erase("rows");
  return j;
}

int run_bench(const Common& c) {
  const auto cfg = load(c);
  const auto s = bench::run_benchmark(cfg);
  emit(c.out, [&](std::ostream& os) { io::write_benchmark_csv(os, s); });
  if (!c.out.empty()) print(summary_only(s));
  return 0;
}

int run_shift(const Common& c, const std::string& scenario) {
  const auto cfg = load(c);
  const auto shifted = bench::shift_scenario(cfg, bench::shift_from_string(scenario));
  const auto base = bench::run_benchmark(cfg);
  const auto after = bench::run_benchmark(shifted);
  emit(c.out, [&](std::ostream& os) { io::write_benchmark_csv(os, after); });
  if (!c.out.empty()) {
    print({{"scenario", scenario},
           {"base", summary_only(base)},
           {"shifted", summary_only(after)},
           {"degradation_percent", bench::degradation_percent(base.score.mean, after.score.mean)}});
  }
  return 0;
}

int fail(std::string_view type, const std::string& message, int code) {
  std::cerr << json{{"error", {{"type", type}, {"message", message}}}}.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"min-pacing auto-bidding toolkit"};
  app.require_subcommand(1);

  Common common;
  int replication = 0;
  auto* simulate = app.add_subcommand("simulate", "run one episode and write its trace");
  add_common(simulate, common, true);
  simulate->add_option("--replication", replication, "replication index")->check(CLI::NonNegativeNumber);

  std::string log_path, log_out;
  int anchor = 1;
  auto* fit = app.add_subcommand("fit", "fit a response bundle from a tick log");
  add_common(fit, common, true);
  fit->add_option("--log", log_path, "JSONL tick log (default: exploration log)")
      ->check(CLI::ExistingFile);
  fit->add_option("--log-out", log_out, "write the log used for fitting");
  fit->add_option("--anchor", anchor, "anchor tick")->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "run a theory check");
  verify->require_subcommand(1);
  int instances = 0;
  int depth = 4;
  int grid_n = 2048;
  std::vector<double> eps{0.0, 0.005, 0.01, 0.02};
  std::string sign = "adverse";
  auto* gap = verify->add_subcommand("gap", "single-alpha gap vs dispersion bound");
  add_common(gap, common, false);
  gap->add_option("--instances", instances, "random instances")->default_val(20);
  gap->add_option("--depth", depth, "ticks per instance")->check(CLI::Range(1, 8));
  auto* exact = verify->add_subcommand("exact", "min rule vs feasibility-grid argmax");
  add_common(exact, common, false);
  exact->add_option("--instances", instances, "random cases")->default_val(100);
  exact->add_option("--grid", grid_n, "grid points")->check(CLI::Range(2, 1 << 20));
  auto* violation = verify->add_subcommand("violation", "error ladder vs violation bounds");
  add_common(violation, common, true);
  violation->add_option("--eps", eps, "error ladder")->delimiter(',');
  violation->add_option("--sign", sign, "error sign pattern")
      ->check(CLI::IsMember({"inflate", "deflate", "random", "adverse"}));

  auto* bench_cmd = app.add_subcommand("bench", "score all replications");
  add_common(bench_cmd, common, true);

  std::string scenario;
  auto* shift = app.add_subcommand("shift", "benchmark under a distribution shift");
  add_common(shift, common, true);
  shift->add_option("--scenario", scenario, "shift scenario")
      ->required()
      ->check(CLI::IsMember({"competition_surge", "cpa_tighten"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }

  try {
    if (*simulate) return run_simulate(common, replication);
    if (*fit) return run_fit(common, log_path, log_out, anchor);
    if (*gap) return run_verify_gap(common, instances, depth);
    if (*exact) return run_verify_exact(common, instances, grid_n);
    if (*violation) return run_verify_violation(common, eps, sign);
    if (*bench_cmd) return run_bench(common);
    if (*shift) return run_shift(common, scenario);
  } catch (const ValidationError& e) {
    return fail("validation", e.what(), 2);
  } catch (const ParseError& e) {
    return fail("parse", e.what(), 2);
  } catch (const DomainError& e) {
    return fail("domain", e.what(), 2);
  } catch (const FitError& e) {
    return fail("fit", e.what(), 1);
  } catch (const std::exception& e) {
    return fail("runtime", e.what(), 1);
  }
  return 1;
}
