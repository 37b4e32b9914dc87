// Copyright 2026 The poolrank Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// poolrank: command line front end for the pool ranking pipeline.
//
//   poolrank synth --out scen
//   poolrank extract --config scen/config.json
//   poolrank train|evaluate|rank|bootstrap --config scen/config.json
//
// Flags override the configuration key of the same meaning; --set k=v
// reaches any other key by its dotted path.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "poolrank/error.hpp"
#include "poolrank/pipeline.hpp"

namespace {

using poolrank::pipeline::RunConfig;

struct ConfigFlags {
  std::string config_path;
  std::vector<std::string> sets;
  // One flag per commonly changed key; unset flags leave the config alone.
  std::vector<std::pair<std::string, std::optional<std::string>>> keyed;

  void add(CLI::App* cmd) {
    cmd->add_option("-c,--config", config_path, "Run configuration JSON");
    cmd->add_option("--set", sets, "Override any key: dotted.key=value");
    keyed = {{"paths.manifest", {}},       {"paths.stations", {}},  {"paths.transactions", {}},
             {"paths.output_dir", {}},     {"buffer.radius", {}},   {"labeling.z", {}},
             {"labeling.indicator", {}},   {"seed", {}},            {"method", {}},
             {"theta", {}},                {"alpha", {}},           {"k", {}},
             {"n_splits", {}},             {"test_fraction", {}},   {"bootstrap.n_resamples", {}},
             {"bootstrap.scaling", {}},    {"threads", {}}};
    for (auto& [key, value] : keyed) {
      std::string flag = key.substr(key.rfind('.') + 1);
      if (key == "paths.output_dir") flag = "output-dir";
      if (key == "labeling.z") flag = "z";
      for (auto& ch : flag) {
        if (ch == '_') ch = '-';
      }
      cmd->add_option("--" + flag, value, "Sets " + key);
    }
  }

  RunConfig resolve() const {
    RunConfig c = config_path.empty() ? RunConfig{} : RunConfig::load(config_path);
    for (const auto& [key, value] : keyed) {
      if (value) poolrank::pipeline::apply_override(c, key, *value);
    }
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw poolrank::InputError("--set expects key=value, got '" + s + "'");
      poolrank::pipeline::apply_override(c, s.substr(0, eq), s.substr(eq + 1));
    }
    c.validate();
    return c;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rank electric-vehicle charging pools by predicted popularity"};
  app.require_subcommand(1);

  ConfigFlags extract_flags, sweep_flags, train_flags, eval_flags, rank_flags, boot_flags;
  auto* extract = app.add_subcommand("extract", "Aggregate pools, label them and extract predictors");
  extract_flags.add(extract);
  auto* sweep = app.add_subcommand("radius-sweep", "OLS R^2 of the response per buffer radius");
  sweep_flags.add(sweep);
  auto* train = app.add_subcommand("train", "Fit the configured method(s) on all pools");
  train_flags.add(train);
  auto* evaluate = app.add_subcommand("evaluate", "Repeated stratified split evaluation");
  eval_flags.add(evaluate);
  auto* rank = app.add_subcommand("rank", "Rank pools by predicted probability");
  rank_flags.add(rank);
  auto* boot = app.add_subcommand("bootstrap", "Bootstrap coefficient stability of the l1 model");
  boot_flags.add(boot);

  auto* synth = app.add_subcommand("synth", "Write a synthetic scenario with planted ground truth");
  std::string synth_out;
  std::string preset = "reference";
  std::optional<std::uint64_t> synth_seed;
  std::optional<int> n_pools, n_planted;
  std::optional<double> noise_sd;
  synth->add_option("-o,--out", synth_out, "Scenario directory")->required();
  synth->add_option("--preset", preset, "reference or small")->check(CLI::IsMember({"reference", "small"}));
  synth->add_option("--seed", synth_seed, "Scenario seed");
  synth->add_option("--n-pools", n_pools, "Number of charging pools");
  synth->add_option("--n-planted", n_planted, "Number of planted predictors");
  synth->add_option("--noise-sd", noise_sd, "Noise added to the planted linear score");

  CLI11_PARSE(app, argc, argv);

  try {
    if (extract->parsed()) {
      const auto s = poolrank::pipeline::run_extract(extract_flags.resolve());
      std::printf("pools %zu, positives %zu, predictors %zu raw / %zu kept\n", s.n_pools, s.n_positive,
                  s.n_raw_predictors, s.n_predictors);
    } else if (sweep->parsed()) {
      const double best = poolrank::pipeline::run_radius_sweep(sweep_flags.resolve());
      std::printf("best radius %g m\n", best);
    } else if (train->parsed()) {
      poolrank::pipeline::run_train(train_flags.resolve());
    } else if (evaluate->parsed()) {
      for (const auto& r : poolrank::pipeline::run_evaluate(eval_flags.resolve())) {
        std::printf("%-6s mean AUC %.4f  theta_MCCmax %.2f  theta_Fmax %.2f\n",
                    std::string(poolrank::models::to_string(r.method)).c_str(), r.mean_auc(), r.theta_mcc_max,
                    r.theta_f_max);
      }
    } else if (rank->parsed()) {
      poolrank::pipeline::run_rank(rank_flags.resolve());
    } else if (boot->parsed()) {
      const auto r = poolrank::pipeline::run_bootstrap(boot_flags.resolve());
      std::size_t reported = 0;
      for (const auto& c : r.coefficients) reported += c.reported ? 1 : 0;
      std::printf("%zu of %zu predictors selected in >= the reporting share of resamples\n", reported,
                  r.coefficients.size());
    } else if (synth->parsed()) {
      auto spec = preset == "small" ? poolrank::synth::small_scenario() : poolrank::synth::reference_scenario();
      if (synth_seed) spec.seed = *synth_seed;
      if (n_pools) spec.n_pools = *n_pools;
      if (n_planted) spec.n_planted = *n_planted;
      if (noise_sd) spec.noise_sd = *noise_sd;
      const auto sc = poolrank::pipeline::run_synth(spec, synth_out);
      std::printf("scenario in %s: %d pools, %zu raw / %zu kept predictors, %zu planted\n", synth_out.c_str(),
                  spec.n_pools, sc.n_raw_predictors, sc.n_predictors, sc.truth.predictors.size());
    }
  } catch (const poolrank::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
