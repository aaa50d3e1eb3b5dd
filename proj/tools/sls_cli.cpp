// sls: synthesis of secure control policies for stochastic games under LTL.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sls/commands.hpp"

namespace {

using command_fn = sls::command_output (*)(const sls::run_config&);

void add_common(CLI::App* cmd, sls::run_config& cfg, std::string& out_dir) {
  cmd->add_option("--out", out_dir, "Output directory")->default_val(".");
  cmd->add_option("--seed", cfg.seed, "Random seed");
}

void add_inputs(CLI::App* cmd, sls::run_config& cfg) {
  cmd->add_option("--game", cfg.game, "Game file (sg v1)");
  cmd->add_option("--dra", cfg.dra, "Automaton file (dra v1)");
}

void add_solver(CLI::App* cmd, sls::run_config& cfg) {
  cmd->add_option("--delta", cfg.delta, "Value-iteration stopping tolerance");
  cmd->add_option("--epsilon", cfg.epsilon, "Use the epsilon-relaxed update with this epsilon");
}

void add_cost(CLI::App* cmd, sls::run_config& cfg) {
  cmd->add_option("--psi", cfg.psi, "Invariant constraint G(propositional formula)");
  cmd->add_option("--alpha", cfg.alpha, "Cost per violation");
}

void add_simulation(CLI::App* cmd, sls::run_config& cfg, std::string& mode) {
  cmd->add_option("--runs", cfg.runs, "Simulated runs");
  cmd->add_option("--horizon", cfg.horizon, "Steps per run");
  cmd->add_option("--scoring", mode, "Run verdict: gamec or lasso")->check(CLI::IsMember({"gamec", "lasso"}));
}

int write_outputs(const sls::command_output& out, const std::string& dir) {
  for (const auto& w : out.warnings) std::cerr << "warning: " << w << '\n';
  if (!out.files.empty()) {
    std::filesystem::create_directories(dir);
    for (const auto& [name, contents] : out.files) sls::text::write_file((std::filesystem::path(dir) / name).string(), contents);
  }
  std::cout << out.report;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secure policy synthesis for concurrent stochastic games under LTL"};
  app.require_subcommand(1);
  sls::run_config cfg;
  std::string out_dir = ".", mode = "gamec", starts;
  command_fn run = nullptr;

  auto* max_prob = app.add_subcommand("synthesize-max-prob", "Maximize the worst-case satisfaction probability");
  add_inputs(max_prob, cfg);
  add_solver(max_prob, cfg);
  add_common(max_prob, cfg, out_dir);
  max_prob->callback([&] { run = sls::cmd_synthesize_max_prob; });

  auto* min_viol = app.add_subcommand("synthesize-min-violation", "Minimize the violation cost per cycle");
  add_inputs(min_viol, cfg);
  add_solver(min_viol, cfg);
  add_cost(min_viol, cfg);
  add_common(min_viol, cfg, out_dir);
  min_viol->callback([&] { run = sls::cmd_synthesize_min_violation; });

  auto* compare = app.add_subcommand("compare", "Secure policy against the adversary-oblivious baseline");
  add_inputs(compare, cfg);
  add_solver(compare, cfg);
  add_cost(compare, cfg);
  add_simulation(compare, cfg, mode);
  add_common(compare, cfg, out_dir);
  compare->add_option("--policy", cfg.policy, "Secure policy file (default: synthesized)");
  compare->add_option("--baseline-policy", cfg.baseline_policy, "Baseline policy file (default: synthesized)");
  compare->add_option("--starts", starts, "Comma-separated start states (default: all)");
  compare->callback([&] { run = sls::cmd_compare; });

  auto* gen = app.add_subcommand("gen-gridworld", "Abstract the UAV grid world into a game file");
  gen->add_option("--map", cfg.map, "Grid-world configuration (gridworld v1)");
  gen->add_option("--grid-n", cfg.grid_n, "Grid size n");
  gen->add_option("--samples-K", cfg.samples_k, "Samples per (cell, u_C, u_A)");
  add_common(gen, cfg, out_dir);
  gen->callback([&] { run = sls::cmd_gen_gridworld; });

  auto* sim = app.add_subcommand("simulate", "Sample runs of a product policy");
  add_inputs(sim, cfg);
  add_cost(sim, cfg);
  add_simulation(sim, cfg, mode);
  add_common(sim, cfg, out_dir);
  sim->add_option("--policy", cfg.policy, "Controller policy on the product");
  sim->add_option("--adversary-policy", cfg.adversary_policy, "Adversary policy (default: best response)");
  sim->add_option("--ltl", cfg.ltl, "Score runs with this formula instead of the automaton");
  sim->add_option("--trajectories", cfg.trajectories, "Runs recorded in trajectories.csv");
  sim->callback([&] { run = sls::cmd_simulate; });

  auto* val = app.add_subcommand("validate", "Parse inputs and report their shape");
  add_inputs(val, cfg);
  val->add_option("--ltl", cfg.ltl, "LTL formula");
  val->add_option("--psi", cfg.psi, "Invariant constraint");
  val->add_option("--map", cfg.map, "Grid-world configuration");
  val->callback([&] { run = sls::cmd_validate; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    cfg.mode = mode == "lasso" ? sls::scoring::lasso : sls::scoring::gamec;
    for (const auto& s : sls::text::split(starts, ','))
      if (!sls::text::trim(s).empty()) cfg.starts.emplace_back(sls::text::trim(s));
    return write_outputs(run(cfg), out_dir);
  } catch (const sls::error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.category() == sls::error_category::validation ? 2 : 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
