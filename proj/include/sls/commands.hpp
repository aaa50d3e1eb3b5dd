#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sls/pipelines.hpp"

/// The CLI commands as functions from a run configuration to named output
/// files. Nothing here touches the filesystem except to read inputs.
namespace sls {

struct run_config {
  std::string game, dra, psi, ltl;
  std::string policy, baseline_policy, adversary_policy;
  std::string map;
  double alpha = 20.0;
  double delta = 1e-6;
  std::optional<double> epsilon;  // epsilon-mode value iteration when set
  std::size_t runs = 1000;
  std::size_t horizon = 200;
  std::uint64_t seed = 1;
  std::optional<std::size_t> grid_n, samples_k;
  std::vector<std::string> starts;  // base state names; all states when empty
  scoring mode = scoring::gamec;
  std::size_t trajectories = 10;
};

struct command_output {
  std::map<std::string, std::string> files;
  std::vector<std::string> warnings;
  std::string report;  // short human-readable summary
};

inline constexpr const char* unsatisfiable_warning = "formula unsatisfiable under worst-case adversary";

namespace detail {

inline std::string fmt(double x) { return text::format_double(x); }

inline void require(const std::string& value, const char* flag) {
  if (value.empty()) throw format_error(std::string("missing required option ") + flag);
}

inline vi_options vi_from(const run_config& c) {
  if (!(c.delta > 0)) throw format_error("--delta must be positive");
  vi_options o;
  o.delta = c.delta;
  if (c.epsilon) {
    if (!(*c.epsilon > 0)) throw format_error("--epsilon must be positive");
    o.epsilon_mode = true;
    o.epsilon = *c.epsilon;
  }
  return o;
}

inline std::string values_csv(const max_prob_result& r) {
  std::ostringstream out;
  out << "state,value\n";
  const auto& g = r.modified.game;
  for (std::size_t s = 0; s < g.num_states(); ++s) out << g.state_name(s) << ',' << fmt(r.values.v[s]) << '\n';
  return out.str();
}

inline std::string max_prob_summary(const max_prob_result& r) {
  std::ostringstream out;
  const std::size_t x0 = r.product.game.initial();
  out << "product_states " << r.product.num_states() << '\n'
      << "product_transitions " << r.product.game.num_transitions() << '\n'
      << "gamecs " << r.gamecs.components.size() << '\n'
      << "accepting_states " << std::count(r.gamecs.in_E.begin(), r.gamecs.in_E.end(), 1) << '\n'
      << "initial_state " << r.product.game.state_name(x0) << '\n'
      << "initial_value " << fmt(r.values.v[x0]) << '\n'
      << "sweeps " << r.values.sweeps << '\n'
      << "residual " << fmt(r.values.residual) << '\n';
  if (r.values.sweep_bound > 0) out << "sweep_bound " << fmt(r.values.sweep_bound) << '\n';
  return out.str();
}

inline std::vector<std::size_t> resolve_starts(const stochastic_game& g, const std::vector<std::string>& names) {
  std::vector<std::size_t> out;
  if (names.empty())
    for (std::size_t s = 0; s < g.num_states(); ++s) out.push_back(s);
  for (const auto& n : names) out.push_back(g.find_state(n));
  return out;
}

inline std::string percent(double x) { return std::isinf(x) ? std::string("inf") : fmt(x); }

}  // namespace detail

// ---------------------------------------------------------------------------

inline command_output cmd_synthesize_max_prob(const run_config& c) {
  detail::require(c.game, "--game");
  detail::require(c.dra, "--dra");
  auto g = load_game(c.game);
  auto d = load_dra(c.dra);
  auto r = synthesize_max_prob(g, d, detail::vi_from(c));
  command_output out;
  if (r.unsatisfiable) out.warnings.emplace_back(unsatisfiable_warning);
  out.files["values.csv"] = detail::values_csv(r);
  out.files["policy.txt"] = write_policy(r.product.game, r.policy, &r.phases);
  out.files["gamecs.txt"] = write_gamecs(r.product.game, r.gamecs);
  out.files["summary.txt"] = detail::max_prob_summary(r);
  out.report = "worst-case satisfaction probability at the initial state: " +
               detail::fmt(r.values.v[r.product.game.initial()]) + "\n";
  return out;
}

inline command_output cmd_synthesize_min_violation(const run_config& c) {
  detail::require(c.game, "--game");
  detail::require(c.dra, "--dra");
  detail::require(c.psi, "--psi");
  auto g = load_game(c.game);
  auto d = load_dra(c.dra);
  auto psi = ltl::parse_ltl(c.psi);
  auto r = synthesize_min_violation(g, d, psi, c.alpha, detail::vi_from(c));
  command_output out;
  if (r.reach.unsatisfiable) out.warnings.emplace_back(unsatisfiable_warning);
  const auto& pg = r.reach.product.game;

  out.files["values.csv"] = detail::values_csv(r.reach);
  out.files["policy.txt"] = write_policy(pg, r.policy, &r.reach.phases);
  out.files["gamecs.txt"] = write_gamecs(pg, r.reach.gamecs);

  std::ostringstream trace, gb, comps;
  trace << "component,iteration,J_max,J_min\n";
  gb << "state,component,J,h,v\n";
  comps << "component,pair,size,cycle_states,J,iterations,optimality_residual,gains_non_increasing\n";
  for (std::size_t h = 0; h < r.components.size(); ++h) {
    const auto& comp = r.components[h];
    for (std::size_t k = 0; k < comp.pi.trace.size(); ++k)
      trace << h + 1 << ',' << k + 1 << ',' << detail::fmt(comp.pi.trace[k].J_max) << ','
            << detail::fmt(comp.pi.trace[k].J_min) << '\n';
    for (std::size_t i = 0; i < comp.local.states.size(); ++i)
      gb << pg.state_name(comp.local.states[i]) << ',' << h + 1 << ',' << detail::fmt(comp.pi.gb.J[i]) << ','
         << detail::fmt(comp.pi.gb.h[i]) << ',' << detail::fmt(comp.pi.gb.v_aux[i]) << '\n';
    comps << h + 1 << ',' << r.reach.gamecs.components[h].pair + 1 << ',' << comp.local.states.size() << ','
          << std::count(comp.cycle_set.begin(), comp.cycle_set.end(), 1) << ',' << detail::fmt(comp.J) << ','
          << comp.pi.iterations << ',' << detail::fmt(comp.pi.optimality_residual) << ','
          << (comp.pi.gains_non_increasing ? "true" : "false") << '\n';
  }
  out.files["trace.csv"] = trace.str();
  out.files["gain_bias.csv"] = gb.str();
  out.files["components.csv"] = comps.str();

  std::string summary = detail::max_prob_summary(r.reach);
  summary += "alpha " + detail::fmt(c.alpha) + "\n";
  if (r.best != no_state) {
    summary += "best_component " + std::to_string(r.best + 1) + "\n";
    summary += "best_J " + detail::fmt(r.components[r.best].J) + "\n";
    out.report = "minimal worst-case violation cost per cycle: " + detail::fmt(r.components[r.best].J) + "\n";
  }
  out.files["summary.txt"] = summary;
  return out;
}

inline command_output cmd_compare(const run_config& c) {
  detail::require(c.game, "--game");
  detail::require(c.dra, "--dra");
  auto g = load_game(c.game);
  auto d = load_dra(c.dra);
  command_output out;

  std::optional<min_violation_result> mv;
  max_prob_result r;
  if (!c.psi.empty()) {
    mv = synthesize_min_violation(g, d, ltl::parse_ltl(c.psi), c.alpha, detail::vi_from(c));
    r = mv->reach;
  } else {
    r = synthesize_max_prob(g, d, detail::vi_from(c));
  }
  if (r.unsatisfiable) out.warnings.emplace_back(unsatisfiable_warning);
  const auto& pg = r.product.game;
  mixed_policy secure = mv ? mv->policy : r.policy;
  mixed_policy baseline = oblivious_policy(r.product, r.gamecs);
  if (!c.policy.empty()) secure = parse_policy(pg, text::read_file(c.policy));
  if (!c.baseline_policy.empty()) baseline = parse_policy(pg, text::read_file(c.baseline_policy));

  simulation_options sim;
  sim.runs = c.runs;
  sim.horizon = c.horizon;
  sim.seed = c.seed;
  auto starts = detail::resolve_starts(g, c.starts);
  auto rows = compare_reach(r, secure, baseline, starts, c.runs ? &sim : nullptr, c.mode);

  std::ostringstream table;
  table << "start,secure,baseline,improvement_pct,secure_sim,secure_ci_low,secure_ci_high,baseline_sim,"
           "baseline_ci_low,baseline_ci_high\n";
  double sum_improvement = 0.0;
  std::size_t finite = 0;
  for (const auto& row : rows) {
    double imp = improvement_percent(row.secure, row.baseline);
    if (!std::isinf(imp)) sum_improvement += imp, ++finite;
    table << g.state_name(row.start) << ',' << detail::fmt(row.secure) << ',' << detail::fmt(row.baseline) << ','
          << detail::percent(imp);
    if (row.secure_sim)
      table << ',' << detail::fmt(row.secure_sim->satisfaction_estimate) << ','
            << detail::fmt(row.secure_sim->satisfaction_ci.low) << ',' << detail::fmt(row.secure_sim->satisfaction_ci.high)
            << ',' << detail::fmt(row.baseline_sim->satisfaction_estimate) << ','
            << detail::fmt(row.baseline_sim->satisfaction_ci.low) << ','
            << detail::fmt(row.baseline_sim->satisfaction_ci.high);
    else
      table << ",,,,,,";
    table << '\n';
  }
  out.files["compare.csv"] = table.str();
  std::ostringstream report;
  report << "start states " << rows.size() << ", mean improvement "
         << (finite ? detail::fmt(sum_improvement / static_cast<double>(finite)) : std::string("n/a")) << "%\n";

  if (mv) {
    std::ostringstream cost;
    cost << "component,secure_J,baseline_J,improvement_pct\n";
    for (std::size_t h = 0; h < mv->components.size(); ++h) {
      const auto& comp = mv->components[h];
      double base_j = max_gain(worst_case_gain(comp, oblivious_cycle_policy(comp)));
      double imp = base_j == 0.0 ? 0.0 : (base_j - comp.J) / base_j * 100.0;
      cost << h + 1 << ',' << detail::fmt(comp.J) << ',' << detail::fmt(base_j) << ',' << detail::fmt(imp) << '\n';
      report << "component " << h + 1 << ": J secure " << detail::fmt(comp.J) << " vs baseline " << detail::fmt(base_j)
             << '\n';
    }
    out.files["compare_cost.csv"] = cost.str();
  }
  out.report = report.str();
  return out;
}

inline command_output cmd_gen_gridworld(const run_config& c) {
  gridworld_config cfg = c.map.empty() ? gridworld_config{} : load_gridworld(c.map);
  if (c.grid_n) {
    if (!cfg.map.empty() && *c.grid_n != cfg.n) throw format_error("--grid-n conflicts with the map size");
    cfg.n = *c.grid_n;
  }
  if (c.samples_k) cfg.samples = *c.samples_k;
  if (c.map.empty()) cfg.seed = c.seed;
  validate(cfg);
  auto g = build_gridworld(cfg);
  command_output out;
  out.files["game.sg"] = write_game(g);
  out.report = "grid world with " + std::to_string(g.num_states()) + " states and " +
               std::to_string(g.num_transitions()) + " transitions\n";
  return out;
}

inline command_output cmd_simulate(const run_config& c) {
  detail::require(c.game, "--game");
  detail::require(c.dra, "--dra");
  detail::require(c.policy, "--policy");
  auto g = load_game(c.game);
  auto d = load_dra(c.dra);
  auto p = build_product(g, d);
  auto gs = compute_gamecs(p);
  auto mu = parse_policy(p.game, text::read_file(c.policy));
  if (mu.owner != player::controller) throw owner_mismatch("--policy must be a controller policy");
  mixed_policy tau;
  if (!c.adversary_policy.empty()) {
    tau = parse_policy(p.game, text::read_file(c.adversary_policy));
    if (tau.owner != player::adversary) throw owner_mismatch("--adversary-policy must be an adversary policy");
  } else {
    tau = best_response_adversary(p.game, mu, gs.in_E).tau;
  }

  std::optional<ltl::formula> formula;
  if (!c.ltl.empty()) formula = ltl::parse_ltl(c.ltl);
  std::optional<cost_assignment> cost;
  std::vector<char> cycle_set(p.num_states(), 0);
  for (const auto& comp : gs.components)
    for (std::size_t s : comp.states) cycle_set[s] = p.pairs[comp.pair].K[s];
  if (!c.psi.empty()) {
    cost = assign_costs(p.game, ltl::parse_ltl(c.psi), c.alpha);
    if (c.adversary_policy.empty()) tau = cost_adversary(p, gs, mu, *cost, std::move(tau));
  }

  simulation_spec spec;
  spec.product = &p;
  spec.formula = formula ? &*formula : nullptr;
  spec.in_E = &gs.in_E;
  spec.cycle_set = &cycle_set;
  spec.cost = cost ? &cost->g : nullptr;
  spec.mode = c.mode;
  simulation_options opt;
  opt.runs = c.runs;
  opt.horizon = c.horizon;
  opt.seed = c.seed;
  opt.keep_trajectories = c.trajectories;
  auto st = simulate(g, mu, tau, spec, opt);

  std::ostringstream stats, traj;
  stats << "key,value\n"
        << "runs," << st.runs << "\nhorizon," << st.horizon << "\nsuccesses," << st.successes
        << "\nsatisfaction_estimate," << detail::fmt(st.satisfaction_estimate) << "\nci_low,"
        << detail::fmt(st.satisfaction_ci.low) << "\nci_high," << detail::fmt(st.satisfaction_ci.high)
        << "\ntotal_cycles," << detail::fmt(st.total_cycles) << "\ntotal_violation_cost,"
        << detail::fmt(st.total_violation_cost) << "\nviolation_cost_per_cycle,"
        << detail::fmt(st.violation_cost_per_cycle) << "\nviolation_cost_mean," << detail::fmt(st.violation_cost_mean)
        << "\nviolation_cost_variance," << detail::fmt(st.violation_cost_variance) << '\n';
  traj << "run,step,state\n";
  for (std::size_t r = 0; r < st.trajectories.size(); ++r)
    for (std::size_t k = 0; k < st.trajectories[r].size(); ++k)
      traj << r << ',' << k << ',' << g.state_name(st.trajectories[r][k]) << '\n';
  command_output out;
  out.files["stats.csv"] = stats.str();
  out.files["trajectories.csv"] = traj.str();
  out.report = "satisfaction estimate " + detail::fmt(st.satisfaction_estimate) + " [" +
               detail::fmt(st.satisfaction_ci.low) + ", " + detail::fmt(st.satisfaction_ci.high) + "]\n";
  return out;
}

/// Parses whichever inputs are given and reports their shape.
inline command_output cmd_validate(const run_config& c) {
  command_output out;
  std::ostringstream r;
  std::optional<stochastic_game> g;
  if (!c.game.empty()) {
    g = load_game(c.game);
    r << "game: " << g->num_states() << " states, " << g->num_transitions() << " transitions\n";
  }
  if (!c.dra.empty()) {
    auto d = load_dra(c.dra);
    r << "dra: " << d.num_states() << " states, " << d.pairs().size() << " pairs\n";
    if (g) r << "product: " << build_product(*g, d).num_states() << " states\n";
  }
  if (!c.ltl.empty()) {
    auto f = ltl::parse_ltl(c.ltl);
    r << "ltl: " << ltl::to_string(f) << "\nexpanded: " << ltl::to_string(ltl::expand_derived(f)) << '\n';
  }
  if (!c.psi.empty()) {
    auto f = ltl::parse_ltl(c.psi);
    if (f.kind() != ltl::op::always || !ltl::is_propositional(f.lhs()))
      throw not_invariant_form("expected G(propositional formula), got " + ltl::to_string(f));
    r << "psi: " << ltl::to_string(f) << '\n';
  }
  if (!c.map.empty()) {
    auto cfg = load_gridworld(c.map);
    r << "grid world: " << cfg.n << " x " << cfg.n << ", " << cfg.samples << " samples per cell\n";
  }
  out.report = r.str();
  return out;
}

}  // namespace sls
