// Reach-avoid on the UAV grid world: abstraction, secure synthesis and a
// comparison against the adversary-oblivious policy at a few start cells.

#include <cstdio>
#include <string>
#include <vector>

#include "sls.hpp"

int main(int argc, char** argv) {
  const std::string dir = argc > 1 ? argv[1] : "samples";
  auto cfg = sls::load_gridworld(dir + "/reach_avoid.grid");
  auto game = sls::build_gridworld(cfg);
  auto aut = sls::load_dra(dir + "/reach_avoid.dra");
  std::printf("abstraction: %zu states, %zu transitions\n", game.num_states(), game.num_transitions());

  auto r = sls::synthesize_max_prob(game, aut);
  auto baseline = sls::oblivious_policy(r.product, r.gamecs);
  std::vector<std::size_t> starts;
  for (const char* name : {"c0_0", "c1_1", "c2_2", "c1_3"}) starts.push_back(game.find_state(name));
  std::printf("%-6s %10s %10s %10s\n", "start", "secure", "baseline", "gain %");
  for (const auto& row : sls::compare_reach(r, r.policy, baseline, starts))
    std::printf("%-6s %10.4f %10.4f %10.1f\n", game.state_name(row.start).c_str(), row.secure, row.baseline,
                sls::improvement_percent(row.secure, row.baseline));
}
