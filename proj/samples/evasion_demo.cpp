// Evasion game: the secure policy randomizes 50/50 and reaches the target
// with probability 1, while either pure policy is caught forever.

#include <cstdio>
#include <string>

#include "sls.hpp"

int main(int argc, char** argv) {
  const std::string dir = argc > 1 ? argv[1] : "samples";
  auto game = sls::load_game(dir + "/evasion.sg");
  auto aut = sls::load_dra(dir + "/reach_goal.dra");

  auto r = sls::synthesize_max_prob(game, aut);
  const std::size_t s0 = sls::start_product_state(r.product, game.initial());
  const auto& row = r.policy.dist[s0];
  std::printf("secure policy at %s:", r.product.game.state_name(s0).c_str());
  for (std::size_t u = 0; u < row.size(); ++u)
    std::printf(" %s=%.6f", r.product.game.controller_actions(s0)[u].c_str(), row[u]);
  std::printf("\nworst-case value: %.6f\n", sls::best_response_adversary(r.product.game, r.policy, r.gamecs.in_E).value[s0]);

  for (std::size_t u = 0; u < row.size(); ++u) {
    std::vector<std::size_t> choice(r.product.num_states(), 0);
    choice[s0] = u;
    auto pure = sls::pure_policy(r.product.game, sls::player::controller, choice);
    double v = sls::best_response_adversary(r.product.game, pure, r.gamecs.in_E).value[s0];
    std::printf("pure '%s': worst-case value %.6f\n", r.product.game.controller_actions(s0)[u].c_str(), v);
  }
}
