#include <cmath>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace sls;

namespace {

/// Two unit cells [0,1) and [1,2) on a line; x' = x + u_C + u_A.
class line_oracle : public dynamics_oracle {
public:
  explicit line_oracle(bool misplace = false) : misplace_(misplace) {}
  std::size_t num_regions() const override { return 2; }
  std::string region_name(std::size_t i) const override { return "cell" + std::to_string(i); }
  point step(const point& x, const point& uc, const point& ua, rng&) const override { return {x[0] + uc[0] + ua[0]}; }
  std::optional<std::size_t> region_of(const point& x) const override {
    if (x[0] < 0 || x[0] >= 2) return std::nullopt;
    return static_cast<std::size_t>(x[0]);
  }
  point sample_state(std::size_t i, rng& gen) const override {
    return {static_cast<double>(misplace_ ? 1 - i : i) + 0.999 * std::uniform_real_distribution<double>(0.0, 1.0)(gen)};
  }
  std::vector<std::pair<std::string, point>> controller_primitives() const override {
    return {{"hold", {0.0}}, {"step", {1.0}}};
  }
  std::vector<std::pair<std::string, point>> adversary_primitives() const override { return {{"none", {0.0}}}; }

private:
  bool misplace_;
};

bool zero_one_kernel(const stochastic_game& g) {
  for (std::size_t s = 0; s < g.num_states(); ++s)
    for (std::size_t uc = 0; uc < g.num_controller_actions(s); ++uc)
      for (std::size_t ua = 0; ua < g.num_adversary_actions(s); ++ua)
        for (const auto& t : g.row(s, uc, ua))
          if (t.prob != 1.0) return false;
  return true;
}

}  // namespace

TEST(Abstraction, CellAlignedShiftIsDeterministic) {
  abstraction_options opt;
  opt.samples = 50;
  auto g = build_game(line_oracle(), {{}, {"goal"}}, {"goal"}, opt);
  EXPECT_EQ(g.num_states(), 3u);
  EXPECT_EQ(g.state_name(2), "oob");
  auto row = g.row(0, 1, 0);
  ASSERT_EQ(row.size(), 1u);
  EXPECT_EQ(row[0].target, 1u);
  EXPECT_EQ(row[0].prob, 1.0);
  EXPECT_EQ(g.row(1, 1, 0)[0].target, 2u);
  EXPECT_TRUE(zero_one_kernel(g));
}

TEST(Abstraction, MisplacedSamplesAreRejected) {
  EXPECT_THROW(build_game(line_oracle(true), {{}, {}}, {}, {}), degenerate_region);
}

TEST(Abstraction, GaussianCellsMatchRectangleIntegrals) {
  gridworld_config c;
  c.n = 10;
  c.samples = 10000;
  c.seed = 5;
  auto g = build_gridworld(c);
  const double sigma = c.noise;
  const std::size_t x0 = 5, y0 = 5;
  const std::size_t s = y0 * c.n + x0;
  std::size_t checked = 0;
  for (std::size_t uc = 0; uc < g.num_controller_actions(s); ++uc)
    for (std::size_t ua = 0; ua < g.num_adversary_actions(s); ++ua) {
      auto ctl = grid_oracle(c).controller_primitives()[uc].second;
      auto adv = grid_oracle(c).adversary_primitives()[ua].second;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          double p = oracle::shifted_cell_probability(ctl[0] + adv[0], sigma, dx) *
                     oracle::shifted_cell_probability(ctl[1] + adv[1], sigma, dy);
          std::size_t t = (y0 + static_cast<std::size_t>(dy + 1) - 1) * c.n + x0 + static_cast<std::size_t>(dx + 1) - 1;
          double est = 0.0;
          for (const auto& e : g.row(s, uc, ua))
            if (e.target == t) est = e.prob;
          double tol = 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(c.samples)) + 1e-4;
          EXPECT_NEAR(est, p, tol) << uc << ' ' << ua << ' ' << dx << ' ' << dy;
          ++checked;
        }
    }
  EXPECT_EQ(checked, 9u * 5u * 9u);
}

TEST(Abstraction, SameSeedSameGame) {
  gridworld_config c;
  c.n = 4;
  c.samples = 200;
  c.seed = 9;
  EXPECT_EQ(write_game(build_gridworld(c)), write_game(build_gridworld(c)));
  auto d = c;
  d.seed = 10;
  EXPECT_NE(write_game(build_gridworld(c)), write_game(build_gridworld(d)));
}

TEST(Gridworld, TwentyByTwentyHasOobSink) {
  gridworld_config c;
  c.n = 20;
  c.samples = 20;
  auto g = build_gridworld(c);
  EXPECT_EQ(g.num_states(), 401u);
  EXPECT_EQ(g.state_name(400), "oob");
}

TEST(Gridworld, NoNoiseNoAdversaryIsDeterministic) {
  gridworld_config c;
  c.n = 5;
  c.control = 1.0;
  c.disturbance = 0.0;
  c.noise = 0.0;
  c.samples = 30;
  auto g = build_gridworld(c);
  EXPECT_EQ(g.num_adversary_actions(0), 1u);
  EXPECT_TRUE(zero_one_kernel(g));
}

TEST(Gridworld, ClippedNoiseStaysInNeighbourhood) {
  gridworld_config c;
  c.n = 6;
  c.clip = 0.05;
  c.samples = 500;
  auto g = build_gridworld(c);
  const std::size_t s = 2 * c.n + 2;
  for (std::size_t uc = 0; uc < g.num_controller_actions(s); ++uc)
    for (std::size_t ua = 0; ua < g.num_adversary_actions(s); ++ua)
      for (const auto& t : g.row(s, uc, ua)) {
        long dx = static_cast<long>(t.target % c.n) - 2, dy = static_cast<long>(t.target / c.n) - 2;
        EXPECT_LE(std::abs(dx), 1);
        EXPECT_LE(std::abs(dy), 1);
      }
}

TEST(Gridworld, ParsesSamplesAndLabels) {
  auto c = load_gridworld(std::string(SLS_SAMPLES_DIR) + "/reach_avoid.grid");
  EXPECT_EQ(c.n, 10u);
  EXPECT_EQ(c.map.size(), 10u);
  EXPECT_EQ(c.initial_x, 1u);
  auto p = load_gridworld(std::string(SLS_SAMPLES_DIR) + "/patrol.grid");
  EXPECT_EQ(p.clip, 0.05);
  EXPECT_THROW(parse_gridworld("gridworld v1\nsize 2\nmap\n.Z\n..\n"), format_error);
  EXPECT_THROW(parse_gridworld("gridworld v1\nsize 2\nmap\n...\n..\n"), format_error);
  EXPECT_THROW(parse_gridworld("gridworld v1\nwind 2\n"), format_error);
  EXPECT_THROW(parse_gridworld("grid v1\n"), format_error);
}
