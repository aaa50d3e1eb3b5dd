#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sls/abstraction.hpp"
#include "sls/error.hpp"
#include "sls/game.hpp"
#include "sls/text.hpp"

/// Planar UAV grid world: x(t+1) = x(t) + (u_C + u_A + noise) dt over an
/// n x n grid of unit cells.
namespace sls {

inline const std::vector<std::string>& gridworld_alphabet() {
  static const std::vector<std::string> a{"home", "dest1", "dest2", "dest3", "obstacle", "oob"};
  return a;
}

struct gridworld_config {
  std::size_t n = 10;
  double control = 0.3;      // controller inputs in [-control, control]^2
  double disturbance = 0.2;  // adversary inputs in [-disturbance, disturbance]^2
  double noise = 0.15;       // standard deviation per axis
  double clip = 0.0;         // when positive, each noise component is resampled until |.| <= clip
  double dt = 1.0;
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  std::size_t initial_x = 0, initial_y = 0;
  /// One string per row y = 0..n-1, one char per column x: '.' free,
  /// 'X' obstacle, 'h' home, '1' '2' '3' destinations.
  std::vector<std::string> map;
};

inline std::string cell_name(std::size_t x, std::size_t y) { return "c" + std::to_string(x) + "_" + std::to_string(y); }

inline std::vector<std::string> cell_labels(char c) {
  switch (c) {
    case '.': return {};
    case 'X': return {"obstacle"};
    case 'h': return {"home"};
    case '1': return {"dest1"};
    case '2': return {"dest2"};
    case '3': return {"dest3"};
    default: throw format_error(std::string("unknown map character '") + c + "'");
  }
}

inline void validate(const gridworld_config& c) {
  if (c.n == 0) throw format_error("grid size must be positive");
  if (c.samples == 0) throw format_error("samples must be positive");
  if (!(c.control >= 0) || !(c.disturbance >= 0) || !(c.noise >= 0) || !(c.clip >= 0) || !(c.dt > 0))
    throw format_error("grid-world parameters must be non-negative and dt positive");
  if (c.initial_x >= c.n || c.initial_y >= c.n) throw format_error("initial cell outside the grid");
  if (!c.map.empty()) {
    if (c.map.size() != c.n) throw format_error("map must have one row per grid row");
    for (const auto& row : c.map) {
      if (row.size() != c.n) throw format_error("map rows must have one char per grid column");
      for (char ch : row) cell_labels(ch);
    }
  }
}

/// Parses `gridworld v1`: keyword lines (size, control, disturbance, noise,
/// clip, dt, samples, seed, initial x y) and an optional `map` section whose
/// first line is row y = 0.
inline gridworld_config parse_gridworld(std::string_view source) {
  auto lines = text::content_lines(source);
  if (lines.empty() || text::words(lines[0].second) != std::vector<std::string>{"gridworld", "v1"})
    throw format_error("expected header 'gridworld v1'");
  gridworld_config c;
  auto count = [](const std::string& w, std::size_t line) {
    double v = text::parse_double(w);
    if (v < 0 || v != std::floor(v)) throw format_error("line " + std::to_string(line) + ": expected a count");
    return static_cast<std::size_t>(v);
  };
  bool in_map = false;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& [no, line] = lines[i];
    auto w = text::words(line);
    if (in_map) {
      if (w.size() != 1) throw format_error("line " + std::to_string(no) + ": map rows must not contain spaces");
      c.map.push_back(w[0]);
      continue;
    }
    auto need = [&](std::size_t k) {
      if (w.size() != k) throw format_error("line " + std::to_string(no) + ": wrong number of fields");
    };
    if (w[0] == "map") need(1), in_map = true;
    else if (w[0] == "size") need(2), c.n = count(w[1], no);
    else if (w[0] == "control") need(2), c.control = text::parse_double(w[1]);
    else if (w[0] == "disturbance") need(2), c.disturbance = text::parse_double(w[1]);
    else if (w[0] == "noise") need(2), c.noise = text::parse_double(w[1]);
    else if (w[0] == "clip") need(2), c.clip = text::parse_double(w[1]);
    else if (w[0] == "dt") need(2), c.dt = text::parse_double(w[1]);
    else if (w[0] == "samples") need(2), c.samples = count(w[1], no);
    else if (w[0] == "seed") need(2), c.seed = count(w[1], no);
    else if (w[0] == "initial") need(3), c.initial_x = count(w[1], no), c.initial_y = count(w[2], no);
    else throw format_error("line " + std::to_string(no) + ": unknown keyword '" + w[0] + "'");
  }
  validate(c);
  return c;
}

inline gridworld_config load_gridworld(const std::string& path) { return parse_gridworld(text::read_file(path)); }

class grid_oracle : public dynamics_oracle {
public:
  explicit grid_oracle(gridworld_config c) : c_(std::move(c)) { validate(c_); }

  std::size_t num_regions() const override { return c_.n * c_.n; }
  std::string region_name(std::size_t i) const override { return cell_name(i % c_.n, i / c_.n); }

  point step(const point& x, const point& u_c, const point& u_a, rng& noise) const override {
    point y(2);
    for (std::size_t k = 0; k < 2; ++k) y[k] = x[k] + (u_c[k] + u_a[k] + draw(noise)) * c_.dt;
    return y;
  }

  std::optional<std::size_t> region_of(const point& x) const override {
    const double n = static_cast<double>(c_.n);
    if (!(x[0] >= 0 && x[0] < n && x[1] >= 0 && x[1] < n)) return std::nullopt;
    return static_cast<std::size_t>(x[1]) * c_.n + static_cast<std::size_t>(x[0]);
  }

  point sample_state(std::size_t i, rng& gen) const override {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double cx = static_cast<double>(i % c_.n), cy = static_cast<double>(i / c_.n);
    // Clamped strictly below the upper cell boundary.
    return {std::min(cx + u(gen), std::nextafter(cx + 1.0, 0.0)), std::min(cy + u(gen), std::nextafter(cy + 1.0, 0.0))};
  }

  std::vector<std::pair<std::string, point>> controller_primitives() const override {
    const double u = c_.control;
    return {{"stay", {0, 0}}, {"E", {u, 0}},   {"W", {-u, 0}},  {"N", {0, u}},  {"S", {0, -u}},
            {"NE", {u, u}},  {"NW", {-u, u}}, {"SE", {u, -u}}, {"SW", {-u, -u}}};
  }

  std::vector<std::pair<std::string, point>> adversary_primitives() const override {
    const double a = c_.disturbance;
    if (a == 0.0) return {{"none", {0, 0}}};
    return {{"none", {0, 0}}, {"pushE", {a, 0}}, {"pushW", {-a, 0}}, {"pushN", {0, a}}, {"pushS", {0, -a}}};
  }

  const gridworld_config& config() const { return c_; }

private:
  double draw(rng& gen) const {
    if (c_.noise == 0.0) return 0.0;
    std::normal_distribution<double> d(0.0, c_.noise);
    for (;;) {
      double v = d(gen);
      if (c_.clip <= 0.0 || std::abs(v) <= c_.clip) return v;
    }
  }

  gridworld_config c_;
};

/// Abstraction of the grid world: n * n cell states plus the `oob` sink.
inline stochastic_game build_gridworld(const gridworld_config& c) {
  grid_oracle oracle(c);
  std::vector<std::vector<std::string>> labels(c.n * c.n);
  if (!c.map.empty())
    for (std::size_t y = 0; y < c.n; ++y)
      for (std::size_t x = 0; x < c.n; ++x) labels[y * c.n + x] = cell_labels(c.map[y][x]);
  abstraction_options opt;
  opt.samples = c.samples;
  opt.seed = c.seed;
  opt.initial_region = c.initial_y * c.n + c.initial_x;
  return build_game(oracle, labels, gridworld_alphabet(), opt);
}

}  // namespace sls
