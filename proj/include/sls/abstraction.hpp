#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sls/error.hpp"
#include "sls/game.hpp"
#include "sls/parallel.hpp"
#include "sls/simulate.hpp"

/// Sampling abstraction of continuous dynamics x' = f(x, u_C, u_A, noise)
/// into a finite stochastic game.
namespace sls {

using point = std::vector<double>;

/// A system over regions X_1..X_n with finitely many representative inputs.
class dynamics_oracle {
public:
  virtual ~dynamics_oracle() = default;

  virtual std::size_t num_regions() const = 0;
  virtual std::string region_name(std::size_t i) const = 0;
  /// Successor state; all randomness is drawn from `noise`.
  virtual point step(const point& x, const point& u_c, const point& u_a, rng& noise) const = 0;
  /// Region containing x, or nullopt when x lies outside every region.
  virtual std::optional<std::size_t> region_of(const point& x) const = 0;
  /// A state inside region i.
  virtual point sample_state(std::size_t i, rng& gen) const = 0;

  virtual std::vector<std::pair<std::string, point>> controller_primitives() const = 0;
  virtual std::vector<std::pair<std::string, point>> adversary_primitives() const = 0;
};

struct abstraction_options {
  std::size_t samples = 1000;  // K
  std::uint64_t seed = 1;
  std::size_t initial_region = 0;
};

inline constexpr const char* oob_state_name = "oob";
inline constexpr const char* oob_proposition = "oob";

/// For every (region i, u_C, u_A) draws K states of X_i with one noise
/// realization each and sets Pr(i, u_C, u_A, j) = count_j / K. Successors
/// outside all regions go to an absorbing sink labeled `oob` (added to the
/// alphabet when missing), which is the last state. labels[i] lists the
/// propositions of region i.
inline stochastic_game build_game(const dynamics_oracle& oracle, const std::vector<std::vector<std::string>>& labels,
                                  std::vector<std::string> alphabet, const abstraction_options& opt) {
  if (opt.samples == 0) throw format_error("samples per cell must be positive");
  const std::size_t n = oracle.num_regions();
  if (n == 0) throw format_error("dynamics oracle has no regions");
  if (labels.size() != n) throw format_error("one label set per region is required");
  if (opt.initial_region >= n) throw format_error("initial region out of range");
  if (std::find(alphabet.begin(), alphabet.end(), oob_proposition) == alphabet.end())
    alphabet.emplace_back(oob_proposition);

  const auto uc = oracle.controller_primitives();
  const auto ua = oracle.adversary_primitives();
  if (uc.empty() || ua.empty()) throw empty_action_set("dynamics oracle has no input primitives");
  std::vector<std::string> uc_names, ua_names;
  for (const auto& [name, u] : uc) uc_names.push_back(name);
  for (const auto& [name, u] : ua) ua_names.push_back(name);

  // counts[(i * |uc| + c) * |ua| + a] = successor histogram; index n is the sink.
  const std::size_t tasks = n * uc.size() * ua.size();
  std::vector<std::vector<std::size_t>> counts(tasks);
  parallel_for(tasks, [&](std::size_t task) {
    const std::size_t i = task / (uc.size() * ua.size());
    const std::size_t c = task / ua.size() % uc.size();
    const std::size_t a = task % ua.size();
    rng gen(derive_seed(derive_seed(derive_seed(opt.seed, i), c), a));
    std::vector<std::size_t> hist(n + 1, 0);
    for (std::size_t k = 0; k < opt.samples; ++k) {
      point x = oracle.sample_state(i, gen);
      auto home = oracle.region_of(x);
      if (!home || *home != i)
        throw degenerate_region("sampled state does not lie in region '" + oracle.region_name(i) + "'");
      auto j = oracle.region_of(oracle.step(x, uc[c].second, ua[a].second, gen));
      ++hist[j ? *j : n];
    }
    counts[task] = std::move(hist);
  });

  game_builder b(alphabet);
  for (std::size_t i = 0; i < n; ++i) b.add_state(oracle.region_name(i), b.mask_of(labels[i]), uc_names, ua_names);
  const std::size_t sink = b.add_state(oob_state_name, b.mask_of({oob_proposition}), {"stay"}, {"idle"});
  const double k = static_cast<double>(opt.samples);
  for (std::size_t task = 0; task < tasks; ++task) {
    const std::size_t i = task / (uc.size() * ua.size());
    const std::size_t c = task / ua.size() % uc.size();
    const std::size_t a = task % ua.size();
    for (std::size_t j = 0; j <= n; ++j)
      if (counts[task][j]) b.add(i, c, a, j == n ? sink : j, static_cast<double>(counts[task][j]) / k);
  }
  b.add(sink, 0, 0, sink, 1.0);
  b.set_initial(opt.initial_region);
  return std::move(b).build();
}

}  // namespace sls
