#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace sls {

/// Adjacency lists over densely indexed nodes.
using digraph = std::vector<std::vector<std::size_t>>;

/// Tarjan's algorithm, iterative. Every node lands in exactly one returned
/// component; components are sorted internally and ordered by their
/// smallest node. Filtering of trivial components is left to the caller.
inline std::vector<std::vector<std::size_t>> strongly_connected_components(const digraph& g) {
  const std::size_t n = g.size();
  constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, unvisited), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<std::size_t> stack;
  std::vector<std::pair<std::size_t, std::size_t>> call;  // (node, next edge)
  std::vector<std::vector<std::size_t>> out;
  std::size_t counter = 0;

  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != unvisited) continue;
    call.emplace_back(root, 0);
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      auto& [v, e] = call.back();
      if (e < g[v].size()) {
        std::size_t w = g[v][e++];
        if (index[w] == unvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      std::size_t done = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
      if (low[done] == index[done]) {
        std::vector<std::size_t> comp;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp.push_back(w);
        } while (w != done);
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

/// Nodes from which some node with target[v] set is reachable.
inline std::vector<char> can_reach(const digraph& g, const std::vector<char>& target) {
  const std::size_t n = g.size();
  digraph rev(n);
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t w : g[v]) rev[w].push_back(v);
  std::vector<char> seen(target);
  std::vector<std::size_t> work;
  for (std::size_t v = 0; v < n; ++v)
    if (seen[v]) work.push_back(v);
  while (!work.empty()) {
    std::size_t w = work.back();
    work.pop_back();
    for (std::size_t v : rev[w])
      if (!seen[v]) seen[v] = 1, work.push_back(v);
  }
  return seen;
}

}  // namespace sls
