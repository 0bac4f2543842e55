#pragma once

#include <vector>

#include "chain_model.hpp"
#include "cycle.hpp"
#include "errors.hpp"

namespace mclim {

// Walk along row maxima; nodes.back() is the first repeated node and
// nodes[cycle_start] its earlier occurrence.
struct GreedyPath {
  std::vector<StateIndex> nodes;
  std::size_t cycle_start = 0;

  StateIndex entry() const { return nodes[cycle_start]; }
};

inline GreedyPath greedy_walk(const ChainModel& model, StateIndex start) {
  const std::size_t n = model.size();
  if (start >= n) throw UnknownStateError("start index out of range");
  std::vector<std::size_t> seen_at(n, n + 1);
  GreedyPath path;
  StateIndex cur = start;
  while (seen_at[cur] > n) {
    seen_at[cur] = path.nodes.size();
    path.nodes.push_back(cur);
    cur = row_max_successor(model, cur);
  }
  path.cycle_start = seen_at[cur];
  path.nodes.push_back(cur);
  return path;
}

inline Cycle extract_cycle(const GreedyPath& path) {
  return Cycle({path.nodes.begin() + static_cast<std::ptrdiff_t>(path.cycle_start), path.nodes.end() - 1});
}

inline Cycle limit_of(const ChainModel& model, StateIndex start) {
  return extract_cycle(greedy_walk(model, start));
}

// Limit cycle for every start state, indexed by start.
inline std::vector<Cycle> all_limits(const ChainModel& model) {
  std::vector<Cycle> out;
  out.reserve(model.size());
  for (StateIndex s = 0; s < model.size(); ++s) out.push_back(limit_of(model, s));
  return out;
}

inline bool same_limit(const ChainModel& a, const ChainModel& b) {
  if (a.names != b.names) throw StateSetMismatch("models have different state lists");
  return all_limits(a) == all_limits(b);
}

}  // namespace mclim
