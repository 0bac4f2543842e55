#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "chain_model.hpp"

namespace mclim {

// Directed cycle of distinct states, rotated to start at its smallest index.
// Equality is rotation-invariant by construction and direction-sensitive.
class Cycle {
 public:
  Cycle() = default;

  explicit Cycle(std::vector<StateIndex> states) : states_(std::move(states)) {
    if (states_.size() < 2) throw std::invalid_argument("a cycle needs at least 2 states");
    auto sorted = states_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("cycle states must be distinct");
    std::rotate(states_.begin(), std::min_element(states_.begin(), states_.end()), states_.end());
  }

  const std::vector<StateIndex>& states() const noexcept { return states_; }
  std::size_t size() const noexcept { return states_.size(); }

  bool contains(StateIndex s) const { return std::find(states_.begin(), states_.end(), s) != states_.end(); }

  StateIndex successor(StateIndex s) const {
    auto it = std::find(states_.begin(), states_.end(), s);
    if (it == states_.end()) throw std::out_of_range("state not on cycle");
    ++it;
    return it == states_.end() ? states_.front() : *it;
  }

  // Members in traversal order beginning at `entry` (which must be on the cycle).
  std::vector<StateIndex> from(StateIndex entry) const {
    auto it = std::find(states_.begin(), states_.end(), entry);
    if (it == states_.end()) throw std::out_of_range("state not on cycle");
    std::vector<StateIndex> out(it, states_.end());
    out.insert(out.end(), states_.begin(), it);
    return out;
  }

  friend bool operator==(const Cycle&, const Cycle&) = default;

 private:
  std::vector<StateIndex> states_;
};

// "A -> B -> C -> A", starting at `entry`.
inline std::string format_cycle(const ChainModel& model, const Cycle& cycle, StateIndex entry) {
  std::string out;
  for (auto s : cycle.from(entry)) out += model.names[s] + " -> ";
  return out + model.names[entry];
}

inline std::string format_cycle(const ChainModel& model, const Cycle& cycle) {
  return format_cycle(model, cycle, cycle.states().front());
}

}  // namespace mclim
