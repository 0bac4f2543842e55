#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "chain_model.hpp"
#include "cycle.hpp"
#include "matrix.hpp"
#include "rng.hpp"

namespace mclim {

// Column selected by a uniform draw r: the first column whose cumulative sum
// reaches r. Zero cells are never selected, so r == 0 lands on the first
// positive column and the diagonal is never chosen. If rounding leaves the
// total just below r, the last positive column is returned.
inline std::size_t point_to(std::span<const double> row, double r) {
  double acc = 0.0;
  std::size_t last = row.size();
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (!(row[j] > 0.0)) continue;
    acc += row[j];
    last = j;
    if (acc >= r) return j;
  }
  if (last == row.size()) throw std::invalid_argument("point_to: row has no positive entry");
  return last;
}

// One reinforcement of cell j, in place: p_j -> (1+eps)p_j/(1+eps p_j), every
// other cell divided by 1+eps p_j. Same as scaling p_j by 1+eps and dividing
// the row by its new sum when the row sums to 1.
inline void reinforce_in_place(std::span<double> row, std::size_t j, double epsilon) {
  const double p = row[j];
  if (!(p > 0.0)) throw std::invalid_argument("reinforce: target cell has zero probability");
  const double scale = 1.0 / (1.0 + epsilon * p);
  for (double& x : row) x *= scale;
  row[j] = (1.0 + epsilon) * p * scale;
}

inline std::vector<double> reinforce(std::span<const double> row, std::size_t j, double epsilon) {
  std::vector<double> out(row.begin(), row.end());
  reinforce_in_place(out, j, epsilon);
  return out;
}

// Cells j1 and j2 after reinforcing each once, in either order.
inline std::pair<double, double> two_step_closed_form(double p1, double p2, double epsilon) {
  const double denom = 1.0 + epsilon * p1 + epsilon * p2;
  return {(1.0 + epsilon) * p1 / denom, (1.0 + epsilon) * p2 / denom};
}

// f(x) = (1+eps)x/(1+eps x) applied k times.
inline double fixed_point_iterate(double x0, double epsilon, std::uint64_t k) {
  double x = x0;
  for (std::uint64_t i = 0; i < k; ++i) x = (1.0 + epsilon) * x / (1.0 + epsilon * x);
  return x;
}

struct SimConfig {
  double epsilon = 0.05;
  std::uint64_t seed = 0;
  std::uint64_t max_events = 1'000'000;
  double delta = 0.01;
  StateIndex start = 0;

  void check(std::size_t n) const {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must be in (0,1)");
    if (!(delta > 0.0 && delta < 0.5)) throw std::invalid_argument("delta must be in (0,0.5)");
    if (max_events < 1) throw std::invalid_argument("max_events must be at least 1");
    if (start >= n) throw std::invalid_argument("start state out of range");
  }
};

// Fixed-capacity ring of the most recently visited states.
class History {
 public:
  explicit History(std::size_t capacity) : buf_(capacity) {}

  void push(StateIndex s) {
    buf_[head_] = s;
    head_ = (head_ + 1) % buf_.size();
    if (count_ < buf_.size()) ++count_;
  }

  std::size_t size() const noexcept { return count_; }
  std::size_t capacity() const noexcept { return buf_.size(); }

  // back(0) is the newest entry.
  StateIndex back(std::size_t k) const { return buf_[(head_ + buf_.size() - 1 - k) % buf_.size()]; }

  friend bool operator==(const History&, const History&) = default;

 private:
  std::vector<StateIndex> buf_;
  std::size_t head_ = 0;
  std::size_t count_ = 0;
};

struct SimState {
  Matrix trans;
  StateIndex current;
  std::uint64_t events = 0;
  Rng rng;
  History history;

  SimState(const ChainModel& model, StateIndex start, std::uint64_t seed)
      : trans(model.trans), current(start), rng(seed), history(10 * model.size()) {
    history.push(start);
  }

  friend bool operator==(const SimState&, const SimState&) = default;
};

// One event: point with a fresh draw, reinforce the chosen cell, move.
// Returns the new current state.
inline StateIndex step(SimState& state, double epsilon) {
  auto row = state.trans.row(state.current);
  const StateIndex next = point_to(row, state.rng.uniform());
  reinforce_in_place(row, next, epsilon);
  state.current = next;
  ++state.events;
  state.history.push(next);
  return next;
}

// Cycle the recent history has settled on: the last 10L visits are ten
// repetitions of L distinct states and every cycle edge carries at least
// 1 - delta of its row.
inline std::optional<Cycle> settled_cycle(const SimState& state, double delta) {
  const auto& h = state.history;
  const StateIndex cur = h.back(0);
  if (h.size() < 20) return std::nullopt;
  if (state.trans(h.back(1), cur) < 1.0 - delta) return std::nullopt;

  std::size_t period = 0;
  const std::size_t limit = std::min(h.size() / 10, state.trans.rows());
  for (std::size_t k = 1; k <= limit; ++k)
    if (h.back(k) == cur) {
      period = k;
      break;
    }
  if (period < 2) return std::nullopt;
  for (std::size_t k = 0; k + period < 10 * period; ++k)
    if (h.back(k) != h.back(k + period)) return std::nullopt;

  std::vector<StateIndex> members(period);
  for (std::size_t k = 0; k < period; ++k) members[period - 1 - k] = h.back(k);
  for (std::size_t k = 0; k < period; ++k)
    if (state.trans(members[k], members[(k + 1) % period]) < 1.0 - delta) return std::nullopt;
  return Cycle(std::move(members));
}

struct SimResult {
  Matrix final_trans;
  std::vector<std::uint64_t> state_visits;
  Matrix cell_visits;  // counts, stored as doubles
  bool converged = false;
  std::optional<Cycle> realized;
  std::uint64_t events_used = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const SimResult&, const SimResult&) = default;
};

inline SimResult run(const ChainModel& model, const SimConfig& config) {
  config.check(model.size());
  SimState state(model, config.start, config.seed);
  SimResult res;
  res.seed = config.seed;
  res.state_visits.assign(model.size(), 0);
  res.cell_visits = Matrix(model.size(), model.size());
  res.state_visits[config.start] = 1;

  while (state.events < config.max_events) {
    const StateIndex from = state.current;
    const StateIndex to = step(state, config.epsilon);
    ++res.state_visits[to];
    res.cell_visits(from, to) += 1.0;
    if (auto c = settled_cycle(state, config.delta)) {
      res.converged = true;
      res.realized = std::move(c);
      break;
    }
  }
  res.events_used = state.events;
  res.final_trans = std::move(state.trans);
  return res;
}

}  // namespace mclim
