#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chain_model.hpp"
#include "cycle.hpp"
#include "errors.hpp"
#include "matrix.hpp"
#include "reinforcement.hpp"
#include "rng.hpp"

namespace mclim {

// A non-empty proper subset G of the states; the complement is implied.
class Partition {
 public:
  Partition(std::size_t n, const std::vector<StateIndex>& good) : good_(n, false) {
    for (auto s : good) {
      if (s >= n) throw UnknownStateError("partition state index out of range");
      good_[s] = true;
    }
    std::size_t k = 0;
    for (bool b : good_) k += b;
    if (k == 0 || k == n) throw std::invalid_argument("partition must be a non-empty proper subset of the states");
  }

  static Partition from_names(const ChainModel& model, const std::vector<std::string>& names) {
    std::vector<StateIndex> idx;
    for (const auto& nm : names) idx.push_back(model.index_of(nm));
    return Partition(model.size(), idx);
  }

  bool good(StateIndex s) const { return good_[s]; }
  std::size_t size() const noexcept { return good_.size(); }

 private:
  std::vector<bool> good_;
};

struct StationaryDist {
  std::vector<double> pi;
  double residual = 0.0;  // max_j |(pi P)_j - pi_j|
};

enum class SojournMethod { stationary, limit_cycle, monte_carlo };

inline const char* to_string(SojournMethod m) {
  switch (m) {
    case SojournMethod::stationary:
      return "stationary";
    case SojournMethod::limit_cycle:
      return "limit-cycle";
    case SojournMethod::monte_carlo:
      return "monte-carlo";
  }
  return "?";
}

struct SojournDetail {
  std::optional<double> residual;
  std::optional<Cycle> cycle;
  std::optional<std::uint64_t> replications;
  std::optional<double> se_good;
  std::optional<double> se_bad;
  std::string note;
};

struct SojournReport {
  double s_good = 0.0;
  double s_bad = 0.0;
  double stc = 0.0;
  SojournMethod method = SojournMethod::stationary;
  SojournDetail detail;
};

// Throws ReducibleChainError naming a pair (i, j) with j unreachable from i.
inline void require_irreducible(const Matrix& p) {
  const std::size_t n = p.rows();
  auto reach = [&](bool reverse) {
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      auto u = stack.back();
      stack.pop_back();
      for (std::size_t v = 0; v < n; ++v) {
        double w = reverse ? p(v, u) : p(u, v);
        if (w > 0.0 && !seen[v]) {
          seen[v] = true;
          stack.push_back(v);
        }
      }
    }
    return seen;
  };
  auto fwd = reach(false);
  for (std::size_t v = 0; v < n; ++v)
    if (!fwd[v]) throw ReducibleChainError(0, v, "chain is reducible: state " + std::to_string(v) +
                                                     " is unreachable from state 0");
  auto bwd = reach(true);
  for (std::size_t v = 0; v < n; ++v)
    if (!bwd[v]) throw ReducibleChainError(v, 0, "chain is reducible: state 0 is unreachable from state " +
                                                     std::to_string(v));
}

namespace detail {

// Solves A x = b by Gaussian elimination with partial pivoting. A is consumed.
inline std::vector<double> solve_dense(Matrix a, std::vector<double> b) {
  const std::size_t n = a.rows();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    if (std::abs(a(piv, col)) < 1e-300) throw std::runtime_error("singular linear system");
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(col, c), a(piv, c));
      std::swap(b[col], b[piv]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a(i, c) * x[c];
    x[i] = s / a(i, i);
  }
  return x;
}

inline double balance_residual(const Matrix& p, const std::vector<double>& pi) {
  double worst = 0.0;
  for (std::size_t j = 0; j < p.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.rows(); ++i) s += pi[i] * p(i, j);
    worst = std::max(worst, std::abs(s - pi[j]));
  }
  return worst;
}

}  // namespace detail

// Stationary distribution of the embedded jump chain: pi P = pi, sum pi = 1,
// with the last balance equation replaced by the normalization.
inline StationaryDist embedded_stationary(const ChainModel& model) {
  const Matrix& p = model.trans;
  const std::size_t n = p.rows();
  require_irreducible(p);

  Matrix a(n, n);
  for (std::size_t j = 0; j + 1 < n; ++j)
    for (std::size_t i = 0; i < n; ++i) a(j, i) = p(i, j) - (i == j ? 1.0 : 0.0);
  for (std::size_t i = 0; i < n; ++i) a(n - 1, i) = 1.0;
  std::vector<double> b(n, 0.0);
  b[n - 1] = 1.0;

  StationaryDist out;
  out.pi = detail::solve_dense(std::move(a), std::move(b));
  double sum = 0.0;
  for (double& x : out.pi) {
    if (x < 0.0 && x > -1e-14) x = 0.0;
    sum += x;
  }
  for (double& x : out.pi) x /= sum;
  out.residual = detail::balance_residual(p, out.pi);
  if (!(out.residual < 1e-10)) throw std::runtime_error("stationary solve failed: residual too large");
  return out;
}

// Mean time per visit to G and to its complement as the chain alternates:
// pi-weighted sojourn mass of a side divided by the stationary per-jump
// entry rate into that side.
inline SojournReport stationary_sojourn(const ChainModel& model, const Partition& part) {
  const auto dist = embedded_stationary(model);
  const auto& pi = dist.pi;
  const std::size_t n = model.size();
  double mass_good = 0.0, mass_bad = 0.0, into_good = 0.0, into_bad = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    (part.good(i) ? mass_good : mass_bad) += pi[i] * model.sojourn[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (part.good(i) == part.good(j)) continue;
      (part.good(j) ? into_good : into_bad) += pi[i] * model.trans(i, j);
    }
  }
  if (!(into_good > 0.0) || !(into_bad > 0.0))
    throw NonAlternatingError("partition is not alternating: stationary entry rate is zero");

  SojournReport rep;
  rep.method = SojournMethod::stationary;
  rep.s_good = mass_good / into_good;
  rep.s_bad = mass_bad / into_bad;
  rep.stc = rep.s_good + rep.s_bad;
  rep.detail.residual = dist.residual;
  return rep;
}

// Sojourn totals along one traversal of a limit cycle.
inline SojournReport cycle_sojourn(const ChainModel& model, const Cycle& cycle, const Partition& part) {
  const auto& st = cycle.states();
  for (auto s : st)
    if (s >= model.size()) throw UnknownStateError("cycle contains unknown state index " + std::to_string(s));

  SojournReport rep;
  rep.method = SojournMethod::limit_cycle;
  std::size_t good_runs = 0, bad_runs = 0;
  for (std::size_t k = 0; k < st.size(); ++k) {
    const bool g = part.good(st[k]);
    (g ? rep.s_good : rep.s_bad) += model.sojourn[st[k]];
    if (g != part.good(st[(k + st.size() - 1) % st.size()])) (g ? good_runs : bad_runs) += 1;
  }
  rep.stc = rep.s_good + rep.s_bad;
  rep.detail.cycle = cycle;
  if (good_runs == 0 && bad_runs == 0) {
    rep.detail.note = part.good(st.front()) ? "cycle lies entirely inside G; s(Gc) set to 0"
                                            : "cycle lies entirely inside Gc; s(G) set to 0";
  } else if (good_runs > 1) {
    rep.detail.note = std::to_string(good_runs) + " G-runs per traversal; values are per-traversal totals";
  }
  return rep;
}

// Simulates the fixed embedded chain, charging each visit its mean sojourn
// time, and averages the time spent in each maximal run inside G and inside
// the complement. The first 10% of runs on each side are discarded.
inline SojournReport monte_carlo_sojourn(const ChainModel& model, const Partition& part, std::uint64_t seed,
                                         std::uint64_t entries) {
  if (entries < 100) throw std::invalid_argument("monte carlo sojourn needs at least 100 entries");
  require_irreducible(model.trans);

  // Welford running mean/variance.
  struct Acc {
    std::uint64_t n = 0;
    double mean = 0.0, m2 = 0.0;
    void add(double x) {
      ++n;
      const double d = x - mean;
      mean += d / static_cast<double>(n);
      m2 += d * (x - mean);
    }
    double se() const {
      if (n < 2) return 0.0;
      return std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
    }
  };

  Rng rng(seed);
  const std::uint64_t burn = entries / 10;
  StateIndex cur = 0;
  // Advance to the first side change so every counted run is complete.
  const bool start_side = part.good(cur);
  while (part.good(cur) == start_side) cur = point_to(model.trans.row(cur), rng.uniform());

  Acc good, bad;
  std::uint64_t good_seen = 0, bad_seen = 0;
  while (good_seen < entries) {
    const bool side = part.good(cur);
    double run = 0.0;
    while (part.good(cur) == side) {
      run += model.sojourn[cur];
      cur = point_to(model.trans.row(cur), rng.uniform());
    }
    if (side) {
      if (++good_seen > burn) good.add(run);
    } else {
      if (++bad_seen > burn) bad.add(run);
    }
  }

  SojournReport rep;
  rep.method = SojournMethod::monte_carlo;
  rep.s_good = good.mean;
  rep.s_bad = bad.mean;
  rep.stc = rep.s_good + rep.s_bad;
  rep.detail.replications = good.n;
  rep.detail.se_good = good.se();
  rep.detail.se_bad = bad.se();
  return rep;
}

}  // namespace mclim
