#pragma once

// Shared fixtures and test-only oracles. Nothing here calls into the code
// paths it is used to check.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "mclim/mclim.hpp"

namespace mclim::testing {

inline std::string model_path(const std::string& name) { return std::string(MCLIM_MODELS_DIR) + "/" + name; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline ChainModel load(const std::string& name) { return parse_model(slurp(model_path(name))); }

// Exact stationary s(G) of the healthcare model, from a rational solve of
// the balance equations: 36947/1536.
inline constexpr double kHealthcareStationaryGood = 36947.0 / 1536.0;

// Dense random chain with zero diagonal. Each off-diagonal cell is kept with
// probability `density` (at least one per row, and the cyclic successor
// i -> i+1 is always kept so the chain is irreducible). Continuous weights
// make tied maxima a probability-zero event; rows with a tie are reweighted.
inline ChainModel random_chain(std::size_t n, std::uint64_t seed, double density = 0.6, std::string prefix = "S") {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ChainModel m;
  for (std::size_t i = 0; i < n; ++i) {
    m.names.push_back(prefix + std::to_string(i + 1));
    m.sojourn.push_back(0.5 + 10.0 * u(gen));
  }
  m.trans = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (;;) {
      double sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        m.trans(i, j) = 0.0;
        if (j == i) continue;
        if (j == (i + 1) % n || u(gen) < density) m.trans(i, j) = 0.05 + u(gen);
        sum += m.trans(i, j);
      }
      for (std::size_t j = 0; j < n; ++j) m.trans(i, j) /= sum;
      if (argmax_columns(m.trans.row(i)).size() == 1) break;
    }
  }
  return m;
}

// The 50-state maintenance-style model: 20 expensive states E1..E20 followed
// by 30 cheaper states N1..N30.
inline ChainModel maintenance_model(std::uint64_t seed = 20240917) {
  ChainModel m = random_chain(50, seed, 0.3);
  for (std::size_t i = 0; i < 50; ++i) m.names[i] = i < 20 ? "E" + std::to_string(i + 1) : "N" + std::to_string(i - 19);
  return m;
}

// Random probability vector of length n with zero at `zero_at` (pass n for none).
inline std::vector<double> random_row(std::mt19937_64& gen, std::size_t n, std::size_t zero_at) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> row(n);
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    row[j] = j == zero_at ? 0.0 : 0.01 + u(gen);
    sum += row[j];
  }
  for (double& x : row) x /= sum;
  return row;
}

// Power iteration on the lazy chain (I + P)/2, which has the same stationary
// vector as P but is aperiodic.
inline std::vector<double> power_iteration_stationary(const Matrix& p, int max_iter = 1'000'000, double tol = 1e-15) {
  const std::size_t n = p.rows();
  std::vector<double> pi(n, 1.0 / static_cast<double>(n)), next(n);
  for (int it = 0; it < max_iter; ++it) {
    for (std::size_t j = 0; j < n; ++j) next[j] = 0.5 * pi[j];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) next[j] += 0.5 * pi[i] * p(i, j);
    double diff = 0.0;
    for (std::size_t j = 0; j < n; ++j) diff = std::max(diff, std::abs(next[j] - pi[j]));
    pi.swap(next);
    if (diff < tol) break;
  }
  return pi;
}

// Literal update: multiply the chosen cell by 1+eps, divide the row by its sum.
inline std::vector<double> reinforce_by_row_sum(std::vector<double> row, std::size_t j, double epsilon) {
  row[j] *= 1.0 + epsilon;
  double sum = 0.0;
  for (double x : row) sum += x;
  for (double& x : row) x /= sum;
  return row;
}

}  // namespace mclim::testing
