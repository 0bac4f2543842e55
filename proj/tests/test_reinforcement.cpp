#include <catch_amalgamated.hpp>

#include <cmath>

#include "support.hpp"

using namespace mclim;
using Catch::Matchers::WithinAbs;

namespace {
const std::vector<double> kSixStateRow1{0, 1.0 / 2, 0, 0, 1.0 / 3, 1.0 / 6};
}

TEST_CASE("point_to follows cumulative sums", "[reinforcement]") {
  CHECK(point_to(kSixStateRow1, 0.4) == 1);
  CHECK(point_to(kSixStateRow1, 0.5) == 1);
  CHECK(point_to(kSixStateRow1, 0.51) == 4);
  CHECK(point_to(kSixStateRow1, 1.0) == 5);
  CHECK(point_to(std::vector<double>{0, 0.5, 0.5}, 0.5) == 1);
  // r = 0 maps to the first positive column, never a zero cell
  CHECK(point_to(kSixStateRow1, 0.0) == 1);
  CHECK(point_to(std::vector<double>{0, 0, 1}, 0.0) == 2);
}

TEST_CASE("point_to frequencies match the row", "[reinforcement][property]") {
  Rng rng(7);
  const std::size_t draws = 100'000;
  std::vector<double> count(kSixStateRow1.size(), 0.0);
  for (std::size_t k = 0; k < draws; ++k) count[point_to(kSixStateRow1, rng.uniform())] += 1.0;
  for (std::size_t j = 0; j < kSixStateRow1.size(); ++j) {
    const double p = kSixStateRow1[j];
    const double se = std::sqrt(p * (1 - p) / draws);
    INFO("column " << j);
    CHECK(std::abs(count[j] / draws - p) <= 3 * se);
    if (p == 0.0) CHECK(count[j] == 0.0);
  }
}

TEST_CASE("reinforce closed form", "[reinforcement]") {
  const auto out = reinforce(std::vector<double>{0, 0.5, 0.5}, 1, 0.1);
  CHECK(out[0] == 0.0);
  CHECK_THAT(out[1], WithinAbs(11.0 / 21.0, 1e-15));
  CHECK_THAT(out[2], WithinAbs(10.0 / 21.0, 1e-15));

  CHECK(reinforce(kSixStateRow1, 4, 0.0) == kSixStateRow1);
  CHECK(reinforce(std::vector<double>{0, 1}, 1, 0.7) == std::vector<double>{0, 1});
  CHECK_THROWS_AS(reinforce(kSixStateRow1, 2, 0.1), std::invalid_argument);
}

TEST_CASE("closed form equals the literal row-sum update", "[reinforcement][property]") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.001, 0.999);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 2 + t % 9;
    const auto row = testing::random_row(gen, n, t % n);
    const std::size_t j = (t + 1) % n;
    const double eps = u(gen);
    const auto a = reinforce(row, j, eps);
    const auto b = testing::reinforce_by_row_sum(row, j, eps);
    for (std::size_t k = 0; k < n; ++k) CHECK_THAT(a[k], WithinAbs(b[k], 1e-15));
  }
}

TEST_CASE("two_step_closed_form", "[reinforcement]") {
  auto [a, b] = two_step_closed_form(0.5, 0.25, 0.1);
  CHECK_THAT(a, WithinAbs(22.0 / 43.0, 1e-15));
  CHECK_THAT(b, WithinAbs(11.0 / 43.0, 1e-15));
  auto [c, d] = two_step_closed_form(0.3, 0.3, 0.4);
  CHECK(c == d);
}

TEST_CASE("two reinforcements commute and match the closed form", "[reinforcement][property]") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.001, 0.999);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 3 + t % 8;
    const auto row = testing::random_row(gen, n, 0);
    const std::size_t j1 = 1 + t % (n - 1), j2 = 1 + (t / 3 + 1) % (n - 1);
    if (j1 == j2) continue;
    const double eps = u(gen);
    const auto ab = reinforce(reinforce(row, j1, eps), j2, eps);
    const auto ba = reinforce(reinforce(row, j2, eps), j1, eps);
    for (std::size_t k = 0; k < n; ++k) CHECK_THAT(ab[k], WithinAbs(ba[k], 1e-12));
    const auto [p1, p2] = two_step_closed_form(row[j1], row[j2], eps);
    CHECK_THAT(ab[j1], WithinAbs(p1, 1e-12));
    CHECK_THAT(ab[j2], WithinAbs(p2, 1e-12));
    CHECK((ab[j1] >= ab[j2]) == (row[j1] >= row[j2]));
  }
}

TEST_CASE("fixed point iteration", "[reinforcement]") {
  CHECK_THAT(fixed_point_iterate(0.5, 1.0, 3), WithinAbs(8.0 / 9.0, 1e-15));
  CHECK(fixed_point_iterate(0.0, 0.3, 100) == 0.0);
  CHECK(fixed_point_iterate(1.0, 0.3, 100) == 1.0);
  for (std::uint64_t k = 0; k <= 40; ++k) {
    const double two_k = std::ldexp(1.0, static_cast<int>(k));
    CHECK_THAT(fixed_point_iterate(0.5, 1.0, k), WithinAbs(two_k / (two_k + 1.0), 1e-12));
  }
}

TEST_CASE("step on known rows", "[reinforcement]") {
  SECTION("swap model moves to the other state and stays at 1") {
    const auto m = testing::load("swap.model");
    SimState s(m, 0, 5);
    CHECK(step(s, 0.3) == 1);
    CHECK(s.trans(0, 1) == 1.0);
    CHECK(step(s, 0.3) == 0);
    CHECK(s.events == 2);
  }
  SECTION("draw 0.05 from state 4 of the six-state example picks state 5") {
    const auto m = testing::load("six_state.model");
    const auto row = m.trans.row(3);
    CHECK(point_to(row, 0.05) == 4);
    const auto after = reinforce(row, 4, 0.05);
    const double p = 1.0 / 9.0;
    CHECK_THAT(after[4], WithinAbs(1.05 * p / (1 + 0.05 * p), 1e-15));
  }
  SECTION("same seed, same sequence") {
    const auto m = testing::load("six_state.model");
    SimState a(m, 1, 99), b(m, 1, 99);
    for (int k = 0; k < 1000; ++k) {
      step(a, 0.05);
      step(b, 0.05);
    }
    CHECK(a == b);
  }
}

TEST_CASE("stochasticity is preserved at every event", "[reinforcement][property]") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto m = testing::random_chain(8, seed + 100, 0.5);
    SimState s(m, 0, seed);
    for (int k = 0; k < 20'000; ++k) {
      const StateIndex from = s.current;
      step(s, 0.1);
      double sum = 0.0;
      for (std::size_t j = 0; j < 8; ++j) {
        sum += s.trans(from, j);
        if (m.trans(from, j) == 0.0) REQUIRE(s.trans(from, j) == 0.0);
      }
      REQUIRE(s.trans(from, from) == 0.0);
      REQUIRE(std::abs(sum - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("run convergence", "[reinforcement]") {
  SECTION("swap converges at the first eligible check") {
    const auto m = testing::load("swap.model");
    SimConfig cfg;
    const auto r = run(m, cfg);
    CHECK(r.converged);
    REQUIRE(r.realized);
    CHECK(r.realized->states() == std::vector<StateIndex>{0, 1});
    CHECK(r.events_used == 19);
  }
  SECTION("one event cannot converge") {
    const auto m = testing::load("six_state.model");
    SimConfig cfg;
    cfg.max_events = 1;
    const auto r = run(m, cfg);
    CHECK_FALSE(r.converged);
    CHECK_FALSE(r.realized);
    CHECK(r.events_used == 1);
  }
  SECTION("converged cycle is concentrated") {
    const auto m = testing::load("six_state.model");
    SimConfig cfg;
    cfg.seed = 42;
    cfg.start = 1;
    const auto r = run(m, cfg);
    REQUIRE(r.converged);
    for (auto s : r.realized->states()) CHECK(r.final_trans(s, r.realized->successor(s)) >= 1 - cfg.delta);
    CHECK(run(m, cfg) == r);
  }
  SECTION("config checks") {
    const auto m = testing::load("swap.model");
    SimConfig cfg;
    cfg.epsilon = 1.0;
    CHECK_THROWS_AS(run(m, cfg), std::invalid_argument);
    cfg = {};
    cfg.delta = 0.5;
    CHECK_THROWS_AS(run(m, cfg), std::invalid_argument);
    cfg = {};
    cfg.start = 2;
    CHECK_THROWS_AS(run(m, cfg), std::invalid_argument);
  }
}

TEST_CASE("history ring keeps the newest entries", "[reinforcement]") {
  History h(3);
  for (StateIndex s = 0; s < 5; ++s) h.push(s);
  CHECK(h.size() == 3);
  CHECK(h.back(0) == 4);
  CHECK(h.back(2) == 2);
}
