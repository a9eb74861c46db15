#include <doctest.h>

#include <cmath>
#include <random>

#include "normscape/game_space.hpp"
#include "normscape/qre.hpp"
#include "normscape/utility.hpp"

using namespace normscape;

namespace {

PayoffMatrix raw(const Game& g) { return payoff_matrices(g, false).first; }

// Symmetric branch by bisection on p = 1 / (1 + exp(-lambda (E_C(p) - E_D(p)))).
double symmetric_oracle(const PayoffMatrix& m, double lambda, double lo, double hi) {
  const auto f = [&](double p) {
    const double ec = p * m.entries[0][0] + (1 - p) * m.entries[0][1];
    const double ed = p * m.entries[1][0] + (1 - p) * m.entries[1][1];
    return 1.0 / (1.0 + std::exp(-lambda * (ec - ed))) - p;
  };
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    if ((f(lo) > 0) == (f(mid) > 0)) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_SUITE("qre") {
  TEST_CASE("logit response") {
    const std::vector<double> u{1.0, 0.0, -2.0};
    const auto flat = logit_response(u, 0.0);
    for (const double p : flat) CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    const auto two = logit_response(std::vector<double>{1.0, 0.0}, 2.0);
    CHECK(two[0] == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))).epsilon(1e-14));
    CHECK(two[0] == doctest::Approx(0.8808).epsilon(1e-4));
    CHECK(two[1] == doctest::Approx(0.1192).epsilon(1e-3));
    const auto shifted = logit_response(std::vector<double>{1001.0, 1000.0}, 2.0);
    CHECK(shifted[0] == doctest::Approx(two[0]).epsilon(1e-14));
    const auto huge = logit_response(std::vector<double>{1e6, 0.0}, 1e3);
    CHECK(huge[0] == 1.0);
    CHECK(std::isfinite(huge[1]));
    CHECK(logistic(-800.0) >= 0.0);
    CHECK(logistic(800.0) == 1.0);
  }

  TEST_CASE("zero precision gives uniform play exactly") {
    const auto m = raw({-0.5, 1.5});
    const QreSolution s = solve_2x2(m, m, 0.0, 0.0);
    CHECK(s.p1_cooperate == 0.5);
    CHECK(s.p2_cooperate == 0.5);
  }

  TEST_CASE("dominant defection at high precision") {
    const auto m = raw({-0.5, 1.5});
    const QreSolution s = solve_2x2(m, m, 50.0, 50.0);
    CHECK(s.p1_cooperate < 0.01);
    CHECK(s.p2_cooperate < 0.01);
    CHECK(s.residual <= 1e-10);
    CHECK(fixed_point_residual(m, m, 50, 50, s.p1_cooperate, s.p2_cooperate) <= 1e-10);
  }

  TEST_CASE("coordination game matches the scalar bisection oracle") {
    const auto m = raw({-0.5, -0.5});
    const QreSolution s = solve_2x2(m, m, 3.0, 3.0);
    const double p = symmetric_oracle(m, 3.0, 0.0, 1.0);
    CHECK(s.p1_cooperate == doctest::Approx(p).epsilon(1e-9));
    CHECK(s.p2_cooperate == doctest::Approx(p).epsilon(1e-9));
  }

  TEST_CASE("returned points are fixed points, interior and symmetric when the game is") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> uv(-1, 2), lam(0, 10);
    for (int k = 0; k < 300; ++k) {
      const Game g1{uv(gen), uv(gen)}, g2{uv(gen), uv(gen)};
      const auto u1 = UtilityModel::linex(0.5 + lam(gen) / 5);
      const auto m1 = apply_to_matrix(u1, payoff_matrices(g1, true).first);
      const auto m2 = apply_to_matrix(UtilityModel::prospect(1.0, 2.0), payoff_matrices(g2, true).first);
      const double l1 = lam(gen), l2 = lam(gen);
      const QreSolution s = solve_2x2(m1, m2, l1, l2);
      CHECK(fixed_point_residual(m1, m2, l1, l2, s.p1_cooperate, s.p2_cooperate) <= 1e-10);
      CHECK(s.p1_cooperate > 0.0);
      CHECK(s.p1_cooperate < 1.0);
      CHECK(s.p2_cooperate > 0.0);
      CHECK(s.p2_cooperate < 1.0);
      const QreSolution sym = solve_2x2(m1, m1, l1, l1);
      CHECK(std::abs(sym.p1_cooperate - sym.p2_cooperate) < 1e-9);
    }
  }

  TEST_CASE("cooperation rises with precision when it dominates") {
    const auto m = raw({0.5, 0.5});  // 1 > V and U > 0: C strictly dominant
    double last = 0.5;
    for (const double lambda : {0.5, 1.0, 2.0, 4.0, 8.0}) {
      const QreSolution s = solve_2x2(m, raw({-0.5, 1.5}), lambda, 1.0);
      CHECK(s.p1_cooperate > last);
      last = s.p1_cooperate;
    }
  }

  TEST_CASE("solutions are continuous in payoffs away from bifurcations") {
    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> uv(-1, 2), lam(0, 10), eps(-1e-3, 1e-3);
    for (int k = 0; k < 200; ++k) {
      const Game g{uv(gen), uv(gen)};
      const double l = lam(gen);
      const auto m = raw(g);
      const auto mp = raw({g.u + eps(gen), g.v + eps(gen)});
      const QreSolution a = solve_2x2(m, m, l, l);
      const QreSolution b = solve_2x2(mp, mp, l, l);
      CHECK(std::abs(a.p1_cooperate - b.p1_cooperate) < 0.05);
    }
  }

  TEST_CASE("asymmetric high-precision games fall back and still converge") {
    // Player 1 wants to match, player 2 to mismatch: damped iteration cycles at high precision.
    PayoffMatrix match, mismatch;
    match.entries = {{{1, 0}, {0, 1}}};
    mismatch.entries = {{{0, 1}, {1, 0}}};
    const QreSolution s = solve_2x2(match, mismatch, 40.0, 40.0);
    CHECK(s.residual <= 1e-10);
    CHECK(s.p1_cooperate == doctest::Approx(0.5).epsilon(1e-6));
  }

  TEST_CASE("failure is reported with the last iterate") {
    const auto m = raw({-0.5, -0.5});
    QreOptions opts;
    opts.max_iterations = 2;
    opts.allow_bisection_fallback = false;
    bool thrown = false;
    try {
      solve_2x2(m, m, 5.0, 5.0, opts);
    } catch (const NoConvergence& e) {
      thrown = true;
      CHECK(e.last_iterate().residual > opts.tolerance);
      CHECK(e.last_iterate().p1_cooperate > 0.5);
    }
    CHECK(thrown);
  }
}
