#include "normscape/qre.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace normscape {

double logistic(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::vector<double> logit_response(std::span<const double> utilities, double precision) {
  if (precision < 0.0) throw std::invalid_argument("logit precision must be >= 0");
  std::vector<double> p(utilities.size());
  if (utilities.empty()) return p;
  const double top = *std::max_element(utilities.begin(), utilities.end());
  double z = 0.0;
  for (std::size_t k = 0; k < utilities.size(); ++k) {
    p[k] = std::exp(precision * (utilities[k] - top));
    z += p[k];
  }
  for (auto& x : p) x /= z;
  return p;
}

double cooperate_response(const PayoffMatrix& m, double opponent_cooperate,
                          double precision) noexcept {
  const double q = opponent_cooperate;
  const double ec = q * m(Action::C, Action::C) + (1.0 - q) * m(Action::C, Action::D);
  const double ed = q * m(Action::D, Action::C) + (1.0 - q) * m(Action::D, Action::D);
  return logistic(precision * (ec - ed));
}

double fixed_point_residual(const PayoffMatrix& m1, const PayoffMatrix& m2, double precision1,
                            double precision2, double p1, double p2) noexcept {
  return std::max(std::abs(p1 - cooperate_response(m1, p2, precision1)),
                  std::abs(p2 - cooperate_response(m2, p1, precision2)));
}

namespace {

// Root of x - h(x) on [0, 1]; h maps into [0, 1], so the bracket always holds.
template <typename F>
double bisect_fixed_point(F&& h) {
  double lo = 0.0, hi = 1.0;
  if (h(lo) <= lo) return lo;
  if (h(hi) >= hi) return hi;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (mid - h(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

QreSolution bisection_solve(const PayoffMatrix& m1, const PayoffMatrix& m2, double precision1,
                            double precision2, std::size_t iterations_so_far) {
  QreSolution s;
  s.method = QreMethod::Bisection;
  s.iterations = iterations_so_far;
  if (m1 == m2 && precision1 == precision2) {
    // Symmetric game with identical players: stay on the symmetric branch.
    const double p = bisect_fixed_point([&](double x) { return cooperate_response(m1, x, precision1); });
    s.p1_cooperate = p;
    s.p2_cooperate = p;
  } else {
    const double p2 = bisect_fixed_point([&](double x) {
      return cooperate_response(m2, cooperate_response(m1, x, precision1), precision2);
    });
    s.p2_cooperate = p2;
    s.p1_cooperate = cooperate_response(m1, p2, precision1);
  }
  s.residual = fixed_point_residual(m1, m2, precision1, precision2, s.p1_cooperate, s.p2_cooperate);
  return s;
}

}  // namespace

QreSolution solve_2x2(const PayoffMatrix& m1, const PayoffMatrix& m2, double precision1,
                      double precision2, const QreOptions& opts) {
  if (precision1 < 0.0 || precision2 < 0.0) {
    throw std::invalid_argument("QRE precisions must be >= 0");
  }
  double p1 = 0.5, p2 = 0.5;
  double damping = opts.damping;
  double previous = std::numeric_limits<double>::infinity();
  QreSolution last;
  for (std::size_t it = 0; it < opts.max_iterations; ++it) {
    const double b1 = cooperate_response(m1, p2, precision1);
    const double b2 = cooperate_response(m2, p1, precision2);
    const double residual = std::max(std::abs(p1 - b1), std::abs(p2 - b2));
    last = {p1, p2, it, residual, QreMethod::DampedIteration};
    if (!std::isfinite(residual)) break;
    if (residual <= opts.tolerance) return last;
    if (residual > previous) damping = std::max(opts.min_damping, 0.5 * damping);
    previous = residual;
    p1 += damping * (b1 - p1);
    p2 += damping * (b2 - p2);
  }
  if (opts.allow_bisection_fallback && std::isfinite(last.residual)) {
    QreSolution s = bisection_solve(m1, m2, precision1, precision2, opts.max_iterations);
    if (s.residual <= opts.tolerance) return s;
    last = s;
  }
  throw NoConvergence("logit QRE did not converge: residual " + std::to_string(last.residual),
                      last);
}

}  // namespace normscape
