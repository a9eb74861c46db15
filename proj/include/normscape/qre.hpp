#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "normscape/game_space.hpp"

namespace normscape {

struct QreOptions {
  double tolerance = 1e-10;
  double damping = 0.5;
  std::size_t max_iterations = 10000;
  // Damping is halved whenever the residual grows, down to this floor.
  double min_damping = 1.0 / 64.0;
  // When damped iteration stalls, solve the reduced one-dimensional fixed point by bisection.
  bool allow_bisection_fallback = true;
};

enum class QreMethod { DampedIteration, Bisection };

struct QreSolution {
  double p1_cooperate = 0.5;
  double p2_cooperate = 0.5;
  std::size_t iterations = 0;
  double residual = 0.0;
  QreMethod method = QreMethod::DampedIteration;
};

class NoConvergence : public std::runtime_error {
 public:
  NoConvergence(const std::string& what, QreSolution last)
      : std::runtime_error(what), last_(last) {}
  const QreSolution& last_iterate() const noexcept { return last_; }

 private:
  QreSolution last_;
};

// Numerically stable 1 / (1 + exp(-x)).
double logistic(double x) noexcept;

// Softmax with inverse temperature `precision`, max-subtracted before exponentiation.
std::vector<double> logit_response(std::span<const double> utilities, double precision);

// Probability that a player with subjective matrix `m` (rows = own action) cooperates
// against an opponent who cooperates with probability `opponent_cooperate`.
double cooperate_response(const PayoffMatrix& m, double opponent_cooperate, double precision) noexcept;

// Largest violation of the two coupled logit equations at (p1, p2).
double fixed_point_residual(const PayoffMatrix& m1, const PayoffMatrix& m2, double precision1,
                            double precision2, double p1, double p2) noexcept;

// Logit QRE of a 2x2 game. m1 and m2 are each player's subjective matrix with rows indexed by
// that player's own action. Damped fixed-point iteration from (0.5, 0.5). Throws NoConvergence.
QreSolution solve_2x2(const PayoffMatrix& m1, const PayoffMatrix& m2, double precision1,
                      double precision2, const QreOptions& opts = {});

}  // namespace normscape
