#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "normscape/game_space.hpp"
#include "normscape/qre.hpp"
#include "normscape/utility.hpp"

namespace normscape {

// Lognormal heterogeneity of precision (lambda) and risk sensitivity (eta), in log space.
struct TraitDistributions {
  double mu_lambda = 1.0;
  double sigma_lambda = 0.5;
  double mu_eta = 1.4;
  double sigma_eta = 0.5;

  void validate() const;
};

struct QuadratureRule {
  std::vector<double> values;
  std::vector<double> weights;
};

// Physicists' Gauss-Hermite nodes and weights for the weight function exp(-x^2).
QuadratureRule gauss_hermite_rule(std::size_t n);

// Nodes exp(mu + sqrt(2) sigma xi_i) with weights w_i / sqrt(pi): an n-point rule for the
// expectation of a function of a LogNormal(mu, sigma^2) variable. Weights sum to one.
QuadratureRule gh_nodes(std::size_t n, double mu, double sigma);

// Cooperation probability of two identical agents of type (lambda, eta) in game g.
// The matrix is mean-normalized and valued through `family` instantiated at eta.
QreSolution symmetric_type_response(const Game& g, double lambda, double eta,
                                    const UtilityModel& family, const QreOptions& qre = {});

struct SolveDiagnostics {
  std::size_t solves = 0;
  std::size_t bisection_fallbacks = 0;
  std::size_t failures = 0;  // last iterate substituted

  SolveDiagnostics& operator+=(const SolveDiagnostics& o) {
    solves += o.solves;
    bisection_fallbacks += o.bisection_fallbacks;
    failures += o.failures;
    return *this;
  }
};

struct AggregateResult {
  double cooperation = 0.5;
  SolveDiagnostics diagnostics;
};

// Population-average cooperation S(g): quadrature over the lambda x eta node grid.
AggregateResult aggregate_S(const Game& g, const TraitDistributions& dists,
                            const UtilityModel& family, std::size_t nodes = 5,
                            const QreOptions& qre = {});

// Expected material payoff of a g-player meeting a g2-player, using g's raw payoffs (1, U, V, 0).
double fitness_K(const Game& g, double sg, const Game& g2, double sg2) noexcept;

struct GridSpec {
  GameBounds bounds;
  std::size_t u_points = 51;
  std::size_t v_points = 51;

  void validate() const;
  std::size_t size() const noexcept { return u_points * v_points; }
  std::size_t index(std::size_t i, std::size_t j) const noexcept { return i * v_points + j; }
  double du() const noexcept;
  double dv() const noexcept;
  Game point(std::size_t i, std::size_t j) const noexcept;
  Game point(std::size_t idx) const noexcept { return point(idx / v_points, idx % v_points); }
};

struct Attractor {
  Game game;
  double phi = 0.0;
  double gradient_norm = 0.0;  // projected onto the feasible box
  std::size_t index = 0;
};

// Fields are stored row-major with U as the slow axis: index(i, j) = i * v_points + j.
struct Landscape {
  GridSpec grid;
  std::vector<double> cooperation;  // S
  std::vector<double> fitness;      // Phi
  std::vector<double> grad_u;
  std::vector<double> grad_v;
  std::vector<Attractor> attractors;
  SolveDiagnostics diagnostics;

  // Builds a landscape around a given fitness field (used for synthetic fields and tests).
  static Landscape from_fitness(const GridSpec& grid, std::vector<double> fitness);
  // Phi and gradient from a cooperation field, with uniform matching over the grid.
  static Landscape from_cooperation(const GridSpec& grid, std::vector<double> cooperation);

  std::size_t argmax() const;
};

// Central differences in the interior, one-sided differences on the boundary.
void fill_gradient(Landscape& l);

struct AttractorOptions {
  // Absolute gradient threshold; when unset, epsilon_fraction * max |grad Phi| is used.
  std::optional<double> epsilon;
  double epsilon_fraction = 0.05;
  // Ignore gradient components that point out of the box at boundary points.
  bool project_boundary = true;
  // Additionally require a negative definite finite-difference Hessian (interior points only).
  bool hessian_check = false;
};

double resolve_epsilon(const Landscape& l, const AttractorOptions& opts);

// Gradient with outward components zeroed on the boundary of the box.
std::pair<double, double> projected_gradient(const Landscape& l, std::size_t idx);

// Strict 8-neighbour maxima with |grad Phi| < epsilon, sorted by Phi descending.
std::vector<Attractor> find_attractors(const Landscape& l, const AttractorOptions& opts = {});

struct LandscapeOptions {
  std::size_t nodes = 5;
  QreOptions qre;
  AttractorOptions attractors;
  std::size_t threads = 0;
};

Landscape compute_landscape(const GridSpec& grid, const TraitDistributions& dists,
                            const UtilityModel& family, const LandscapeOptions& opts = {});

struct TrajectoryPoint {
  double mu_eta = 0.0;
  double mu_lambda = 0.0;
  Game attractor;
  double phi = 0.0;
  bool is_attractor = true;  // false when no point passed the test and argmax Phi is reported
  Game perceived;
  SolveDiagnostics diagnostics;
};

// For each (mu_eta, mu_lambda) waypoint: recompute the landscape, report the dominant attractor
// and its image in the subjective plane at eta = exp(mu_eta).
std::vector<TrajectoryPoint> trajectory(const std::vector<std::pair<double, double>>& loop,
                                        const GridSpec& grid, const TraitDistributions& base,
                                        const UtilityModel& family,
                                        const LandscapeOptions& opts = {});

void write_landscape_csv(std::ostream& os, const Landscape& l);

}  // namespace normscape
