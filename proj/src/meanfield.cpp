#include "normscape/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "normscape/csv.hpp"
#include "normscape/parallel.hpp"

namespace normscape {

void TraitDistributions::validate() const {
  if (!(sigma_lambda > 0.0) || !(sigma_eta > 0.0)) {
    throw std::invalid_argument("trait distributions need sigma_lambda > 0 and sigma_eta > 0");
  }
  if (!std::isfinite(mu_lambda) || !std::isfinite(mu_eta) || !std::isfinite(sigma_lambda) ||
      !std::isfinite(sigma_eta)) {
    throw std::invalid_argument("trait distribution parameters must be finite");
  }
}

QuadratureRule gauss_hermite_rule(std::size_t n) {
  if (n == 0) throw std::invalid_argument("Gauss-Hermite rule needs n >= 1");
  // Newton iteration on orthonormal Hermite polynomials with the usual asymptotic initial guesses.
  constexpr double pim4 = 0.7511255444649425;  // pi^(-1/4)
  constexpr double eps = 1e-15;
  const double nd = static_cast<double>(n);
  std::vector<double> x(n), w(n);
  const std::size_t m = (n + 1) / 2;
  double z = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * nd + 1.0) - 1.85575 * std::pow(2.0 * nd + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(nd, 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * x[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * x[1];
    } else {
      z = 2.0 * z - x[i - 2];
    }
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = pim4, p2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double jd = static_cast<double>(j);
        p1 = z * std::sqrt(2.0 / (jd + 1.0)) * p2 - std::sqrt(jd / (jd + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * nd) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= eps * std::max(1.0, std::abs(z))) break;
    }
    if (n % 2 == 1 && i == m - 1) z = 0.0;  // middle node of odd rules is exactly 0
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = 2.0 / (pp * pp);
    w[n - 1 - i] = w[i];
  }
  // Ascending order.
  std::reverse(x.begin(), x.end());
  std::reverse(w.begin(), w.end());
  return {std::move(x), std::move(w)};
}

QuadratureRule gh_nodes(std::size_t n, double mu, double sigma) {
  QuadratureRule rule = gauss_hermite_rule(n);
  const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
  for (std::size_t i = 0; i < n; ++i) {
    rule.values[i] = std::exp(mu + std::numbers::sqrt2 * sigma * rule.values[i]);
    rule.weights[i] *= inv_sqrt_pi;
  }
  return rule;
}

QreSolution symmetric_type_response(const Game& g, double lambda, double eta,
                                    const UtilityModel& family, const QreOptions& qre) {
  const auto [row, col] = payoff_matrices(g, /*normalize=*/true);
  const PayoffMatrix subjective = apply_to_matrix(family.with_eta(eta), row);
  return solve_2x2(subjective, subjective, lambda, lambda, qre);
}

namespace {

void record(SolveDiagnostics& d, const QreSolution& s) {
  ++d.solves;
  if (s.method == QreMethod::Bisection) ++d.bisection_fallbacks;
}

double solve_counted(const Game& g, double lambda, double eta, const UtilityModel& family,
                     const QreOptions& qre, SolveDiagnostics& diag) {
  try {
    const QreSolution s = symmetric_type_response(g, lambda, eta, family, qre);
    record(diag, s);
    return s.p1_cooperate;
  } catch (const NoConvergence& e) {
    ++diag.solves;
    ++diag.failures;
    return e.last_iterate().p1_cooperate;
  }
}

}  // namespace

AggregateResult aggregate_S(const Game& g, const TraitDistributions& dists,
                            const UtilityModel& family, std::size_t nodes,
                            const QreOptions& qre) {
  dists.validate();
  const QuadratureRule lam = gh_nodes(nodes, dists.mu_lambda, dists.sigma_lambda);
  AggregateResult out;
  double s = 0.0;
  if (family.kind == UtilityKind::RiskNeutral) {
    // eta does not enter; the eta weights sum to one.
    for (std::size_t i = 0; i < nodes; ++i) {
      s += lam.weights[i] * solve_counted(g, lam.values[i], 0.0, family, qre, out.diagnostics);
    }
  } else {
    const QuadratureRule eta = gh_nodes(nodes, dists.mu_eta, dists.sigma_eta);
    for (std::size_t i = 0; i < nodes; ++i) {
      for (std::size_t j = 0; j < nodes; ++j) {
        s += lam.weights[i] * eta.weights[j] *
             solve_counted(g, lam.values[i], eta.values[j], family, qre, out.diagnostics);
      }
    }
  }
  out.cooperation = std::clamp(s, 0.0, 1.0);
  return out;
}

double fitness_K(const Game& g, double sg, const Game& /*g2*/, double sg2) noexcept {
  return sg * sg2 * 1.0 + sg * (1.0 - sg2) * g.u + (1.0 - sg) * sg2 * g.v;
}

void GridSpec::validate() const {
  if (u_points < 3 || v_points < 3) throw std::invalid_argument("grid needs >= 3 points per axis");
  if (!(bounds.u_max > bounds.u_min) || !(bounds.v_max > bounds.v_min)) {
    throw std::invalid_argument("grid bounds must satisfy min < max");
  }
}

double GridSpec::du() const noexcept {
  return (bounds.u_max - bounds.u_min) / static_cast<double>(u_points - 1);
}

double GridSpec::dv() const noexcept {
  return (bounds.v_max - bounds.v_min) / static_cast<double>(v_points - 1);
}

Game GridSpec::point(std::size_t i, std::size_t j) const noexcept {
  // Endpoints hit the bounds exactly.
  const double u = i + 1 == u_points ? bounds.u_max : bounds.u_min + du() * static_cast<double>(i);
  const double v = j + 1 == v_points ? bounds.v_max : bounds.v_min + dv() * static_cast<double>(j);
  return {u, v};
}

void fill_gradient(Landscape& l) {
  const GridSpec& g = l.grid;
  const std::size_t nu = g.u_points, nv = g.v_points;
  l.grad_u.assign(g.size(), 0.0);
  l.grad_v.assign(g.size(), 0.0);
  const double du = g.du(), dv = g.dv();
  const auto& f = l.fitness;
  for (std::size_t i = 0; i < nu; ++i) {
    for (std::size_t j = 0; j < nv; ++j) {
      const std::size_t k = g.index(i, j);
      if (i == 0) {
        l.grad_u[k] = (f[g.index(1, j)] - f[k]) / du;
      } else if (i + 1 == nu) {
        l.grad_u[k] = (f[k] - f[g.index(i - 1, j)]) / du;
      } else {
        l.grad_u[k] = (f[g.index(i + 1, j)] - f[g.index(i - 1, j)]) / (2.0 * du);
      }
      if (j == 0) {
        l.grad_v[k] = (f[g.index(i, 1)] - f[k]) / dv;
      } else if (j + 1 == nv) {
        l.grad_v[k] = (f[k] - f[g.index(i, j - 1)]) / dv;
      } else {
        l.grad_v[k] = (f[g.index(i, j + 1)] - f[g.index(i, j - 1)]) / (2.0 * dv);
      }
    }
  }
}

Landscape Landscape::from_fitness(const GridSpec& grid, std::vector<double> fitness) {
  grid.validate();
  if (fitness.size() != grid.size()) throw std::invalid_argument("fitness field size mismatch");
  Landscape l;
  l.grid = grid;
  l.fitness = std::move(fitness);
  fill_gradient(l);
  return l;
}

Landscape Landscape::from_cooperation(const GridSpec& grid, std::vector<double> cooperation) {
  grid.validate();
  if (cooperation.size() != grid.size()) {
    throw std::invalid_argument("cooperation field size mismatch");
  }
  // K is bilinear, so the mean over opponents only needs the mean cooperation level.
  const double s_bar = std::accumulate(cooperation.begin(), cooperation.end(), 0.0) /
                       static_cast<double>(cooperation.size());
  std::vector<double> phi(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Game g = grid.point(k);
    const double s = cooperation[k];
    phi[k] = s * s_bar + s * (1.0 - s_bar) * g.u + (1.0 - s) * s_bar * g.v;
  }
  Landscape l = from_fitness(grid, std::move(phi));
  l.cooperation = std::move(cooperation);
  return l;
}

std::size_t Landscape::argmax() const {
  return static_cast<std::size_t>(
      std::distance(fitness.begin(), std::max_element(fitness.begin(), fitness.end())));
}

std::pair<double, double> projected_gradient(const Landscape& l, std::size_t idx) {
  const std::size_t i = idx / l.grid.v_points, j = idx % l.grid.v_points;
  double gu = l.grad_u[idx], gv = l.grad_v[idx];
  if ((i == 0 && gu < 0.0) || (i + 1 == l.grid.u_points && gu > 0.0)) gu = 0.0;
  if ((j == 0 && gv < 0.0) || (j + 1 == l.grid.v_points && gv > 0.0)) gv = 0.0;
  return {gu, gv};
}

double resolve_epsilon(const Landscape& l, const AttractorOptions& opts) {
  if (opts.epsilon) return *opts.epsilon;
  double max_norm = 0.0;
  for (std::size_t k = 0; k < l.fitness.size(); ++k) {
    max_norm = std::max(max_norm, std::hypot(l.grad_u[k], l.grad_v[k]));
  }
  return opts.epsilon_fraction * max_norm;
}

namespace {

bool negative_definite_hessian(const Landscape& l, std::size_t i, std::size_t j) {
  const GridSpec& g = l.grid;
  if (i == 0 || j == 0 || i + 1 == g.u_points || j + 1 == g.v_points) return true;
  const auto f = [&](std::size_t a, std::size_t b) { return l.fitness[g.index(a, b)]; };
  const double du = g.du(), dv = g.dv();
  const double huu = (f(i + 1, j) - 2.0 * f(i, j) + f(i - 1, j)) / (du * du);
  const double hvv = (f(i, j + 1) - 2.0 * f(i, j) + f(i, j - 1)) / (dv * dv);
  const double huv =
      (f(i + 1, j + 1) - f(i + 1, j - 1) - f(i - 1, j + 1) + f(i - 1, j - 1)) / (4.0 * du * dv);
  return huu < 0.0 && huu * hvv - huv * huv > 0.0;
}

}  // namespace

std::vector<Attractor> find_attractors(const Landscape& l, const AttractorOptions& opts) {
  const GridSpec& g = l.grid;
  const double eps = resolve_epsilon(l, opts);
  std::vector<Attractor> out;
  for (std::size_t i = 0; i < g.u_points; ++i) {
    for (std::size_t j = 0; j < g.v_points; ++j) {
      const std::size_t k = g.index(i, j);
      const double value = l.fitness[k];
      bool strict_max = true;
      for (int di = -1; di <= 1 && strict_max; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const long a = static_cast<long>(i) + di, b = static_cast<long>(j) + dj;
          if (a < 0 || b < 0 || a >= static_cast<long>(g.u_points) ||
              b >= static_cast<long>(g.v_points)) {
            continue;
          }
          if (l.fitness[g.index(static_cast<std::size_t>(a), static_cast<std::size_t>(b))] >=
              value) {
            strict_max = false;
            break;
          }
        }
      }
      if (!strict_max) continue;
      const auto [gu, gv] = opts.project_boundary ? projected_gradient(l, k)
                                                  : std::pair{l.grad_u[k], l.grad_v[k]};
      const double norm = std::hypot(gu, gv);
      if (!(norm < eps)) continue;
      if (opts.hessian_check && !negative_definite_hessian(l, i, j)) continue;
      out.push_back({g.point(i, j), value, norm, k});
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Attractor& a, const Attractor& b) { return a.phi > b.phi; });
  return out;
}

Landscape compute_landscape(const GridSpec& grid, const TraitDistributions& dists,
                            const UtilityModel& family, const LandscapeOptions& opts) {
  grid.validate();
  dists.validate();
  std::vector<double> s(grid.size());
  std::vector<SolveDiagnostics> diag(grid.size());
  parallel_for(grid.size(), opts.threads, [&](std::size_t k) {
    const AggregateResult r = aggregate_S(grid.point(k), dists, family, opts.nodes, opts.qre);
    s[k] = r.cooperation;
    diag[k] = r.diagnostics;
  });
  Landscape l = Landscape::from_cooperation(grid, std::move(s));
  for (const auto& d : diag) l.diagnostics += d;
  l.attractors = find_attractors(l, opts.attractors);
  return l;
}

std::vector<TrajectoryPoint> trajectory(const std::vector<std::pair<double, double>>& loop,
                                        const GridSpec& grid, const TraitDistributions& base,
                                        const UtilityModel& family,
                                        const LandscapeOptions& opts) {
  if (loop.empty()) throw std::invalid_argument("trajectory needs at least one waypoint");
  std::vector<TrajectoryPoint> out;
  out.reserve(loop.size());
  for (const auto& [mu_eta, mu_lambda] : loop) {
    TraitDistributions d = base;
    d.mu_eta = mu_eta;
    d.mu_lambda = mu_lambda;
    const Landscape l = compute_landscape(grid, d, family, opts);
    TrajectoryPoint p;
    p.mu_eta = mu_eta;
    p.mu_lambda = mu_lambda;
    p.diagnostics = l.diagnostics;
    if (!l.attractors.empty()) {
      p.attractor = l.attractors.front().game;
      p.phi = l.attractors.front().phi;
    } else {
      const std::size_t k = l.argmax();
      p.attractor = grid.point(k);
      p.phi = l.fitness[k];
      p.is_attractor = false;
    }
    p.perceived = perceived_game(p.attractor, family.with_eta(std::exp(mu_eta)));
    out.push_back(p);
  }
  return out;
}

void write_landscape_csv(std::ostream& os, const Landscape& l) {
  os << "U,V,S,Phi,gradU,gradV\n";
  for (std::size_t k = 0; k < l.grid.size(); ++k) {
    const Game g = l.grid.point(k);
    os << format_number(g.u) << ',' << format_number(g.v) << ','
       << format_number(l.cooperation.empty() ? std::nan("") : l.cooperation[k]) << ','
       << format_number(l.fitness[k]) << ',' << format_number(l.grad_u[k]) << ','
       << format_number(l.grad_v[k]) << '\n';
  }
}

}  // namespace normscape
