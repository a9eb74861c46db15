#include "normscape/game_space.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "normscape/csv.hpp"
#include "normscape/errors.hpp"
#include "normscape/utility.hpp"

namespace normscape {

Game GameBounds::clamp(const Game& g) const noexcept {
  return {std::clamp(g.u, u_min, u_max), std::clamp(g.v, v_min, v_max)};
}

double PayoffMatrix::mean() const noexcept {
  return 0.25 * (entries[0][0] + entries[0][1] + entries[1][0] + entries[1][1]);
}

PayoffMatrix PayoffMatrix::transposed() const noexcept {
  PayoffMatrix t;
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b) t.entries[a][b] = entries[b][a];
  return t;
}

PayoffMatrix PayoffMatrix::shifted(double delta) const noexcept {
  PayoffMatrix s = *this;
  for (auto& row : s.entries)
    for (auto& x : row) x += delta;
  return s;
}

Game from_canonical(double reward, double sucker, double temptation, double punishment) {
  const double scale = reward - punishment;
  if (scale == 0.0) {
    throw DegeneratePayoffs("R == P: the UV parametrization excludes this degenerate case");
  }
  return {(sucker - punishment) / scale, (temptation - punishment) / scale};
}

std::pair<PayoffMatrix, PayoffMatrix> payoff_matrices(const Game& g, bool normalize) {
  PayoffMatrix row{{{{1.0, g.u}, {g.v, 0.0}}}};
  if (normalize) row = row.shifted(-row.mean());
  return {row, row.transposed()};
}

PayoffMatrix blended_matrix(const Game& g, double normalization_strength) {
  PayoffMatrix row{{{{1.0, g.u}, {g.v, 0.0}}}};
  return row.shifted(-normalization_strength * row.mean());
}

double zero_sumness(const Game& g) {
  const std::array<double, 4> row{1.0, g.u, g.v, 0.0};
  const std::array<double, 4> col{1.0, g.v, g.u, 0.0};
  double mr = 0.0, mc = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    mr += row[i];
    mc += col[i];
  }
  mr /= 4.0;
  mc /= 4.0;
  double cov = 0.0, vr = 0.0, vc = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    cov += (row[i] - mr) * (col[i] - mc);
    vr += (row[i] - mr) * (row[i] - mr);
    vc += (col[i] - mc) * (col[i] - mc);
  }
  // vr == vc since col is a permutation of row, and both contain 1 and 0.
  return -cov / std::sqrt(vr * vc);
}

GameClass classify(const Game& g, const ClassifyOptions& opts) {
  const double u = g.u;
  const double v = g.v;
  if (v > 1.0 && 0.0 > u) return GameClass::PD;
  if (v > 1.0 && 1.0 > u && u > 0.0) return GameClass::SD;
  if (1.0 > v && v > 0.0 && 0.0 > u) return GameClass::SH;
  if (1.0 > u && u > v && v > 0.0) return GameClass::H;
  if (0.0 > u && 0.0 > v) return GameClass::C;
  if (u > 1.0 && v > 1.0) return GameClass::AC;
  if (opts.dl_corner && u > 1.0 && v < 0.0) return GameClass::DL;
  return GameClass::Unclassified;
}

Game perceived_game(const Game& g, const UtilityModel& u) {
  const double u0 = evaluate(u, 0.0);
  const double span = evaluate(u, 1.0) - u0;
  if (span == 0.0) throw DegenerateUtility("u(1) == u(0): perceived game is undefined");
  return {(evaluate(u, g.u) - u0) / span, (evaluate(u, g.v) - u0) / span};
}

std::string_view to_string(GameClass c) noexcept {
  switch (c) {
    case GameClass::PD: return "PD";
    case GameClass::DL: return "DL";
    case GameClass::SD: return "SD";
    case GameClass::SH: return "SH";
    case GameClass::C: return "C";
    case GameClass::AC: return "AC";
    case GameClass::H: return "H";
    case GameClass::Unclassified: return "UNCLASSIFIED";
  }
  return "UNCLASSIFIED";
}

GameClass game_class_from_string(std::string_view s) {
  for (auto c : {GameClass::PD, GameClass::DL, GameClass::SD, GameClass::SH, GameClass::C,
                 GameClass::AC, GameClass::H, GameClass::Unclassified}) {
    if (to_string(c) == s) return c;
  }
  throw std::invalid_argument("unknown game class label: " + std::string(s));
}

bool on_coordination_diagonal(const Game& g, double tolerance) {
  return std::abs(g.u - g.v) <= tolerance;
}

void write_grid_csv(std::ostream& os, const GameBounds& bounds, std::size_t resolution,
                    const ClassifyOptions& opts) {
  if (resolution < 2) throw std::invalid_argument("grid resolution must be >= 2");
  os << "U,V,Z,class_label\n";
  const double du = (bounds.u_max - bounds.u_min) / static_cast<double>(resolution - 1);
  const double dv = (bounds.v_max - bounds.v_min) / static_cast<double>(resolution - 1);
  for (std::size_t i = 0; i < resolution; ++i) {
    for (std::size_t j = 0; j < resolution; ++j) {
      const Game g{bounds.u_min + du * static_cast<double>(i),
                   bounds.v_min + dv * static_cast<double>(j)};
      os << format_number(g.u) << ',' << format_number(g.v) << ','
         << format_number(zero_sumness(g)) << ',' << to_string(classify(g, opts)) << '\n';
    }
  }
}

}  // namespace normscape
