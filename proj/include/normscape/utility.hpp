#pragma once

#include <string_view>

#include "normscape/game_space.hpp"

namespace normscape {

enum class UtilityKind { RiskNeutral, Linex, Prospect };

// Subjective valuation of material payoffs.
//   Linex:    -exp(-eta c) + eta c + 1                (eta > 0)
//   Prospect: (c - r)^alpha(eta)        for c >= r
//             -omega (r - c)^beta(eta)  for c <  r
// with alpha(eta) = max(0.2, 1/(1+eta)) and beta(eta) = max(0.2, 1/(1+eta/2)).
struct UtilityModel {
  UtilityKind kind = UtilityKind::RiskNeutral;
  double eta = 0.0;
  double omega = 2.0;
  double reference = 0.0;

  static UtilityModel risk_neutral() { return {}; }
  static UtilityModel linex(double eta);
  static UtilityModel prospect(double eta, double omega, double reference = 0.0);

  // Same family at a different risk sensitivity (the quadrature varies eta per node).
  UtilityModel with_eta(double new_eta) const;
  UtilityModel with_reference(double r) const;

  // Throws std::invalid_argument when parameters leave their domain.
  void validate() const;
};

double gain_curvature(double eta) noexcept;
double loss_curvature(double eta) noexcept;

double evaluate(const UtilityModel& u, double c);

PayoffMatrix apply_to_matrix(const UtilityModel& u, const PayoffMatrix& m);

std::string_view to_string(UtilityKind k) noexcept;
UtilityKind utility_kind_from_string(std::string_view s);

}  // namespace normscape
