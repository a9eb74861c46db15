#include "normscape/utility.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace normscape {

UtilityModel UtilityModel::linex(double eta) {
  UtilityModel u{UtilityKind::Linex, eta, 2.0, 0.0};
  u.validate();
  return u;
}

UtilityModel UtilityModel::prospect(double eta, double omega, double reference) {
  UtilityModel u{UtilityKind::Prospect, eta, omega, reference};
  u.validate();
  return u;
}

UtilityModel UtilityModel::with_eta(double new_eta) const {
  UtilityModel u = *this;
  u.eta = new_eta;
  return u;
}

UtilityModel UtilityModel::with_reference(double r) const {
  UtilityModel u = *this;
  u.reference = r;
  return u;
}

void UtilityModel::validate() const {
  if (!std::isfinite(eta) || !std::isfinite(omega) || !std::isfinite(reference)) {
    throw std::invalid_argument("utility parameters must be finite");
  }
  switch (kind) {
    case UtilityKind::RiskNeutral: return;
    case UtilityKind::Linex:
      if (eta <= 0.0) throw std::invalid_argument("linex utility requires eta > 0");
      return;
    case UtilityKind::Prospect:
      if (eta < 0.0) throw std::invalid_argument("prospect utility requires eta >= 0");
      if (omega <= 0.0) throw std::invalid_argument("prospect utility requires omega > 0");
      return;
  }
}

double gain_curvature(double eta) noexcept { return std::max(0.2, 1.0 / (1.0 + eta)); }

double loss_curvature(double eta) noexcept { return std::max(0.2, 1.0 / (1.0 + 0.5 * eta)); }

double evaluate(const UtilityModel& u, double c) {
  switch (u.kind) {
    case UtilityKind::RiskNeutral: return c;
    case UtilityKind::Linex: return -std::exp(-u.eta * c) + u.eta * c + 1.0;
    case UtilityKind::Prospect:
      if (c >= u.reference) return std::pow(c - u.reference, gain_curvature(u.eta));
      return -u.omega * std::pow(u.reference - c, loss_curvature(u.eta));
  }
  return c;
}

PayoffMatrix apply_to_matrix(const UtilityModel& u, const PayoffMatrix& m) {
  PayoffMatrix out;
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b) out.entries[a][b] = evaluate(u, m.entries[a][b]);
  return out;
}

std::string_view to_string(UtilityKind k) noexcept {
  switch (k) {
    case UtilityKind::RiskNeutral: return "risk_neutral";
    case UtilityKind::Linex: return "linex";
    case UtilityKind::Prospect: return "prospect";
  }
  return "risk_neutral";
}

UtilityKind utility_kind_from_string(std::string_view s) {
  if (s == "risk_neutral") return UtilityKind::RiskNeutral;
  if (s == "linex") return UtilityKind::Linex;
  if (s == "prospect") return UtilityKind::Prospect;
  throw std::invalid_argument("unknown utility type '" + std::string(s) +
                              "' (expected risk_neutral, linex or prospect)");
}

}  // namespace normscape
