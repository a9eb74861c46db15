#include "normscape/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "normscape/abm.hpp"
#include "normscape/csv.hpp"
#include "normscape/game_space.hpp"
#include "normscape/network.hpp"

namespace normscape {

double gini(std::span<const double> values) {
  if (values.empty()) return 0.0;
  std::vector<double> x(values.begin(), values.end());
  for (const double v : x) {
    if (!(v >= 0.0)) throw std::invalid_argument("gini requires non-negative values");
  }
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double total = 0.0, weighted = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    total += x[i];
    weighted += (2.0 * static_cast<double>(i + 1) - n - 1.0) * x[i];
  }
  if (total == 0.0) return 0.0;
  return weighted / (n * total);
}

double sen_welfare(std::span<const double> values, double inequality_aversion) {
  if (values.empty()) return 0.0;
  double mean = 0.0;
  for (const double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  return mean * (1.0 - inequality_aversion * gini(values));
}

std::optional<double> trait_correlation(std::span<const double> traits,
                                        std::span<const double> outcomes) {
  const std::size_t n = traits.size();
  if (n != outcomes.size() || n < 2) return std::nullopt;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += traits[i];
    my += outcomes[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = traits[i] - mx, dy = outcomes[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

MetricsRecord population_summary(std::span<const AgentState> agents, const SocialNetwork& network,
                                 const PlayTally& plays, std::size_t period,
                                 std::size_t replicate, double inequality_aversion) {
  if (agents.empty()) throw std::invalid_argument("population_summary needs at least one agent");
  MetricsRecord r;
  r.period = period;
  r.replicate = replicate;
  const std::size_t n = agents.size();
  std::vector<double> wealth(n), income(n), lambda(n), eta(n);
  double z = 0.0, u = 0.0, v = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const AgentState& a = agents[i];
    wealth[i] = a.wealth;
    income[i] = a.recent_wealth;
    lambda[i] = a.lambda;
    eta[i] = a.eta;
    z += zero_sumness(a.game);
    u += a.game.u;
    v += a.game.v;
  }
  const double nd = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    r.mean_income += income[i];
    r.mean_wealth += wealth[i];
  }
  r.mean_income /= nd;
  r.mean_wealth /= nd;
  r.gini = gini(wealth);
  r.sen_welfare = r.mean_income * (1.0 - inequality_aversion * r.gini);
  if (plays.total > 0) {
    r.coop_rate = static_cast<double>(plays.cooperate) / static_cast<double>(plays.total);
  }
  r.mean_Z = z / nd;
  r.mean_U = u / nd;
  r.mean_V = v / nd;
  r.mean_degree = network.mean_degree();
  r.clustering = network.average_clustering();
  r.corr_lambda_wealth = trait_correlation(lambda, wealth);
  r.corr_eta_wealth = trait_correlation(eta, wealth);
  r.corr_lambda_income = trait_correlation(lambda, income);
  r.corr_eta_income = trait_correlation(eta, income);
  return r;
}

void write_metrics_header(std::ostream& os) {
  os << "period,replicate,mean_income,gini,sen_welfare,coop_rate,mean_Z,mean_U,mean_V,"
        "mean_degree,clustering\n";
}

void write_metrics_row(std::ostream& os, const MetricsRecord& r) {
  os << r.period << ',' << r.replicate << ',' << format_number(r.mean_income) << ','
     << format_number(r.gini) << ',' << format_number(r.sen_welfare) << ','
     << format_number(r.coop_rate) << ',' << format_number(r.mean_Z) << ','
     << format_number(r.mean_U) << ',' << format_number(r.mean_V) << ','
     << format_number(r.mean_degree) << ',' << format_number(r.clustering) << '\n';
}

}  // namespace normscape
