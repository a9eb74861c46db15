#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace normscape {

struct AgentState;
class SocialNetwork;

struct MetricsRecord {
  std::size_t period = 0;
  std::size_t replicate = 0;
  double mean_income = 0.0;  // mean recent wealth W_R
  double mean_wealth = 0.0;  // mean cumulative wealth W
  double gini = 0.0;         // over cumulative wealth
  double sen_welfare = 0.0;
  std::optional<double> coop_rate;  // missing when nobody played
  double mean_Z = 0.0;
  double mean_U = 0.0;
  double mean_V = 0.0;
  double mean_degree = 0.0;
  double clustering = 0.0;
  std::optional<double> corr_lambda_wealth;
  std::optional<double> corr_eta_wealth;
  std::optional<double> corr_lambda_income;
  std::optional<double> corr_eta_income;
};

// Mean absolute difference over all ordered pairs divided by twice the mean. Values must be
// non-negative; an all-zero (or empty) vector has Gini 0. Sorted O(n log n) evaluation.
double gini(std::span<const double> values);

// mean * (1 - inequality_aversion * gini)
double sen_welfare(std::span<const double> values, double inequality_aversion = 1.0);

// Pearson correlation; nullopt when lengths differ, n < 2, or either side has zero variance.
std::optional<double> trait_correlation(std::span<const double> traits,
                                        std::span<const double> outcomes);

// Tally of actions realized during one period.
struct PlayTally {
  std::size_t cooperate = 0;
  std::size_t total = 0;
};

MetricsRecord population_summary(std::span<const AgentState> agents, const SocialNetwork& network,
                                 const PlayTally& plays, std::size_t period,
                                 std::size_t replicate, double inequality_aversion = 1.0);

// Columns: period,replicate,mean_income,gini,sen_welfare,coop_rate,mean_Z,mean_U,mean_V,
//          mean_degree,clustering
void write_metrics_header(std::ostream& os);
void write_metrics_row(std::ostream& os, const MetricsRecord& r);

}  // namespace normscape
