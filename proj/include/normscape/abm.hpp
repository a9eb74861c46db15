#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "normscape/game_space.hpp"
#include "normscape/metrics.hpp"
#include "normscape/network.hpp"
#include "normscape/qre.hpp"
#include "normscape/rng.hpp"

namespace normscape {

struct LognormalParams {
  double mu = 0.0;
  double sigma = 0.5;
};

inline constexpr std::size_t kIncomeWindow = 5;

struct AgentState {
  AgentId id = 0;
  double eta = 1.0;
  double lambda = 1.0;
  double omega = 2.0;
  Game game;
  double wealth = 0.0;         // cumulative, floored at zero
  double recent_wealth = 0.0;  // mean of the stored payoff history
  std::array<double, kIncomeWindow> history{};
  std::size_t history_size = 0;
  std::size_t history_head = 0;  // slot for the next payoff

  // Adds a realized payoff to W (with the zero floor) and to the recent-wealth window.
  void record_payoff(double payoff);
};

struct SimConfig {
  std::size_t n_agents = 200;
  std::size_t periods = 200;
  std::size_t replicates = 10;
  std::size_t warmup = 5;
  double belief_dependence = 0.0;   // delta_b
  double learning_rate = 0.2;       // delta_g
  double homophily = 1.0;           // alpha
  double homophily_threshold = 2.0; // rho
  double mutation_coefficient = 1.0;  // P_m = c / N^2
  double mutation_sigma = 0.1;
  double choice_radius = 0.1;
  double normalization = 1.0;  // 0 raw payoffs, 1 mean-normalized
  double inequality_aversion = 1.0;
  LognormalParams eta{1.4, 0.5};
  LognormalParams omega{2.0, 0.5};
  LognormalParams lambda{1.0, 0.5};
  GameBounds bounds;
  TopologyParams topology;
  std::uint64_t seed = 42;
  QreOptions qre;
  std::size_t threads = 0;

  // Throws ConfigError naming the offending field.
  void validate() const;
};

struct Population {
  std::vector<AgentState> agents;
  SocialNetwork network;
};

struct StepDiagnostics {
  std::size_t interactions = 0;
  std::size_t isolated = 0;
  std::size_t qre_fallbacks = 0;
  std::size_t qre_failures = 0;
  std::size_t learn_events = 0;
  std::size_t mutations = 0;
  std::size_t cuts = 0;
  std::size_t additions = 0;
};

Population init_population(const SimConfig& cfg, Rng& rng);

Game adjust_payoffs(const Game& self, const Game& other, double belief_dependence) noexcept;

double learn_probability(double utility_self, double utility_other, double precision) noexcept;

Game learn_update(const Game& self, const Game& other, double learning_rate) noexcept;

double rewire_connect_probability(double recent_self, double recent_other, double homophily,
                                  double threshold) noexcept;

// One encounter initiated by `initiator`: play against a random neighbour, then (outside the
// warm-up) learn, re-choose the game, mutate and rewire. Only the initiator's game changes.
// Isolated initiators do nothing and count as isolated.
void interact(Population& pop, AgentId initiator, const SimConfig& cfg, std::size_t period,
              Rng& rng, StepDiagnostics& diag, PlayTally& tally);

// One period of the agent loop. `period` is zero-based; adaptive steps run when period >= warmup.
PlayTally step(Population& pop, const SimConfig& cfg, std::size_t period, Rng& rng,
               StepDiagnostics* diag = nullptr);

struct ReplicateResult {
  std::vector<MetricsRecord> metrics;  // one record per period
  Population final_state;
  StepDiagnostics diagnostics;
};

ReplicateResult run_replicate(const SimConfig& cfg, std::size_t replicate);

// Replicates run concurrently with seeds derived from cfg.seed and the replicate index.
std::vector<ReplicateResult> run_simulation(const SimConfig& cfg);

// Columns: id,eta,lambda,omega,U,V,W,W_R,degree
void write_agents_csv(std::ostream& os, const Population& pop);

}  // namespace normscape
