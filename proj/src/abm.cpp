#include "normscape/abm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>

#include "normscape/csv.hpp"
#include "normscape/errors.hpp"
#include "normscape/parallel.hpp"
#include "normscape/utility.hpp"

namespace normscape {

void AgentState::record_payoff(double payoff) {
  wealth = std::max(0.0, wealth + payoff);
  history[history_head] = payoff;
  history_head = (history_head + 1) % kIncomeWindow;
  history_size = std::min(history_size + 1, kIncomeWindow);
  // Oldest to newest, so the sum does not depend on where the ring starts.
  double sum = 0.0;
  const std::size_t oldest = (history_head + kIncomeWindow - history_size) % kIncomeWindow;
  for (std::size_t k = 0; k < history_size; ++k) sum += history[(oldest + k) % kIncomeWindow];
  recent_wealth = sum / static_cast<double>(history_size);
}

namespace {

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw ConfigError(field, what);
}

bool unit_interval(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

void SimConfig::validate() const {
  require(n_agents >= 2, "n_agents", "must be >= 2");
  require(periods >= 1, "periods", "must be >= 1");
  require(replicates >= 1, "replicates", "must be >= 1");
  require(warmup <= periods, "warmup", "must not exceed periods");
  require(unit_interval(belief_dependence), "belief_dependence", "must lie in [0, 1]");
  require(unit_interval(learning_rate), "learning_rate", "must lie in [0, 1]");
  require(std::isfinite(homophily) && homophily >= 0.0, "homophily", "must be >= 0");
  require(std::isfinite(homophily_threshold) && homophily_threshold >= 0.0,
          "homophily_threshold", "must be >= 0");
  require(std::isfinite(mutation_coefficient) && mutation_coefficient >= 0.0,
          "mutation_coefficient", "must be >= 0");
  require(std::isfinite(mutation_sigma) && mutation_sigma >= 0.0, "mutation_sigma", "must be >= 0");
  require(std::isfinite(choice_radius) && choice_radius >= 0.0, "choice_radius", "must be >= 0");
  require(unit_interval(normalization), "normalization", "must lie in [0, 1]");
  require(unit_interval(inequality_aversion), "inequality_aversion", "must lie in [0, 1]");
  for (const auto& [field, p] : {std::pair{"eta", eta}, {"omega", omega}, {"lambda", lambda}}) {
    require(std::isfinite(p.mu) && std::isfinite(p.sigma) && p.sigma >= 0.0, field,
            "lognormal needs finite mu and sigma >= 0");
  }
  require(bounds.u_max > bounds.u_min && bounds.v_max > bounds.v_min, "bounds", "min < max");
  require(qre.tolerance > 0.0 && qre.damping > 0.0 && qre.damping <= 1.0, "qre",
          "tolerance > 0 and damping in (0, 1]");
  try {
    topology.validate();
  } catch (const InvalidTopologyParams& e) {
    throw ConfigError("topology", e.what());
  }
}

Population init_population(const SimConfig& cfg, Rng& rng) {
  cfg.topology.validate();
  Population pop;
  pop.agents.resize(cfg.n_agents);
  for (std::size_t i = 0; i < cfg.n_agents; ++i) {
    AgentState& a = pop.agents[i];
    a.id = static_cast<AgentId>(i);
    a.eta = lognormal(rng, cfg.eta.mu, cfg.eta.sigma);
    a.omega = lognormal(rng, cfg.omega.mu, cfg.omega.sigma);
    a.lambda = lognormal(rng, cfg.lambda.mu, cfg.lambda.sigma);
    a.game = {uniform(rng, cfg.bounds.u_min, cfg.bounds.u_max),
              uniform(rng, cfg.bounds.v_min, cfg.bounds.v_max)};
  }
  pop.network = build_network(cfg.n_agents, cfg.topology, rng);
  return pop;
}

Game adjust_payoffs(const Game& self, const Game& other, double belief_dependence) noexcept {
  const double d = belief_dependence;
  return {(1.0 - d) * self.u + d * 0.5 * (self.u + other.u),
          (1.0 - d) * self.v + d * 0.5 * (self.v + other.v)};
}

double learn_probability(double utility_self, double utility_other, double precision) noexcept {
  return logistic(precision * (utility_other - utility_self));
}

Game learn_update(const Game& self, const Game& other, double learning_rate) noexcept {
  const double g = learning_rate;
  return {(1.0 - g) * self.u + g * other.u, (1.0 - g) * self.v + g * other.v};
}

double rewire_connect_probability(double recent_self, double recent_other, double homophily,
                                  double threshold) noexcept {
  return logistic(-homophily * (std::abs(recent_self - recent_other) - threshold));
}

namespace {

UtilityModel valuation(const AgentState& a) {
  return {UtilityKind::Prospect, a.eta, a.omega, a.recent_wealth};
}

double expected_payoff(const PayoffMatrix& m, double p_self, double p_other) noexcept {
  return p_self * p_other * m(Action::C, Action::C) +
         p_self * (1.0 - p_other) * m(Action::C, Action::D) +
         (1.0 - p_self) * p_other * m(Action::D, Action::C) +
         (1.0 - p_self) * (1.0 - p_other) * m(Action::D, Action::D);
}

// Softmax over the current game, a ring of local perturbations and the opponent's game.
Game choose_game(const AgentState& self, const Game& opponent_game, double opponent_cooperate,
                 const SimConfig& cfg, Rng& rng) {
  std::array<Game, 10> candidates;
  candidates[0] = self.game;
  for (std::size_t k = 0; k < 8; ++k) {
    const double angle = static_cast<double>(k) * std::numbers::pi / 4.0;
    candidates[k + 1] = cfg.bounds.clamp({self.game.u + cfg.choice_radius * std::cos(angle),
                                          self.game.v + cfg.choice_radius * std::sin(angle)});
  }
  candidates[9] = opponent_game;
  const UtilityModel u = valuation(self);
  std::array<double, 10> scores{};
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const PayoffMatrix material = blended_matrix(candidates[k], cfg.normalization);
    const double p_self =
        cooperate_response(apply_to_matrix(u, material), opponent_cooperate, self.lambda);
    scores[k] = evaluate(u, expected_payoff(material, p_self, opponent_cooperate));
  }
  const std::vector<double> probs = logit_response(scores, self.lambda);
  return candidates[sample_discrete(probs, rng)];
}

void rewire(Population& pop, AgentId i, const SimConfig& cfg, Rng& rng, StepDiagnostics& diag) {
  SocialNetwork& net = pop.network;
  const auto& agents = pop.agents;
  const auto p_con = [&](AgentId a, AgentId b) {
    return rewire_connect_probability(agents[a].recent_wealth, agents[b].recent_wealth,
                                      cfg.homophily, cfg.homophily_threshold);
  };
  long net_change = 0;
  if (net.degree(i) > 0) {
    const auto nb = net.neighbors(i);
    const AgentId j = nb[uniform_index(rng, nb.size())];
    if (bernoulli(rng, 1.0 - p_con(i, j))) {
      net.remove_edge(i, j);
      --net_change;
      ++diag.cuts;
    }
  }
  // Triadic closure: candidate drawn from second-order neighbours.
  std::vector<AgentId> second;
  for (AgentId j : net.neighbors(i))
    for (AgentId k : net.neighbors(j))
      if (k != i && !net.has_edge(i, k)) second.push_back(k);
  std::sort(second.begin(), second.end());
  second.erase(std::unique(second.begin(), second.end()), second.end());
  if (!second.empty()) {
    const AgentId k = second[uniform_index(rng, second.size())];
    if (bernoulli(rng, p_con(i, k))) {
      net.add_edge(i, k);
      ++net_change;
      ++diag.additions;
    }
  }
  // Compensate elsewhere so the edge count, and hence the mean degree, is unchanged.
  for (; net_change < 0; ++net_change) {
    std::pair<AgentId, AgentId> e;
    if (!net.random_non_edge(rng, e)) break;
    net.add_edge(e.first, e.second);
  }
  for (; net_change > 0; --net_change) {
    const auto [a, b] = net.random_edge(rng);
    net.remove_edge(a, b);
  }
}

}  // namespace

void interact(Population& pop, AgentId i, const SimConfig& cfg, std::size_t period, Rng& rng,
              StepDiagnostics& diag, PlayTally& tally) {
  if (pop.network.degree(i) == 0) {
    ++diag.isolated;
    return;
  }
  auto& agents = pop.agents;
  const bool adaptive = period >= cfg.warmup;
  const auto nb = pop.network.neighbors(i);
  const AgentId k = nb[uniform_index(rng, nb.size())];
  AgentState& self = agents[i];
  AgentState& other = agents[k];
  ++diag.interactions;

  Game g_self = self.game, g_other = other.game;
  if (adaptive) {
    g_self = adjust_payoffs(self.game, other.game, cfg.belief_dependence);
    g_other = adjust_payoffs(other.game, self.game, cfg.belief_dependence);
  }
  const PayoffMatrix m_self = blended_matrix(g_self, cfg.normalization);
  const PayoffMatrix m_other = blended_matrix(g_other, cfg.normalization);
  const UtilityModel u_self = valuation(self);
  const UtilityModel u_other = valuation(other);

  QreSolution sol;
  try {
    sol = solve_2x2(apply_to_matrix(u_self, m_self), apply_to_matrix(u_other, m_other),
                    self.lambda, other.lambda, cfg.qre);
    if (sol.method == QreMethod::Bisection) ++diag.qre_fallbacks;
  } catch (const NoConvergence& e) {
    sol = e.last_iterate();
    ++diag.qre_failures;
  }

  const Action a_self = bernoulli(rng, sol.p1_cooperate) ? Action::C : Action::D;
  const Action a_other = bernoulli(rng, sol.p2_cooperate) ? Action::C : Action::D;
  tally.total += 2;
  tally.cooperate += (a_self == Action::C) + (a_other == Action::C);
  const double pay_self = m_self(a_self, a_other);
  const double pay_other = m_other(a_other, a_self);
  const Game opponent_game = other.game;

  self.record_payoff(pay_self);
  other.record_payoff(pay_other);

  if (!adaptive) return;

  // Learning gate: the initiator compares both realized payoffs under its own valuation.
  const double util_self = evaluate(u_self, pay_self);
  const double util_other = evaluate(u_self, pay_other);
  if (bernoulli(rng, learn_probability(util_self, util_other, self.lambda))) {
    self.game = learn_update(self.game, opponent_game, cfg.learning_rate);
    ++diag.learn_events;
  }

  self.game = choose_game(self, opponent_game, sol.p2_cooperate, cfg, rng);

  const double n = static_cast<double>(agents.size());
  const double mutation_p = cfg.mutation_coefficient / (n * n);
  if (mutation_p > 0.0 && bernoulli(rng, mutation_p)) {
    self.game = cfg.bounds.clamp({self.game.u + cfg.mutation_sigma * standard_normal(rng),
                                  self.game.v + cfg.mutation_sigma * standard_normal(rng)});
    ++diag.mutations;
  }

  rewire(pop, i, cfg, rng, diag);
}

PlayTally step(Population& pop, const SimConfig& cfg, std::size_t period, Rng& rng,
               StepDiagnostics* diag_out) {
  StepDiagnostics local;
  StepDiagnostics& diag = diag_out ? *diag_out : local;
  std::vector<AgentId> order(pop.agents.size());
  std::iota(order.begin(), order.end(), AgentId{0});
  shuffle(std::span<AgentId>(order), rng);
  PlayTally tally;
  for (const AgentId i : order) interact(pop, i, cfg, period, rng, diag, tally);
  return tally;
}

ReplicateResult run_replicate(const SimConfig& cfg, std::size_t replicate) {
  cfg.validate();
  Rng rng = make_rng(cfg.seed, {0xab3, replicate});
  ReplicateResult out;
  out.final_state = init_population(cfg, rng);
  out.metrics.reserve(cfg.periods);
  for (std::size_t t = 0; t < cfg.periods; ++t) {
    const PlayTally tally = step(out.final_state, cfg, t, rng, &out.diagnostics);
    out.metrics.push_back(population_summary(out.final_state.agents, out.final_state.network,
                                             tally, t, replicate, cfg.inequality_aversion));
  }
  return out;
}

std::vector<ReplicateResult> run_simulation(const SimConfig& cfg) {
  cfg.validate();
  std::vector<ReplicateResult> results(cfg.replicates);
  parallel_for(cfg.replicates, cfg.threads,
               [&](std::size_t r) { results[r] = run_replicate(cfg, r); });
  return results;
}

void write_agents_csv(std::ostream& os, const Population& pop) {
  os << "id,eta,lambda,omega,U,V,W,W_R,degree\n";
  for (const AgentState& a : pop.agents) {
    os << a.id << ',' << format_number(a.eta) << ',' << format_number(a.lambda) << ','
       << format_number(a.omega) << ',' << format_number(a.game.u) << ','
       << format_number(a.game.v) << ',' << format_number(a.wealth) << ','
       << format_number(a.recent_wealth) << ',' << pop.network.degree(a.id) << '\n';
  }
}

}  // namespace normscape
