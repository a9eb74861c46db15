#include "normscape/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "normscape/errors.hpp"

namespace normscape {

void TopologyParams::validate() const {
  if (!std::isfinite(mean_degree) || mean_degree < 0.0) {
    throw InvalidTopologyParams("mean_degree must be finite and >= 0");
  }
  if (!(rewire_probability >= 0.0 && rewire_probability <= 1.0)) {
    throw InvalidTopologyParams("rewire_probability must lie in [0, 1]");
  }
  if (!(triad_probability >= 0.0 && triad_probability <= 1.0)) {
    throw InvalidTopologyParams("triad_probability must lie in [0, 1]");
  }
}

bool SocialNetwork::has_edge(AgentId a, AgentId b) const noexcept {
  const auto& n = adjacency_[a];
  return std::binary_search(n.begin(), n.end(), b);
}

bool SocialNetwork::add_edge(AgentId a, AgentId b) {
  if (a == b || has_edge(a, b)) return false;
  auto& na = adjacency_[a];
  na.insert(std::lower_bound(na.begin(), na.end(), b), b);
  auto& nb = adjacency_[b];
  nb.insert(std::lower_bound(nb.begin(), nb.end(), a), a);
  ++edges_;
  return true;
}

bool SocialNetwork::remove_edge(AgentId a, AgentId b) {
  if (a == b || !has_edge(a, b)) return false;
  auto& na = adjacency_[a];
  na.erase(std::lower_bound(na.begin(), na.end(), b));
  auto& nb = adjacency_[b];
  nb.erase(std::lower_bound(nb.begin(), nb.end(), a));
  --edges_;
  return true;
}

double SocialNetwork::mean_degree() const noexcept {
  return size() == 0 ? 0.0 : 2.0 * static_cast<double>(edges_) / static_cast<double>(size());
}

double SocialNetwork::local_clustering(AgentId a) const {
  const auto& n = adjacency_[a];
  const std::size_t k = n.size();
  if (k < 2) return 0.0;
  std::size_t links = 0;
  for (std::size_t x = 0; x < k; ++x)
    for (std::size_t y = x + 1; y < k; ++y)
      if (has_edge(n[x], n[y])) ++links;
  return 2.0 * static_cast<double>(links) / static_cast<double>(k * (k - 1));
}

double SocialNetwork::average_clustering() const {
  if (size() == 0) return 0.0;
  double total = 0.0;
  for (AgentId a = 0; a < size(); ++a) total += local_clustering(a);
  return total / static_cast<double>(size());
}

bool SocialNetwork::is_simple() const {
  std::size_t half_edges = 0;
  for (AgentId a = 0; a < size(); ++a) {
    const auto& n = adjacency_[a];
    half_edges += n.size();
    for (std::size_t k = 0; k < n.size(); ++k) {
      if (n[k] == a || n[k] >= size()) return false;
      if (k > 0 && n[k] <= n[k - 1]) return false;  // duplicate or unsorted
      if (!has_edge(n[k], a)) return false;
    }
  }
  return half_edges == 2 * edges_;
}

std::size_t SocialNetwork::max_degree() const noexcept {
  std::size_t m = 0;
  for (const auto& n : adjacency_) m = std::max(m, n.size());
  return m;
}

std::pair<AgentId, AgentId> SocialNetwork::random_edge(Rng& rng) const {
  // Node accepted with probability deg / max_deg, then a uniform neighbour: uniform over edges.
  const double top = static_cast<double>(max_degree());
  while (true) {
    const auto a = static_cast<AgentId>(uniform_index(rng, size()));
    const auto& n = adjacency_[a];
    if (n.empty()) continue;
    if (uniform01(rng) * top < static_cast<double>(n.size())) {
      return {a, n[uniform_index(rng, n.size())]};
    }
  }
}

bool SocialNetwork::random_non_edge(Rng& rng, std::pair<AgentId, AgentId>& out) const {
  const std::size_t n = size();
  if (n < 2 || edges_ >= n * (n - 1) / 2) return false;
  while (true) {
    const auto a = static_cast<AgentId>(uniform_index(rng, n));
    const auto b = static_cast<AgentId>(uniform_index(rng, n));
    if (a != b && !has_edge(a, b)) {
      out = {a, b};
      return true;
    }
  }
}

namespace {

SocialNetwork erdos_renyi(std::size_t n, double mean_degree, Rng& rng) {
  SocialNetwork g(n);
  if (n < 2) return g;
  const double p = std::min(1.0, mean_degree / static_cast<double>(n - 1));
  for (AgentId a = 0; a < n; ++a)
    for (AgentId b = a + 1; b < n; ++b)
      if (bernoulli(rng, p)) g.add_edge(a, b);
  return g;
}

SocialNetwork watts_strogatz(std::size_t n, double mean_degree, double beta, Rng& rng) {
  SocialNetwork g(n);
  if (n < 2) return g;
  // Ring lattice with k/2 neighbours per side; k even and below n.
  std::size_t k = static_cast<std::size_t>(std::lround(mean_degree));
  k = std::min(k, n - 1);
  k -= k % 2;
  const std::size_t half = k / 2;
  for (std::size_t j = 1; j <= half; ++j)
    for (AgentId a = 0; a < n; ++a) g.add_edge(a, static_cast<AgentId>((a + j) % n));
  // Rewire each lattice edge (a, a + j) to a random target with probability beta.
  for (std::size_t j = 1; j <= half; ++j) {
    for (AgentId a = 0; a < n; ++a) {
      const auto b = static_cast<AgentId>((a + j) % n);
      if (!bernoulli(rng, beta) || !g.has_edge(a, b)) continue;
      if (g.degree(a) >= n - 1) continue;
      AgentId c = a;
      while (c == a || g.has_edge(a, c)) c = static_cast<AgentId>(uniform_index(rng, n));
      g.remove_edge(a, b);
      g.add_edge(a, c);
    }
  }
  return g;
}

SocialNetwork holme_kim(std::size_t n, double mean_degree, double triad_p, Rng& rng) {
  SocialNetwork g(n);
  if (n < 2) return g;
  std::size_t m = static_cast<std::size_t>(std::lround(mean_degree / 2.0));
  m = std::clamp<std::size_t>(m, 1, n - 1);
  // Preferential attachment with triad formation steps; starts from m isolated seed nodes.
  std::vector<AgentId> repeated;
  for (AgentId a = 0; a < m; ++a) repeated.push_back(a);
  for (auto source = static_cast<AgentId>(m); source < n; ++source) {
    std::vector<AgentId> targets;
    while (targets.size() < m) {
      const AgentId t = repeated[uniform_index(rng, repeated.size())];
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
    }
    std::vector<AgentId> linked;
    std::size_t next = 0;
    AgentId target = targets[next++];
    g.add_edge(source, target);
    linked.push_back(target);
    while (linked.size() < m) {
      AgentId chosen = source;
      if (bernoulli(rng, triad_p)) {
        std::vector<AgentId> closing;
        for (AgentId nb : g.neighbors(target))
          if (nb != source && !g.has_edge(source, nb)) closing.push_back(nb);
        if (!closing.empty()) chosen = closing[uniform_index(rng, closing.size())];
      }
      if (chosen == source) {
        while (next < targets.size() && g.has_edge(source, targets[next])) ++next;
        if (next >= targets.size()) break;
        chosen = targets[next++];
      }
      g.add_edge(source, chosen);
      linked.push_back(chosen);
      target = chosen;
    }
    for (AgentId t : linked) repeated.push_back(t);
    for (std::size_t r = 0; r < m; ++r) repeated.push_back(source);
  }
  return g;
}

}  // namespace

SocialNetwork build_network(std::size_t n, const TopologyParams& params, Rng& rng) {
  params.validate();
  switch (params.kind) {
    case Topology::ErdosRenyi: return erdos_renyi(n, params.mean_degree, rng);
    case Topology::WattsStrogatz:
      return watts_strogatz(n, params.mean_degree, params.rewire_probability, rng);
    case Topology::HolmeKim: return holme_kim(n, params.mean_degree, params.triad_probability, rng);
  }
  throw InvalidTopologyParams("unknown topology");
}

std::string_view to_string(Topology t) noexcept {
  switch (t) {
    case Topology::ErdosRenyi: return "erdos_renyi";
    case Topology::WattsStrogatz: return "watts_strogatz";
    case Topology::HolmeKim: return "holme_kim";
  }
  return "erdos_renyi";
}

Topology topology_from_string(std::string_view s) {
  if (s == "erdos_renyi") return Topology::ErdosRenyi;
  if (s == "watts_strogatz") return Topology::WattsStrogatz;
  if (s == "holme_kim") return Topology::HolmeKim;
  throw InvalidTopologyParams("unknown topology '" + std::string(s) +
                              "' (expected erdos_renyi, watts_strogatz or holme_kim)");
}

}  // namespace normscape
