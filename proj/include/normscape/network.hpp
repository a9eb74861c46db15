#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "normscape/rng.hpp"

namespace normscape {

using AgentId = std::uint32_t;

enum class Topology { ErdosRenyi, WattsStrogatz, HolmeKim };

struct TopologyParams {
  Topology kind = Topology::ErdosRenyi;
  double mean_degree = 6.0;
  double rewire_probability = 0.1;  // Watts-Strogatz
  double triad_probability = 0.5;   // Holme-Kim

  // Throws InvalidTopologyParams.
  void validate() const;
};

// Undirected simple graph. Neighbour lists are kept sorted so iteration order is deterministic.
class SocialNetwork {
 public:
  SocialNetwork() = default;
  explicit SocialNetwork(std::size_t n) : adjacency_(n) {}

  std::size_t size() const noexcept { return adjacency_.size(); }
  std::size_t edge_count() const noexcept { return edges_; }
  std::size_t degree(AgentId a) const noexcept { return adjacency_[a].size(); }
  std::span<const AgentId> neighbors(AgentId a) const noexcept { return adjacency_[a]; }

  bool has_edge(AgentId a, AgentId b) const noexcept;
  // Both return false (and change nothing) for self-loops, duplicates, or missing edges.
  bool add_edge(AgentId a, AgentId b);
  bool remove_edge(AgentId a, AgentId b);

  double mean_degree() const noexcept;
  double local_clustering(AgentId a) const;
  // Mean of local clustering; nodes with degree < 2 contribute zero.
  double average_clustering() const;
  bool is_simple() const;
  std::size_t max_degree() const noexcept;

  // Uniformly random existing edge (requires edge_count() > 0).
  std::pair<AgentId, AgentId> random_edge(Rng& rng) const;
  // Uniformly random absent pair; returns false when the graph is complete.
  bool random_non_edge(Rng& rng, std::pair<AgentId, AgentId>& out) const;

 private:
  std::vector<std::vector<AgentId>> adjacency_;
  std::size_t edges_ = 0;
};

SocialNetwork build_network(std::size_t n, const TopologyParams& params, Rng& rng);

std::string_view to_string(Topology t) noexcept;
Topology topology_from_string(std::string_view s);

}  // namespace normscape
