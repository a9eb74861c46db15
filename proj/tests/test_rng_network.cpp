#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "normscape/errors.hpp"
#include "normscape/network.hpp"
#include "normscape/rng.hpp"

using namespace normscape;

TEST_SUITE("rng") {
  TEST_CASE("seed streams are deterministic and distinct") {
    CHECK(derive_seed(42, {1, 2}) == derive_seed(42, {1, 2}));
    std::set<std::uint64_t> seen;
    for (std::uint64_t r = 0; r < 100; ++r) seen.insert(derive_seed(42, {r}));
    CHECK(seen.size() == 100);
    CHECK(derive_seed(42, {1, 2}) != derive_seed(42, {2, 1}));
    CHECK(derive_seed(42, {3}) != derive_seed(43, {3}));
  }

  TEST_CASE("draw helpers") {
    Rng rng = make_rng(7, {});
    double sum = 0, sum2 = 0;
    std::vector<int> counts(5, 0);
    const int n = 200000;
    for (int k = 0; k < n; ++k) {
      const double u = uniform01(rng);
      REQUIRE(u >= 0.0);
      REQUIRE(u < 1.0);
      const double z = standard_normal(rng);
      sum += z;
      sum2 += z * z;
      ++counts[uniform_index(rng, 5)];
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(std::abs(sum2 / n - 1.0) < 0.02);
    for (const int c : counts) CHECK(std::abs(c - n / 5) < 0.02 * n / 5);

    const std::vector<double> w{1, 0, 3};
    std::vector<int> hits(3, 0);
    for (int k = 0; k < 40000; ++k) ++hits[sample_discrete(w, rng)];
    CHECK(hits[1] == 0);
    CHECK(hits[2] / static_cast<double>(hits[0]) == doctest::Approx(3.0).epsilon(0.05));
  }

  TEST_CASE("shuffle permutes") {
    Rng rng = make_rng(1, {2});
    std::vector<int> v(50);
    std::iota(v.begin(), v.end(), 0);
    auto w = v;
    shuffle(std::span<int>(w), rng);
    CHECK(w != v);
    std::sort(w.begin(), w.end());
    CHECK(w == v);
  }
}

TEST_SUITE("network") {
  TEST_CASE("edge operations keep the graph simple") {
    SocialNetwork g(4);
    CHECK(g.add_edge(0, 1));
    CHECK_FALSE(g.add_edge(1, 0));
    CHECK_FALSE(g.add_edge(2, 2));
    CHECK(g.add_edge(1, 2));
    CHECK(g.add_edge(0, 2));
    CHECK(g.edge_count() == 3);
    CHECK(g.local_clustering(0) == 1.0);
    CHECK(g.local_clustering(3) == 0.0);
    CHECK(g.average_clustering() == doctest::Approx(0.75));
    CHECK(g.mean_degree() == 1.5);
    CHECK(g.remove_edge(2, 0));
    CHECK_FALSE(g.remove_edge(2, 0));
    CHECK(g.is_simple());
  }

  TEST_CASE("random edges are uniform over edges") {
    // A star plus one pendant edge: degree-proportional node choice would over-sample the hub.
    SocialNetwork g(6);
    for (AgentId k = 1; k < 5; ++k) g.add_edge(0, k);
    g.add_edge(4, 5);
    Rng rng = make_rng(5, {});
    std::map<std::pair<AgentId, AgentId>, int> hits;
    for (int k = 0; k < 50000; ++k) {
      auto [a, b] = g.random_edge(rng);
      if (a > b) std::swap(a, b);
      ++hits[{a, b}];
    }
    CHECK(hits.size() == 5);
    for (const auto& [e, c] : hits) CHECK(std::abs(c - 10000) < 500);
    std::pair<AgentId, AgentId> ne;
    REQUIRE(g.random_non_edge(rng, ne));
    CHECK_FALSE(g.has_edge(ne.first, ne.second));
    CHECK(ne.first != ne.second);
  }

  TEST_CASE("two agents have one possible edge") {
    for (const auto kind : {Topology::ErdosRenyi, Topology::WattsStrogatz, Topology::HolmeKim}) {
      TopologyParams p;
      p.kind = kind;
      for (std::uint64_t s = 0; s < 10; ++s) {
        Rng rng = make_rng(s, {});
        const SocialNetwork g = build_network(2, p, rng);
        CHECK(g.edge_count() <= 1);
        CHECK(g.is_simple());
      }
    }
  }

  TEST_CASE("generators hit their target degree") {
    const std::size_t n = 400;
    for (const auto kind : {Topology::ErdosRenyi, Topology::WattsStrogatz, Topology::HolmeKim}) {
      TopologyParams p;
      p.kind = kind;
      Rng a = make_rng(9, {}), b = make_rng(9, {});
      const SocialNetwork g = build_network(n, p, a);
      const SocialNetwork h = build_network(n, p, b);
      CHECK(g.is_simple());
      CHECK(g.mean_degree() == doctest::Approx(6.0).epsilon(0.1));
      for (AgentId k = 0; k < n; ++k) {
        CHECK(std::equal(g.neighbors(k).begin(), g.neighbors(k).end(), h.neighbors(k).begin(),
                         h.neighbors(k).end()));
      }
    }
  }

  TEST_CASE("unrewired ring lattice") {
    TopologyParams p;
    p.kind = Topology::WattsStrogatz;
    p.rewire_probability = 0.0;
    Rng rng = make_rng(1, {});
    const SocialNetwork g = build_network(60, p, rng);
    for (AgentId k = 0; k < 60; ++k) CHECK(g.degree(k) == 6);
    // 3 (k - 2) / (4 (k - 1)) for k = 6
    CHECK(g.average_clustering() == doctest::Approx(0.6).epsilon(1e-12));
  }

  TEST_CASE("holme-kim closes triangles") {
    TopologyParams hk, ba;
    hk.kind = ba.kind = Topology::HolmeKim;
    hk.triad_probability = 0.9;
    ba.triad_probability = 0.0;
    Rng r1 = make_rng(3, {}), r2 = make_rng(3, {});
    CHECK(build_network(500, hk, r1).average_clustering() >
          build_network(500, ba, r2).average_clustering() + 0.1);
  }

  TEST_CASE("invalid parameters are rejected") {
    TopologyParams p;
    p.rewire_probability = 1.5;
    Rng rng = make_rng(0, {});
    CHECK_THROWS_AS(build_network(10, p, rng), InvalidTopologyParams);
    p = {};
    p.mean_degree = -1;
    CHECK_THROWS_AS(build_network(10, p, rng), InvalidTopologyParams);
    CHECK_THROWS_AS(topology_from_string("scale_free"), InvalidTopologyParams);
    CHECK(topology_from_string(to_string(Topology::HolmeKim)) == Topology::HolmeKim);
  }
}
