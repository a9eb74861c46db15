#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "normscape/abm.hpp"
#include "normscape/metrics.hpp"

using namespace normscape;

namespace {

double pairwise_gini(const std::vector<double>& x) {
  double diff = 0, sum = 0;
  for (const double a : x) {
    sum += a;
    for (const double b : x) diff += std::abs(a - b);
  }
  if (sum == 0) return 0;
  const double n = static_cast<double>(x.size());
  return diff / (2.0 * n * sum);
}

double pearson_oracle(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("gini known values") {
    const std::vector<double> one_rich{0, 0, 0, 1};
    CHECK(gini(one_rich) == doctest::Approx(0.75).epsilon(1e-14));
    const std::vector<double> equal{2, 2, 2};
    CHECK(gini(equal) == 0.0);
    const std::vector<double> zeros{0, 0};
    CHECK(gini(zeros) == 0.0);
    CHECK(gini(std::vector<double>{}) == 0.0);
    const std::vector<double> neg{1, -1};
    CHECK_THROWS_AS(gini(neg), std::invalid_argument);
  }

  TEST_CASE("gini agrees with the pairwise definition") {
    std::mt19937_64 gen(4);
    std::exponential_distribution<double> d(1.0);
    for (int k = 0; k < 50; ++k) {
      std::vector<double> x(1 + k * 3);
      for (auto& v : x) v = d(gen);
      const double g = gini(x);
      CHECK(g == doctest::Approx(pairwise_gini(x)).epsilon(1e-12));
      CHECK(g >= 0.0);
      CHECK(g < 1.0);

      auto scaled = x;
      for (auto& v : scaled) v *= 7.5;
      CHECK(gini(scaled) == doctest::Approx(g).epsilon(1e-12));
      auto doubled = x;
      doubled.insert(doubled.end(), x.begin(), x.end());
      CHECK(gini(doubled) == doctest::Approx(g).epsilon(1e-12));
    }
  }

  TEST_CASE("sen welfare") {
    const std::vector<double> one_rich{0, 0, 0, 1};
    CHECK(sen_welfare(one_rich) == doctest::Approx(0.0625).epsilon(1e-14));
    CHECK(sen_welfare(one_rich, 0.0) == doctest::Approx(0.25));
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> d(0, 3);
    for (int k = 0; k < 30; ++k) {
      std::vector<double> x(10);
      double mean = 0;
      for (auto& v : x) mean += (v = d(gen));
      mean /= 10;
      CHECK(sen_welfare(x) <= mean + 1e-12);
      CHECK(sen_welfare(x) >= 0.0);
    }
  }

  TEST_CASE("trait correlation") {
    const std::vector<double> a{1, 2, 3}, b{2, 4, 7};
    const auto r = trait_correlation(a, b);
    REQUIRE(r);
    CHECK(*r == doctest::Approx(pearson_oracle(a, b)).epsilon(1e-13));
    CHECK(*r == doctest::Approx(0.9934).epsilon(1e-4));
    CHECK(*trait_correlation(b, a) == doctest::Approx(*r).epsilon(1e-15));
    const std::vector<double> flat{1, 1, 1};
    CHECK_FALSE(trait_correlation(a, flat));
    CHECK_FALSE(trait_correlation(std::vector<double>{1}, std::vector<double>{2}));
    CHECK_FALSE(trait_correlation(a, std::vector<double>{1, 2}));
    const std::vector<double> rev{3, 2, 1};
    CHECK(*trait_correlation(a, rev) == doctest::Approx(-1.0));
  }

  TEST_CASE("population summary") {
    std::vector<AgentState> agents(3);
    const double wealth[] = {0.0, 1.0, 3.0};
    const double income[] = {-0.5, 0.5, 1.5};
    for (std::size_t k = 0; k < 3; ++k) {
      agents[k].id = k;
      agents[k].lambda = 1.0 + static_cast<double>(k);
      agents[k].eta = 1.0;
      agents[k].wealth = wealth[k];
      agents[k].recent_wealth = income[k];
      agents[k].game = {0.5, 0.5};
    }
    SocialNetwork g(3);
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    const MetricsRecord r = population_summary(agents, g, {3, 4}, 7, 2);
    CHECK(r.period == 7);
    CHECK(r.replicate == 2);
    CHECK(r.mean_income == doctest::Approx(0.5));
    CHECK(r.mean_wealth == doctest::Approx(4.0 / 3));
    CHECK(r.gini == doctest::Approx(pairwise_gini({0, 1, 3})));
    CHECK(r.sen_welfare == doctest::Approx(0.5 * (1 - r.gini)));
    REQUIRE(r.coop_rate);
    CHECK(*r.coop_rate == 0.75);
    // U == V makes the payoff vectors permutations of each other with correlation +1.
    CHECK(r.mean_Z == doctest::Approx(-1.0));
    CHECK(r.mean_degree == doctest::Approx(4.0 / 3));
    CHECK(r.clustering == 0.0);
    CHECK(*r.corr_lambda_wealth == doctest::Approx(pearson_oracle({1, 2, 3}, {0, 1, 3})));
    CHECK_FALSE(r.corr_eta_wealth);

    const MetricsRecord idle = population_summary(agents, g, {}, 0, 0);
    CHECK_FALSE(idle.coop_rate);
    std::ostringstream os;
    write_metrics_row(os, idle);
    CHECK(os.str().find(",,") != std::string::npos);
  }
}
