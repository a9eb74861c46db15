#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "normscape/errors.hpp"
#include "normscape/sensitivity.hpp"

using namespace normscape;

namespace {

SweepSpec spec_for(std::vector<ParameterRange> params, std::size_t n_base) {
  SweepSpec s;
  s.parameters = std::move(params);
  s.n_base = n_base;
  return s;
}

template <class F>
std::vector<double> evaluate_design(const DesignMatrix& x, F f) {
  std::vector<double> y;
  y.reserve(x.size());
  for (const auto& row : x) y.push_back(f(row));
  return y;
}

SimConfig tiny_model() {
  SimConfig c;
  c.n_agents = 16;
  c.periods = 8;
  c.warmup = 2;
  c.topology.mean_degree = 4;
  return c;
}

bool same(const SweepRecord& a, const SweepRecord& b) {
  return a.row == b.row && a.replicate == b.replicate && a.values == b.values &&
         a.outputs.gini == b.outputs.gini && a.outputs.recent_wealth == b.outputs.recent_wealth &&
         a.outputs.zerosumness == b.outputs.zerosumness;
}

}  // namespace

TEST_SUITE("sensitivity") {
  TEST_CASE("design size and layout") {
    SweepSpec s;
    CHECK(s.rows() == 3584);
    const DesignMatrix x = saltelli_sample(s);
    REQUIRE(x.size() == 3584);
    const std::size_t d = s.dimension();
    for (std::size_t j = 0; j < s.n_base; ++j) {
      const auto& a = x[j * (d + 2)];
      const auto& b = x[j * (d + 2) + d + 1];
      for (std::size_t i = 0; i < d; ++i) {
        const auto& ab = x[j * (d + 2) + 1 + i];
        for (std::size_t c = 0; c < d; ++c) CHECK(ab[c] == (c == i ? b[c] : a[c]));
      }
    }
    for (const auto& row : x)
      for (std::size_t i = 0; i < d; ++i) {
        CHECK(row[i] >= s.parameters[i].low);
        CHECK(row[i] <= s.parameters[i].high);
      }
    CHECK(saltelli_sample(spec_for({{"x", 0, 1}}, 2)).size() == 6);
    CHECK(saltelli_sample(s) == x);
  }

  TEST_CASE("degenerate ranges give constant columns") {
    const DesignMatrix x = saltelli_sample(spec_for({{"a", 0.3, 0.3}, {"b", 1, 1}}, 8));
    for (const auto& row : x) {
      CHECK(row[0] == 0.3);
      CHECK(row[1] == 1.0);
    }
    const auto y = evaluate_design(x, [](const auto& r) { return r[0] + r[1]; });
    CHECK_FALSE(sobol_indices(y, 2));
    CHECK_FALSE(bootstrap_ci(y, 2, 10, 0.95, 1));
  }

  TEST_CASE("spec validation") {
    SweepSpec s;
    s.n_base = 100;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = {};
    s.parameters[0].low = 3;
    s.parameters[0].high = 1;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = {};
    s.confidence = 1.0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
  }

  TEST_CASE("single influential coordinate") {
    const auto spec = spec_for({{"x1", 0, 1}, {"x2", 0, 1}, {"x3", 0, 1}}, 1024);
    const auto y = evaluate_design(saltelli_sample(spec), [](const auto& r) { return r[0]; });
    const auto s = sobol_indices(y, 3);
    REQUIRE(s);
    CHECK(s->s1[0] == doctest::Approx(1.0).epsilon(0.05));
    CHECK(s->st[0] == doctest::Approx(1.0).epsilon(0.05));
    for (std::size_t i = 1; i < 3; ++i) {
      CHECK(std::abs(s->s1[i]) < 0.05);
      CHECK(std::abs(s->st[i]) < 0.05);
    }
  }

  TEST_CASE("additive model splits variance by coefficient squared") {
    const auto spec = spec_for({{"x1", 0, 1}, {"x2", 0, 1}}, 1024);
    const auto y =
        evaluate_design(saltelli_sample(spec), [](const auto& r) { return r[0] + 2 * r[1]; });
    const auto s = sobol_indices(y, 2);
    REQUIRE(s);
    CHECK(s->s1[0] == doctest::Approx(0.2).epsilon(0.1));
    CHECK(s->s1[1] == doctest::Approx(0.8).epsilon(0.05));
    CHECK(s->s1[0] + s->s1[1] == doctest::Approx(1.0).epsilon(0.05));
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(s->st[i] >= s->s1[i] - 0.05);
      CHECK(s->s1[i] >= 0.0);
      CHECK(s->st[i] <= 1.0);
    }
  }

  TEST_CASE("ishigami benchmark") {
    const double pi = std::numbers::pi;
    const auto spec = spec_for({{"x1", -pi, pi}, {"x2", -pi, pi}, {"x3", -pi, pi}}, 4096);
    const auto y = evaluate_design(saltelli_sample(spec), [](const auto& r) {
      return std::sin(r[0]) + 7.0 * std::pow(std::sin(r[1]), 2) +
             0.1 * std::pow(r[2], 4) * std::sin(r[0]);
    });
    const auto s = sobol_indices(y, 3);
    REQUIRE(s);
    const double s1[] = {0.3139, 0.4424, 0.0};
    const double st[] = {0.5576, 0.4424, 0.2437};
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(std::abs(s->s1[i] - s1[i]) < 0.05);
      CHECK(std::abs(s->st[i] - st[i]) < 0.05);
    }
  }

  TEST_CASE("bootstrap intervals") {
    const auto spec = spec_for({{"x1", 0, 1}, {"x2", 0, 1}}, 256);
    const auto y = evaluate_design(saltelli_sample(spec), [](const auto& r) { return r[0]; });
    const auto point = sobol_indices(y, 2);
    const auto ci = bootstrap_ci(y, 2, 500, 0.95, 11);
    REQUIRE(ci);
    CHECK(ci->s1[0].low > 0.0);
    CHECK(ci->s1[1].low <= 0.0);
    CHECK(ci->s1[1].high >= 0.0);
    CHECK(ci->s1[0].low <= point->s1_raw[0]);
    CHECK(ci->s1[0].high >= point->s1_raw[0]);

    const auto again = bootstrap_ci(y, 2, 500, 0.95, 11);
    CHECK(again->s1[0].low == ci->s1[0].low);
    CHECK(again->st[1].high == ci->st[1].high);

    const auto single = bootstrap_ci(y, 2, 1, 0.95, 11);
    CHECK(single->s1[0].low == point->s1_raw[0]);
    CHECK(single->s1[0].high == point->s1_raw[0]);
  }

  TEST_CASE("sweep points map onto model settings") {
    const SimConfig base;
    const auto params = default_sweep_parameters();
    const std::vector<double> v{0.5, 2.0, 0.25, 1.0, 3.0};
    const SimConfig c = apply_sweep_point(base, params, v);
    CHECK(c.homophily == 0.5);
    CHECK(c.lambda.mu == base.lambda.mu + 2.0);
    CHECK(c.normalization == 0.25);
    CHECK(c.eta.mu == base.eta.mu + 1.0);
    CHECK(c.omega.mu == base.omega.mu + 3.0);
    const std::vector<ParameterRange> bad{{"gamma", 0, 1}};
    const std::vector<double> one{0.5};
    CHECK_THROWS_AS(apply_sweep_point(base, bad, one), ConfigError);
  }

  TEST_CASE("job list and seeds") {
    SweepSpec s;
    const auto jobs = sweep_jobs(s, 42);
    CHECK(jobs.size() == 10752);
    CHECK(jobs[4].row == 1);
    CHECK(jobs[4].replicate == 1);
    CHECK(sweep_jobs(s, 42)[100].seed == jobs[100].seed);
    CHECK(sweep_jobs(s, 43)[100].seed != jobs[100].seed);
    s.n_base = 1024;
    CHECK(sweep_jobs(s, 42)[100].seed == jobs[100].seed);
  }

  TEST_CASE("interrupted sweeps resume to the same result") {
    SweepSpec s;
    s.n_base = 4;
    s.replicates = 2;
    const SimConfig base = tiny_model();
    const auto full = run_sweep(base, s, 9, {});
    REQUIRE(full.size() == 56);

    SweepRunOptions partial;
    partial.max_jobs = 13;
    partial.threads = 2;
    auto first = run_sweep(base, s, 9, {}, partial);
    CHECK(first.size() == 13);
    const auto resumed = run_sweep(base, s, 9, first);
    REQUIRE(resumed.size() == full.size());
    for (std::size_t k = 0; k < full.size(); ++k) CHECK(same(resumed[k], full[k]));

    const auto g = row_means(full, s, &SweepOutputs::gini);
    CHECK(g.size() == 28);
    CHECK(g[3] == doctest::Approx(0.5 * (full[6].outputs.gini + full[7].outputs.gini)));
    CHECK_THROWS(row_means(first, s, &SweepOutputs::gini));
  }

  TEST_CASE("results file round trip") {
    SweepSpec s;
    s.n_base = 4;
    s.replicates = 1;
    const auto recs = run_sweep(tiny_model(), s, 3, {});
    std::stringstream io;
    write_sweep_header(io, s);
    for (const auto& r : recs) write_sweep_record(io, r);
    std::string text = io.str();
    CHECK(text.rfind("row,alpha,lambda_shift,n_norm,eta_shift,omega_shift,replicate,gini,"
                     "recent_wealth,zerosumness\n",
                     0) == 0);
    std::istringstream in(text);
    const auto back = read_sweep_csv(in, s);
    REQUIRE(back.size() == recs.size());
    for (std::size_t k = 0; k < recs.size(); ++k) CHECK(same(back[k], recs[k]));

    // A torn final line is dropped, not fatal.
    std::istringstream torn(text.substr(0, text.size() - 7));
    CHECK(read_sweep_csv(torn, s).size() == recs.size() - 1);

    SweepSpec other = s;
    other.parameters.pop_back();
    std::istringstream mismatch(text);
    CHECK_THROWS_AS(read_sweep_csv(mismatch, other), ConfigError);
  }
}
