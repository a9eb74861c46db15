#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "normscape/abm.hpp"
#include "normscape/config.hpp"
#include "normscape/errors.hpp"
#include "normscape/game_space.hpp"
#include "normscape/meanfield.hpp"
#include "normscape/metrics.hpp"
#include "normscape/qre.hpp"
#include "normscape/sensitivity.hpp"
#include "normscape/utility.hpp"

namespace py = pybind11;
using namespace normscape;

namespace {

PayoffMatrix to_matrix(const std::array<std::array<double, 2>, 2>& m) { return {m}; }

py::array_t<double> grid_array(const GridSpec& g, const std::vector<double>& values) {
  py::array_t<double> out({g.u_points, g.v_points});
  auto view = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < g.u_points; ++i)
    for (std::size_t j = 0; j < g.v_points; ++j) view(i, j) = values[g.index(i, j)];
  return out;
}

py::dict attractor_dict(const Game& g, double phi) {
  py::dict d;
  d["U"] = g.u;
  d["V"] = g.v;
  d["phi"] = phi;
  d["class"] = std::string(to_string(classify(g)));
  d["Z"] = zero_sumness(g);
  return d;
}

py::dict metrics_dict(const MetricsRecord& r) {
  py::dict d;
  d["period"] = r.period;
  d["replicate"] = r.replicate;
  d["mean_income"] = r.mean_income;
  d["mean_wealth"] = r.mean_wealth;
  d["gini"] = r.gini;
  d["sen_welfare"] = r.sen_welfare;
  d["coop_rate"] = r.coop_rate;
  d["mean_Z"] = r.mean_Z;
  d["mean_U"] = r.mean_U;
  d["mean_V"] = r.mean_V;
  d["mean_degree"] = r.mean_degree;
  d["clustering"] = r.clustering;
  d["corr_lambda_wealth"] = r.corr_lambda_wealth;
  d["corr_eta_wealth"] = r.corr_eta_wealth;
  d["corr_lambda_income"] = r.corr_lambda_income;
  d["corr_eta_income"] = r.corr_eta_income;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Norm attractors in 2x2 game space";
  m.attr("__version__") = NORMSCAPE_VERSION;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DegeneratePayoffs>(m, "DegeneratePayoffs", PyExc_ValueError);
  py::register_exception<NoConvergence>(m, "NoConvergence", PyExc_RuntimeError);

  py::class_<Game>(m, "Game")
      .def(py::init<double, double>(), py::arg("u"), py::arg("v"))
      .def_readwrite("u", &Game::u)
      .def_readwrite("v", &Game::v)
      .def("__repr__", [](const Game& g) {
        return "Game(u=" + std::to_string(g.u) + ", v=" + std::to_string(g.v) + ")";
      });

  m.def("from_canonical", &from_canonical, py::arg("reward"), py::arg("sucker"),
        py::arg("temptation"), py::arg("punishment"));
  m.def("zero_sumness", [](double u, double v) { return zero_sumness({u, v}); }, py::arg("u"),
        py::arg("v"));
  m.def(
      "classify",
      [](double u, double v, bool dl_corner) {
        return std::string(to_string(classify({u, v}, {dl_corner})));
      },
      py::arg("u"), py::arg("v"), py::arg("dl_corner") = true);

  py::class_<UtilityModel>(m, "UtilityModel")
      .def_static("risk_neutral", &UtilityModel::risk_neutral)
      .def_static("linex", &UtilityModel::linex, py::arg("eta"))
      .def_static("prospect", &UtilityModel::prospect, py::arg("eta"), py::arg("omega") = 2.0,
                  py::arg("reference") = 0.0)
      .def_property_readonly("kind", [](const UtilityModel& u) { return std::string(to_string(u.kind)); })
      .def_readonly("eta", &UtilityModel::eta)
      .def_readonly("omega", &UtilityModel::omega)
      .def_readonly("reference", &UtilityModel::reference)
      .def("__call__", [](const UtilityModel& u, double c) { return evaluate(u, c); });

  m.def(
      "solve_qre",
      [](const std::array<std::array<double, 2>, 2>& m1,
         const std::array<std::array<double, 2>, 2>& m2, double precision1, double precision2,
         double tolerance) {
        QreOptions opts;
        opts.tolerance = tolerance;
        const QreSolution s = solve_2x2(to_matrix(m1), to_matrix(m2), precision1, precision2, opts);
        return py::make_tuple(s.p1_cooperate, s.p2_cooperate, s.residual);
      },
      py::arg("m1"), py::arg("m2"), py::arg("precision1"), py::arg("precision2"),
      py::arg("tolerance") = 1e-10,
      "Logit QRE of a 2x2 game; each matrix is indexed [own action][opponent action] with "
      "0 = cooperate. Returns (p1_cooperate, p2_cooperate, residual).");

  m.def(
      "aggregate_cooperation",
      [](double u, double v, const UtilityModel& family, double mu_lambda, double sigma_lambda,
         double mu_eta, double sigma_eta, std::size_t nodes) {
        const TraitDistributions d{mu_lambda, sigma_lambda, mu_eta, sigma_eta};
        d.validate();
        return aggregate_S({u, v}, d, family, nodes).cooperation;
      },
      py::arg("u"), py::arg("v"), py::arg("family"), py::arg("mu_lambda") = 1.0,
      py::arg("sigma_lambda") = 0.5, py::arg("mu_eta") = 1.4, py::arg("sigma_eta") = 0.5,
      py::arg("nodes") = 5);

  m.def(
      "landscape",
      [](const std::string& config_json, std::size_t threads) {
        const ConfigDocument doc = parse_config_text(config_json, "<python>");
        LandscapeRunConfig cfg = parse_landscape_config(doc, false);
        cfg.options.threads = threads;
        Landscape l;
        {
          py::gil_scoped_release release;
          l = compute_landscape(cfg.grid, cfg.traits, cfg.family, cfg.options);
        }
        py::list attractors;
        for (const Attractor& a : l.attractors) attractors.append(attractor_dict(a.game, a.phi));
        py::dict out;
        py::array_t<double> us(l.grid.u_points), vs(l.grid.v_points);
        auto u = us.mutable_unchecked<1>();
        auto v = vs.mutable_unchecked<1>();
        for (std::size_t i = 0; i < l.grid.u_points; ++i) u(i) = l.grid.point(i, 0).u;
        for (std::size_t j = 0; j < l.grid.v_points; ++j) v(j) = l.grid.point(0, j).v;
        out["u"] = us;
        out["v"] = vs;
        out["cooperation"] = grid_array(l.grid, l.cooperation);
        out["fitness"] = grid_array(l.grid, l.fitness);
        out["grad_u"] = grid_array(l.grid, l.grad_u);
        out["grad_v"] = grid_array(l.grid, l.grad_v);
        out["attractors"] = attractors;
        out["qre_failures"] = l.diagnostics.failures;
        return out;
      },
      py::arg("config_json") = "{}", py::arg("threads") = 0,
      "Fitness landscape from a JSON config (same schema as the CLI).");

  m.def(
      "run_abm",
      [](const std::string& config_json, std::uint64_t seed, std::size_t threads) {
        const ConfigDocument doc = parse_config_text(config_json, "<python>");
        AbmRunConfig cfg = parse_abm_config(doc);
        cfg.sim.seed = seed;
        cfg.sim.threads = threads;
        std::vector<ReplicateResult> results;
        {
          py::gil_scoped_release release;
          results = run_simulation(cfg.sim);
        }
        py::list out;
        for (const auto& r : results) {
          py::list rows;
          for (const auto& rec : r.metrics) rows.append(metrics_dict(rec));
          out.append(rows);
        }
        return out;
      },
      py::arg("config_json") = "{}", py::arg("seed") = 42, py::arg("threads") = 0,
      "Agent-based runs; returns one list of per-period metric dicts per replicate.");

  m.def("gini", [](const std::vector<double>& x) { return gini(x); }, py::arg("values"));
  m.def(
      "sen_welfare",
      [](const std::vector<double>& x, double alpha) { return sen_welfare(x, alpha); },
      py::arg("values"), py::arg("inequality_aversion") = 1.0);
  m.def(
      "trait_correlation",
      [](const std::vector<double>& x, const std::vector<double>& y) {
        return trait_correlation(x, y);
      },
      py::arg("traits"), py::arg("outcomes"));

  m.def(
      "saltelli_sample",
      [](const std::vector<std::tuple<std::string, double, double>>& parameters,
         std::size_t n_base) {
        SweepSpec spec;
        spec.parameters.clear();
        for (const auto& [name, lo, hi] : parameters) spec.parameters.push_back({name, lo, hi});
        spec.n_base = n_base;
        const DesignMatrix rows = saltelli_sample(spec);
        py::array_t<double> out({rows.size(), spec.dimension()});
        auto view = out.mutable_unchecked<2>();
        for (std::size_t r = 0; r < rows.size(); ++r)
          for (std::size_t k = 0; k < spec.dimension(); ++k) view(r, k) = rows[r][k];
        return out;
      },
      py::arg("parameters"), py::arg("n_base"),
      "Saltelli design for [(name, low, high), ...]; N (d + 2) rows.");
  m.def(
      "sobol_indices",
      [](const std::vector<double>& outputs, std::size_t d) -> py::object {
        const auto idx = sobol_indices(outputs, d);
        if (!idx) return py::none();
        py::dict out;
        out["S1"] = idx->s1;
        out["ST"] = idx->st;
        out["S1_raw"] = idx->s1_raw;
        out["ST_raw"] = idx->st_raw;
        return std::move(out);
      },
      py::arg("outputs"), py::arg("d"));
}
