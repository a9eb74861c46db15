#include "normscape/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "normscape/errors.hpp"

namespace normscape {

namespace {

std::size_t line_of(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + offset, '\n'));
}

// Best-effort source line of a dotted field path: each component is searched after the
// previous one, which is right for the usual one-key-per-line layout.
std::optional<std::size_t> locate(const std::string& text, const std::string& path) {
  std::size_t pos = 0;
  std::stringstream ss(path);
  bool found = false;
  for (std::string part; std::getline(ss, part, '.');) {
    if (part.empty() || part.front() == '[') continue;
    const auto at = text.find('"' + part + '"', pos);
    if (at == std::string::npos) break;
    pos = at + part.size() + 2;
    found = true;
  }
  if (!found) return std::nullopt;
  return line_of(text, pos);
}

class Reader {
 public:
  Reader(const Json& obj, std::string path, const ConfigDocument& doc)
      : obj_(obj), path_(std::move(path)), doc_(doc) {
    if (!obj_.is_object()) fail(path_, "expected an object");
  }

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    std::string where = doc_.origin;
    if (const auto line = locate(doc_.text, field)) where += ":" + std::to_string(*line);
    throw ConfigError(field.empty() ? "<root>" : field, what + " (" + where + ")");
  }

  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const Json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const Json* v = find(key)) {
      if (!v->is_number() || !std::isfinite(v->get<double>())) {
        fail(field(key), "expected a finite number");
      }
      out = v->get<double>();
    }
  }

  void count(const std::string& key, std::size_t& out) {
    if (const Json* v = find(key)) {
      if (!v->is_number_integer() || (v->is_number_integer() && !v->is_number_unsigned() &&
                                      v->get<std::int64_t>() < 0)) {
        fail(field(key), "expected a non-negative integer");
      }
      out = v->get<std::size_t>();
    }
  }

  void flag(const std::string& key, bool& out) {
    if (const Json* v = find(key)) {
      if (!v->is_boolean()) fail(field(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  std::optional<std::string> text(const std::string& key) {
    if (const Json* v = find(key)) {
      if (!v->is_string()) fail(field(key), "expected a string");
      return v->get<std::string>();
    }
    return std::nullopt;
  }

  // Unknown keys are hard errors.
  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.contains(key)) fail(field(key), "unknown field");
    }
  }

  const ConfigDocument& doc() const { return doc_; }

 private:
  const Json& obj_;
  std::string path_;
  const ConfigDocument& doc_;
  std::set<std::string> seen_;
};

template <typename F>
void nested(Reader& parent, const std::string& key, F&& body) {
  if (const Json* v = parent.find(key)) {
    Reader child(*v, parent.field(key), parent.doc());
    body(child);
    child.finish();
  }
}

// Re-raises domain validation failures with the config location attached.
template <typename F>
void checked(const Reader& r, const std::string& field, F&& validate) {
  try {
    validate();
  } catch (const ConfigError& e) {
    r.fail(e.field().empty() ? field : e.field(), e.what());
  } catch (const std::exception& e) {
    r.fail(field, e.what());
  }
}

void read_qre(Reader& r, QreOptions& q) {
  nested(r, "qre", [&](Reader& c) {
    c.number("tolerance", q.tolerance);
    c.number("damping", q.damping);
    c.count("max_iterations", q.max_iterations);
    c.number("min_damping", q.min_damping);
    c.flag("bisection_fallback", q.allow_bisection_fallback);
    if (!(q.tolerance > 0.0)) c.fail(c.field("tolerance"), "must be > 0");
    if (!(q.damping > 0.0 && q.damping <= 1.0)) c.fail(c.field("damping"), "must lie in (0, 1]");
    if (!(q.min_damping > 0.0 && q.min_damping <= q.damping)) {
      c.fail(c.field("min_damping"), "must lie in (0, damping]");
    }
    if (q.max_iterations == 0) c.fail(c.field("max_iterations"), "must be >= 1");
  });
}

void read_bounds(Reader& r, const std::string& key, GameBounds& b) {
  nested(r, key, [&](Reader& c) {
    c.number("u_min", b.u_min);
    c.number("u_max", b.u_max);
    c.number("v_min", b.v_min);
    c.number("v_max", b.v_max);
    if (!(b.u_min < b.u_max && b.v_min < b.v_max)) c.fail(c.field("u_min"), "need min < max");
  });
}

void read_budget(Reader& r, double& budget) {
  r.number("failure_budget", budget);
  if (!(budget >= 0.0 && budget <= 1.0)) r.fail(r.field("failure_budget"), "must lie in [0, 1]");
}

void read_utility(Reader& r, UtilityModel& u) {
  const Json* v = r.find("utility");
  if (!v) return;
  if (v->is_string()) {
    checked(r, r.field("utility"), [&] { u.kind = utility_kind_from_string(v->get<std::string>()); });
    return;
  }
  Reader c(*v, r.field("utility"), r.doc());
  if (const auto kind = c.text("kind")) {
    checked(c, c.field("kind"), [&] { u.kind = utility_kind_from_string(*kind); });
  }
  c.number("omega", u.omega);
  c.number("reference", u.reference);
  c.finish();
  if (!(u.omega > 0.0)) c.fail(c.field("omega"), "must be > 0");
}

void read_sim(Reader& r, SimConfig& s) {
  r.count("n_agents", s.n_agents);
  r.count("periods", s.periods);
  r.count("replicates", s.replicates);
  r.count("warmup", s.warmup);
  r.number("belief_dependence", s.belief_dependence);
  r.number("learning_rate", s.learning_rate);
  r.number("homophily", s.homophily);
  r.number("homophily_threshold", s.homophily_threshold);
  r.number("mutation_coefficient", s.mutation_coefficient);
  r.number("mutation_sigma", s.mutation_sigma);
  r.number("choice_radius", s.choice_radius);
  r.number("normalization", s.normalization);
  r.number("inequality_aversion", s.inequality_aversion);
  for (auto [key, params] : {std::pair{"eta", &s.eta}, {"omega", &s.omega}, {"lambda", &s.lambda}}) {
    nested(r, key, [&](Reader& c) {
      c.number("mu", params->mu);
      c.number("sigma", params->sigma);
    });
  }
  read_bounds(r, "bounds", s.bounds);
  nested(r, "topology", [&](Reader& c) {
    if (const auto kind = c.text("kind")) {
      checked(c, c.field("kind"), [&] { s.topology.kind = topology_from_string(*kind); });
    }
    c.number("mean_degree", s.topology.mean_degree);
    c.number("rewire_probability", s.topology.rewire_probability);
    c.number("triad_probability", s.topology.triad_probability);
  });
  read_qre(r, s.qre);
}

Json qre_json(const QreOptions& q) {
  return {{"tolerance", q.tolerance},
          {"damping", q.damping},
          {"max_iterations", q.max_iterations},
          {"min_damping", q.min_damping},
          {"bisection_fallback", q.allow_bisection_fallback}};
}

Json bounds_json(const GameBounds& b) {
  return {{"u_min", b.u_min}, {"u_max", b.u_max}, {"v_min", b.v_min}, {"v_max", b.v_max}};
}

Json sim_json(const SimConfig& s) {
  Json j;
  j["n_agents"] = s.n_agents;
  j["periods"] = s.periods;
  j["replicates"] = s.replicates;
  j["warmup"] = s.warmup;
  j["belief_dependence"] = s.belief_dependence;
  j["learning_rate"] = s.learning_rate;
  j["homophily"] = s.homophily;
  j["homophily_threshold"] = s.homophily_threshold;
  j["mutation_coefficient"] = s.mutation_coefficient;
  j["mutation_sigma"] = s.mutation_sigma;
  j["choice_radius"] = s.choice_radius;
  j["normalization"] = s.normalization;
  j["inequality_aversion"] = s.inequality_aversion;
  j["eta"] = {{"mu", s.eta.mu}, {"sigma", s.eta.sigma}};
  j["omega"] = {{"mu", s.omega.mu}, {"sigma", s.omega.sigma}};
  j["lambda"] = {{"mu", s.lambda.mu}, {"sigma", s.lambda.sigma}};
  j["bounds"] = bounds_json(s.bounds);
  j["topology"] = {{"kind", std::string(to_string(s.topology.kind))},
                   {"mean_degree", s.topology.mean_degree},
                   {"rewire_probability", s.topology.rewire_probability},
                   {"triad_probability", s.topology.triad_probability}};
  j["qre"] = qre_json(s.qre);
  return j;
}

}  // namespace

ConfigDocument parse_config_text(const std::string& text, const std::string& origin) {
  ConfigDocument doc;
  doc.text = text;
  doc.origin = origin;
  Json root;
  try {
    root = Json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const Json::parse_error& e) {
    throw ConfigError("", origin + ":" + std::to_string(line_of(text, e.byte == 0 ? 0 : e.byte - 1)) +
                              ": malformed JSON: " + e.what());
  }
  if (!root.is_object()) throw ConfigError("", origin + ": top level must be a JSON object");

  // A run manifest can be replayed directly.
  if (root.contains("command") && root.contains("config")) {
    doc.config = root["config"];
    if (root.contains("seed")) {
      if (!root["seed"].is_number_unsigned()) throw ConfigError("seed", "expected an unsigned integer");
      doc.seed = root["seed"].get<std::uint64_t>();
    }
  } else {
    doc.config = root;
    if (doc.config.contains("seed")) {
      const Json& s = doc.config["seed"];
      if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
        Reader(doc.config, "", doc).fail("seed", "expected an unsigned integer");
      }
      doc.seed = s.get<std::uint64_t>();
      doc.config.erase("seed");
    }
  }
  if (!doc.config.is_object()) throw ConfigError("config", origin + ": config must be an object");
  return doc;
}

ConfigDocument load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot read config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

LandscapeRunConfig parse_landscape_config(const ConfigDocument& doc, bool require_waypoints) {
  LandscapeRunConfig c;
  Reader r(doc.config, "", doc);
  read_utility(r, c.family);
  nested(r, "traits", [&](Reader& t) {
    t.number("mu_lambda", c.traits.mu_lambda);
    t.number("sigma_lambda", c.traits.sigma_lambda);
    t.number("mu_eta", c.traits.mu_eta);
    t.number("sigma_eta", c.traits.sigma_eta);
    checked(t, t.field("sigma_eta"), [&] { c.traits.validate(); });
  });
  nested(r, "grid", [&](Reader& g) {
    g.number("u_min", c.grid.bounds.u_min);
    g.number("u_max", c.grid.bounds.u_max);
    g.number("v_min", c.grid.bounds.v_min);
    g.number("v_max", c.grid.bounds.v_max);
    g.count("u_points", c.grid.u_points);
    g.count("v_points", c.grid.v_points);
    checked(g, g.field("u_points"), [&] { c.grid.validate(); });
  });
  r.count("nodes", c.options.nodes);
  if (c.options.nodes < 1 || c.options.nodes > 64) r.fail("nodes", "must lie in [1, 64]");
  read_qre(r, c.options.qre);
  nested(r, "attractors", [&](Reader& a) {
    auto& o = c.options.attractors;
    if (const Json* eps = a.find("epsilon")) {
      if (!eps->is_null()) {
        if (!eps->is_number() || !(eps->get<double>() > 0.0)) {
          a.fail(a.field("epsilon"), "expected a positive number or null");
        }
        o.epsilon = eps->get<double>();
      }
    }
    a.number("epsilon_fraction", o.epsilon_fraction);
    a.flag("project_boundary", o.project_boundary);
    a.flag("hessian_check", o.hessian_check);
    if (!(o.epsilon_fraction > 0.0)) a.fail(a.field("epsilon_fraction"), "must be > 0");
  });
  read_budget(r, c.failure_budget);
  if (const Json* w = r.find("waypoints")) {
    if (!w->is_array()) r.fail("waypoints", "expected an array of [mu_eta, mu_lambda] pairs");
    for (std::size_t k = 0; k < w->size(); ++k) {
      const Json& p = (*w)[k];
      const std::string f = "waypoints[" + std::to_string(k) + "]";
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
        r.fail("waypoints", f + ": expected a numeric pair [mu_eta, mu_lambda]");
      }
      c.waypoints.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
  }
  if (require_waypoints && c.waypoints.empty()) {
    r.fail("waypoints", "trajectory needs at least one waypoint");
  }
  r.finish();
  return c;
}

AbmRunConfig parse_abm_config(const ConfigDocument& doc) {
  AbmRunConfig c;
  Reader r(doc.config, "", doc);
  read_sim(r, c.sim);
  read_budget(r, c.failure_budget);
  r.flag("write_agents", c.write_agents);
  r.finish();
  checked(r, "", [&] { c.sim.validate(); });
  return c;
}

SweepRunConfig parse_sweep_config(const ConfigDocument& doc) {
  SweepRunConfig c;
  Reader r(doc.config, "", doc);
  nested(r, "abm", [&](Reader& a) { read_sim(a, c.base); });
  if (const Json* ps = r.find("parameters")) {
    if (!ps->is_array() || ps->empty()) r.fail("parameters", "expected a non-empty array");
    c.spec.parameters.clear();
    for (std::size_t k = 0; k < ps->size(); ++k) {
      Reader p((*ps)[k], "parameters", doc);
      ParameterRange range;
      const auto name = p.text("name");
      if (!name) p.fail("parameters", "entry " + std::to_string(k) + " needs a name");
      range.name = *name;
      p.number("low", range.low);
      p.number("high", range.high);
      p.finish();
      checked(p, "parameters", [&] {
        apply_sweep_point(c.base, std::vector{range}, std::vector{range.low});
      });
      c.spec.parameters.push_back(range);
    }
  }
  r.count("n_base", c.spec.n_base);
  r.count("replicates", c.spec.replicates);
  r.count("bootstrap", c.spec.bootstrap);
  r.number("confidence", c.spec.confidence);
  r.count("max_jobs", c.max_jobs);
  r.finish();
  checked(r, "", [&] { c.spec.validate(); });
  checked(r, "abm", [&] { c.base.validate(); });
  return c;
}

Json to_json(const LandscapeRunConfig& c, bool include_waypoints) {
  Json j;
  j["utility"] = {{"kind", std::string(to_string(c.family.kind))},
                  {"omega", c.family.omega},
                  {"reference", c.family.reference}};
  j["traits"] = {{"mu_lambda", c.traits.mu_lambda},
                 {"sigma_lambda", c.traits.sigma_lambda},
                 {"mu_eta", c.traits.mu_eta},
                 {"sigma_eta", c.traits.sigma_eta}};
  Json grid = bounds_json(c.grid.bounds);
  grid["u_points"] = c.grid.u_points;
  grid["v_points"] = c.grid.v_points;
  j["grid"] = grid;
  j["nodes"] = c.options.nodes;
  j["qre"] = qre_json(c.options.qre);
  const auto& a = c.options.attractors;
  j["attractors"] = {{"epsilon", a.epsilon ? Json(*a.epsilon) : Json(nullptr)},
                     {"epsilon_fraction", a.epsilon_fraction},
                     {"project_boundary", a.project_boundary},
                     {"hessian_check", a.hessian_check}};
  j["failure_budget"] = c.failure_budget;
  if (include_waypoints) {
    Json w = Json::array();
    for (const auto& [eta, lambda] : c.waypoints) w.push_back({eta, lambda});
    j["waypoints"] = w;
  }
  return j;
}

Json to_json(const AbmRunConfig& c) {
  Json j = sim_json(c.sim);
  j["failure_budget"] = c.failure_budget;
  j["write_agents"] = c.write_agents;
  return j;
}

Json to_json(const SweepRunConfig& c) {
  Json j;
  j["abm"] = sim_json(c.base);
  Json ps = Json::array();
  for (const auto& p : c.spec.parameters) ps.push_back({{"name", p.name}, {"low", p.low}, {"high", p.high}});
  j["parameters"] = ps;
  j["n_base"] = c.spec.n_base;
  j["replicates"] = c.spec.replicates;
  j["bootstrap"] = c.spec.bootstrap;
  j["confidence"] = c.spec.confidence;
  j["max_jobs"] = c.max_jobs;
  return j;
}

Json to_json(const RunManifest& m) {
  return {{"command", m.command},         {"config", m.config},
          {"seed", m.seed},               {"version", m.version},
          {"outputs", m.outputs},         {"duration_seconds", m.duration_seconds}};
}

}  // namespace normscape
