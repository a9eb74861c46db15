#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "normscape/abm.hpp"
#include "normscape/config.hpp"
#include "normscape/csv.hpp"
#include "normscape/errors.hpp"
#include "normscape/game_space.hpp"
#include "normscape/meanfield.hpp"
#include "normscape/sensitivity.hpp"

namespace fs = std::filesystem;
using namespace normscape;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr std::uint64_t kDefaultSeed = 42;

struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::size_t threads = 0;
};

class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  std::ofstream open(const std::string& name, std::ios::openmode mode = std::ios::trunc) {
    std::ofstream os(dir_ / name, std::ios::binary | std::ios::out | mode);
    if (!os) throw std::runtime_error("cannot write " + (dir_ / name).string());
    if (std::find(names_.begin(), names_.end(), name) == names_.end()) names_.push_back(name);
    return os;
  }

  const fs::path& dir() const { return dir_; }

  void manifest(const std::string& command, const Json& config, std::uint64_t seed,
                std::chrono::steady_clock::time_point start) {
    RunManifest m;
    m.command = command;
    m.config = config;
    m.seed = seed;
    m.version = NORMSCAPE_VERSION;
    for (const auto& n : names_) m.outputs.push_back((dir_ / n).string());
    m.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ofstream os(dir_ / "manifest.json", std::ios::binary);
    os << to_json(m).dump(2) << '\n';
  }

 private:
  fs::path dir_;
  std::vector<std::string> names_;
};

Json attractor_json(const Game& g, double phi, double gradient_norm) {
  return {{"U", g.u},
          {"V", g.v},
          {"phi", phi},
          {"class", std::string(to_string(classify(g)))},
          {"Z", zero_sumness(g)},
          {"gradient_norm", gradient_norm}};
}

void check_budget(const SolveDiagnostics& d, double budget) {
  if (d.solves > 0 && static_cast<double>(d.failures) > budget * static_cast<double>(d.solves)) {
    throw NumericalFailure(std::to_string(d.failures) + " of " + std::to_string(d.solves) +
                           " QRE solves did not converge (budget " + format_number(budget) + ")");
  }
}

std::uint64_t resolve_seed(const Options& o, const ConfigDocument& doc) {
  return o.seed.value_or(doc.seed.value_or(kDefaultSeed));
}

int cmd_landscape(const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  const ConfigDocument doc = load_config_file(o.config);
  LandscapeRunConfig cfg = parse_landscape_config(doc, false);
  cfg.options.threads = o.threads;
  const std::uint64_t seed = resolve_seed(o, doc);

  const Landscape l = compute_landscape(cfg.grid, cfg.traits, cfg.family, cfg.options);
  Outputs out(o.out);
  {
    auto os = out.open("landscape.csv");
    write_landscape_csv(os, l);
  }
  Json list = Json::array();
  for (const Attractor& a : l.attractors) list.push_back(attractor_json(a.game, a.phi, a.gradient_norm));
  {
    auto os = out.open("attractors.json");
    os << list.dump(2) << '\n';
  }
  out.manifest("landscape", to_json(cfg, false), seed, start);
  std::cerr << "landscape: " << l.attractors.size() << " attractor(s)";
  if (!l.attractors.empty()) {
    const Game& top = l.attractors.front().game;
    std::cerr << ", top (" << format_number(top.u) << ", " << format_number(top.v) << ") "
              << to_string(classify(top));
  }
  std::cerr << '\n';
  check_budget(l.diagnostics, cfg.failure_budget);
  return 0;
}

int cmd_trajectory(const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  const ConfigDocument doc = load_config_file(o.config);
  LandscapeRunConfig cfg = parse_landscape_config(doc, true);
  cfg.options.threads = o.threads;
  const std::uint64_t seed = resolve_seed(o, doc);

  const auto points = trajectory(cfg.waypoints, cfg.grid, cfg.traits, cfg.family, cfg.options);
  Outputs out(o.out);
  SolveDiagnostics total;
  {
    auto os = out.open("trajectory.csv");
    os << "mu_eta,mu_lambda,U,V,class,U_hat,V_hat,phi,is_attractor\n";
    for (const auto& p : points) {
      os << format_number(p.mu_eta) << ',' << format_number(p.mu_lambda) << ','
         << format_number(p.attractor.u) << ',' << format_number(p.attractor.v) << ','
         << to_string(classify(p.attractor)) << ',' << format_number(p.perceived.u) << ','
         << format_number(p.perceived.v) << ',' << format_number(p.phi) << ','
         << (p.is_attractor ? 1 : 0) << '\n';
      total += p.diagnostics;
    }
  }
  out.manifest("trajectory", to_json(cfg, true), seed, start);
  check_budget(total, cfg.failure_budget);
  return 0;
}

int cmd_abm(const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  const ConfigDocument doc = load_config_file(o.config);
  AbmRunConfig cfg = parse_abm_config(doc);
  cfg.sim.seed = resolve_seed(o, doc);
  cfg.sim.threads = o.threads;

  const auto results = run_simulation(cfg.sim);
  Outputs out(o.out);
  std::size_t failures = 0, interactions = 0;
  {
    auto os = out.open("metrics.csv");
    write_metrics_header(os);
    for (const auto& r : results)
      for (const auto& m : r.metrics) write_metrics_row(os, m);
  }
  for (std::size_t k = 0; k < results.size(); ++k) {
    if (cfg.write_agents) {
      auto os = out.open("agents_r" + std::to_string(k) + ".csv");
      write_agents_csv(os, results[k].final_state);
    }
    failures += results[k].diagnostics.qre_failures;
    interactions += results[k].diagnostics.interactions;
  }
  out.manifest("abm", to_json(cfg), cfg.sim.seed, start);
  check_budget({interactions, 0, failures}, cfg.failure_budget);
  return 0;
}

Json indices_json(const SweepRunConfig& cfg, const std::vector<SweepRecord>& records,
                  std::uint64_t seed) {
  const std::size_t d = cfg.spec.dimension();
  Json out = Json::object();
  const std::pair<const char*, double SweepOutputs::*> fields[] = {
      {"gini", &SweepOutputs::gini},
      {"recent_wealth", &SweepOutputs::recent_wealth},
      {"zerosumness", &SweepOutputs::zerosumness}};
  for (const auto& [name, field] : fields) {
    const std::vector<double> y = row_means(records, cfg.spec, field);
    const auto idx = sobol_indices(y, d);
    const auto ci = bootstrap_ci(y, d, cfg.spec.bootstrap, cfg.spec.confidence, seed);
    Json rows = Json::array();
    for (std::size_t i = 0; i < d; ++i) {
      Json row;
      row["parameter"] = cfg.spec.parameters[i].name;
      row["S1"] = idx ? Json(idx->s1[i]) : Json(nullptr);
      row["S1_CI"] = ci ? Json::array({ci->s1[i].low, ci->s1[i].high}) : Json(nullptr);
      row["ST"] = idx ? Json(idx->st[i]) : Json(nullptr);
      row["ST_CI"] = ci ? Json::array({ci->st[i].low, ci->st[i].high}) : Json(nullptr);
      row["S1_raw"] = idx ? Json(idx->s1_raw[i]) : Json(nullptr);
      row["ST_raw"] = idx ? Json(idx->st_raw[i]) : Json(nullptr);
      rows.push_back(row);
    }
    out[name] = rows;
  }
  return out;
}

int cmd_sweep(const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  const ConfigDocument doc = load_config_file(o.config);
  SweepRunConfig cfg = parse_sweep_config(doc);
  const std::uint64_t seed = resolve_seed(o, doc);
  Outputs out(o.out);

  // Resume: keep rows already present in results.csv and append the missing jobs.
  std::vector<SweepRecord> done;
  const fs::path results = out.dir() / "results.csv";
  if (fs::exists(results)) {
    std::ifstream in(results, std::ios::binary);
    done = read_sweep_csv(in, cfg.spec);
  }
  {
    auto os = out.open("results.csv");
    write_sweep_header(os, cfg.spec);
    for (const auto& r : done) write_sweep_record(os, r);
  }
  std::ofstream append(results, std::ios::binary | std::ios::app);
  SweepRunOptions run;
  run.threads = o.threads;
  run.max_jobs = cfg.max_jobs;
  run.on_record = [&](const SweepRecord& r) {
    write_sweep_record(append, r);
    append.flush();
  };
  const std::size_t before = done.size();
  auto records = run_sweep(cfg.base, cfg.spec, seed, std::move(done), run);
  append.close();
  std::cerr << "sweep: " << records.size() - before << " job(s) run, " << records.size() << " of "
            << cfg.spec.rows() * cfg.spec.replicates << " complete\n";

  // Canonical order so the file does not depend on completion order.
  {
    auto os = out.open("results.csv");
    write_sweep_header(os, cfg.spec);
    for (const auto& r : records) write_sweep_record(os, r);
  }
  if (records.size() == cfg.spec.rows() * cfg.spec.replicates) {
    auto os = out.open("indices.json");
    os << indices_json(cfg, records, seed).dump(2) << '\n';
  }
  out.manifest("sweep", to_json(cfg), seed, start);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Norm attractors in 2x2 game space: mean-field landscapes and agent-based runs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(NORMSCAPE_VERSION));
  Options opts;
  const auto add = [&](const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opts.config, "JSON config or run manifest")
        ->required();
    sub->add_option("--seed", opts.seed, "master seed (default: manifest/config seed, else 42)");
    sub->add_option("--out", opts.out, "output directory")->capture_default_str();
    sub->add_option("--threads", opts.threads, "worker threads (0: NORMSCAPE_THREADS or all cores)");
    return sub;
  };
  CLI::App* landscape = add("landscape", "fitness landscape and attractors");
  CLI::App* traj = add("trajectory", "attractor path over trait-distribution waypoints");
  CLI::App* abm = add("abm", "agent-based simulation");
  CLI::App* sweep = add("sweep", "Saltelli sweep and Sobol indices");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (landscape->parsed()) return cmd_landscape(opts);
    if (traj->parsed()) return cmd_trajectory(opts);
    if (abm->parsed()) return cmd_abm(opts);
    if (sweep->parsed()) return cmd_sweep(opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
