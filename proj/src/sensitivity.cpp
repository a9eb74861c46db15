#include "normscape/sensitivity.hpp"

#include <algorithm>
#include <boost/random/sobol.hpp>
#include <cmath>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "normscape/csv.hpp"
#include "normscape/errors.hpp"
#include "normscape/parallel.hpp"
#include "normscape/rng.hpp"

namespace normscape {

std::vector<ParameterRange> default_sweep_parameters() {
  return {{"alpha", 0.0, 2.0},
          {"lambda_shift", 0.1, 5.0},
          {"n_norm", 0.0, 1.0},
          {"eta_shift", 0.1, 5.0},
          {"omega_shift", 1.0, 4.0}};
}

void SweepSpec::validate() const {
  if (parameters.empty()) throw ConfigError("parameters", "at least one parameter is required");
  for (const auto& p : parameters) {
    if (!std::isfinite(p.low) || !std::isfinite(p.high) || p.low > p.high) {
      throw ConfigError("parameters." + p.name, "range must be finite with low <= high");
    }
  }
  if (n_base == 0 || (n_base & (n_base - 1)) != 0) {
    throw ConfigError("n_base", "must be a power of two");
  }
  if (replicates == 0) throw ConfigError("replicates", "must be >= 1");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw ConfigError("confidence", "must lie in (0, 1)");
  }
}

DesignMatrix saltelli_sample(const SweepSpec& spec) {
  spec.validate();
  const std::size_t d = spec.dimension();
  boost::random::sobol engine(2 * d);
  const double scale = static_cast<double>(engine.max()) + 1.0;
  DesignMatrix rows;
  rows.reserve(spec.rows());
  std::vector<double> a(d), b(d);
  const auto to_range = [&](std::size_t k, double unit) {
    const auto& p = spec.parameters[k];
    return p.low + unit * (p.high - p.low);
  };
  for (std::size_t j = 0; j < spec.n_base; ++j) {
    for (std::size_t k = 0; k < d; ++k) a[k] = to_range(k, static_cast<double>(engine()) / scale);
    for (std::size_t k = 0; k < d; ++k) b[k] = to_range(k, static_cast<double>(engine()) / scale);
    rows.push_back(a);
    for (std::size_t i = 0; i < d; ++i) {
      std::vector<double> mixed = a;
      mixed[i] = b[i];
      rows.push_back(std::move(mixed));
    }
    rows.push_back(b);
  }
  return rows;
}

namespace {

// Estimates over the base blocks listed in `blocks` (indices into the design, repeats allowed).
std::optional<SobolIndices> estimate(std::span<const double> y, std::size_t d,
                                     std::span<const std::size_t> blocks) {
  const std::size_t stride = d + 2;
  const double n = static_cast<double>(blocks.size());
  double mean = 0.0;
  for (const std::size_t j : blocks) mean += y[j * stride] + y[j * stride + d + 1];
  mean /= 2.0 * n;
  double var = 0.0;
  for (const std::size_t j : blocks) {
    const double da = y[j * stride] - mean, db = y[j * stride + d + 1] - mean;
    var += da * da + db * db;
  }
  var /= 2.0 * n;
  if (!(var > 0.0) || !std::isfinite(var)) return std::nullopt;

  SobolIndices out;
  out.s1_raw.assign(d, 0.0);
  out.st_raw.assign(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    double first = 0.0, total = 0.0;
    for (const std::size_t j : blocks) {
      const double fa = y[j * stride], fb = y[j * stride + d + 1], fab = y[j * stride + 1 + i];
      first += fb * (fab - fa);
      total += (fa - fab) * (fa - fab);
    }
    out.s1_raw[i] = first / n / var;
    out.st_raw[i] = 0.5 * total / n / var;
  }
  const auto clip = [](double v) { return std::clamp(v, 0.0, 1.0); };
  out.s1.resize(d);
  out.st.resize(d);
  std::transform(out.s1_raw.begin(), out.s1_raw.end(), out.s1.begin(), clip);
  std::transform(out.st_raw.begin(), out.st_raw.end(), out.st.begin(), clip);
  return out;
}

std::size_t base_count(std::span<const double> y, std::size_t d) {
  if (d == 0 || y.empty() || y.size() % (d + 2) != 0) {
    throw std::invalid_argument("output length must be a multiple of d + 2");
  }
  for (const double v : y)
    if (!std::isfinite(v)) throw std::invalid_argument("outputs must be finite");
  return y.size() / (d + 2);
}

// Linear interpolation between order statistics of a sorted sample.
double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::optional<SobolIndices> sobol_indices(std::span<const double> outputs, std::size_t d) {
  const std::size_t n = base_count(outputs, d);
  std::vector<std::size_t> all(n);
  for (std::size_t j = 0; j < n; ++j) all[j] = j;
  return estimate(outputs, d, all);
}

std::optional<SobolIntervals> bootstrap_ci(std::span<const double> outputs, std::size_t d,
                                           std::size_t resamples, double confidence,
                                           std::uint64_t seed) {
  const std::size_t n = base_count(outputs, d);
  const auto point = sobol_indices(outputs, d);
  if (!point) return std::nullopt;
  SobolIntervals ci;
  if (resamples <= 1) {
    for (std::size_t i = 0; i < d; ++i) {
      ci.s1.push_back({point->s1_raw[i], point->s1_raw[i]});
      ci.st.push_back({point->st_raw[i], point->st_raw[i]});
    }
    return ci;
  }
  Rng rng = make_rng(seed, {0xb007});
  std::vector<std::vector<double>> s1(d), st(d);
  std::vector<std::size_t> blocks(n);
  for (std::size_t b = 0; b < resamples; ++b) {
    for (auto& j : blocks) j = uniform_index(rng, n);
    const auto est = estimate(outputs, d, blocks);
    if (!est) continue;  // a resample with no variance carries no information
    for (std::size_t i = 0; i < d; ++i) {
      s1[i].push_back(est->s1_raw[i]);
      st[i].push_back(est->st_raw[i]);
    }
  }
  if (s1[0].empty()) return std::nullopt;
  const double tail = 0.5 * (1.0 - confidence);
  for (std::size_t i = 0; i < d; ++i) {
    std::sort(s1[i].begin(), s1[i].end());
    std::sort(st[i].begin(), st[i].end());
    ci.s1.push_back({quantile(s1[i], tail), quantile(s1[i], 1.0 - tail)});
    ci.st.push_back({quantile(st[i], tail), quantile(st[i], 1.0 - tail)});
  }
  return ci;
}

SimConfig apply_sweep_point(const SimConfig& base, std::span<const ParameterRange> parameters,
                            std::span<const double> values) {
  if (parameters.size() != values.size()) {
    throw std::invalid_argument("parameter and value counts differ");
  }
  SimConfig cfg = base;
  for (std::size_t k = 0; k < parameters.size(); ++k) {
    const std::string& name = parameters[k].name;
    const double x = values[k];
    if (name == "alpha") cfg.homophily = x;
    else if (name == "lambda_shift") cfg.lambda.mu = base.lambda.mu + x;
    else if (name == "eta_shift") cfg.eta.mu = base.eta.mu + x;
    else if (name == "omega_shift") cfg.omega.mu = base.omega.mu + x;
    else if (name == "n_norm") cfg.normalization = x;
    else if (name == "delta_b") cfg.belief_dependence = x;
    else if (name == "delta_g") cfg.learning_rate = x;
    else if (name == "rho") cfg.homophily_threshold = x;
    else throw ConfigError("parameters", "unknown sweep parameter '" + name + "'");
  }
  return cfg;
}

SweepOutputs sweep_outputs(const ReplicateResult& result) {
  if (result.metrics.empty()) throw std::invalid_argument("replicate has no metrics");
  const MetricsRecord& last = result.metrics.back();
  return {last.gini, last.mean_income, last.mean_Z};
}

std::vector<SweepJob> sweep_jobs(const SweepSpec& spec, std::uint64_t master_seed) {
  std::vector<SweepJob> jobs;
  jobs.reserve(spec.rows() * spec.replicates);
  for (std::size_t row = 0; row < spec.rows(); ++row)
    for (std::size_t r = 0; r < spec.replicates; ++r)
      jobs.push_back({row, r, derive_seed(master_seed, {0x5eed, row, r})});
  return jobs;
}

SweepRecord run_sweep_job(const SimConfig& base, const SweepSpec& spec,
                          const DesignMatrix& design, const SweepJob& job) {
  SimConfig cfg = apply_sweep_point(base, spec.parameters, design.at(job.row));
  cfg.seed = job.seed;
  cfg.replicates = 1;
  SweepRecord rec;
  rec.row = job.row;
  rec.replicate = job.replicate;
  rec.values = design[job.row];
  rec.outputs = sweep_outputs(run_replicate(cfg, 0));
  return rec;
}

std::vector<SweepRecord> run_sweep(const SimConfig& base, const SweepSpec& spec,
                                   std::uint64_t master_seed, std::vector<SweepRecord> done,
                                   const SweepRunOptions& options) {
  const DesignMatrix design = saltelli_sample(spec);
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> have;
  for (std::size_t k = 0; k < done.size(); ++k) have[{done[k].row, done[k].replicate}] = k;

  std::vector<SweepJob> todo;
  for (const SweepJob& job : sweep_jobs(spec, master_seed)) {
    if (have.contains({job.row, job.replicate})) continue;
    if (options.max_jobs != 0 && todo.size() >= options.max_jobs) break;
    todo.push_back(job);
  }
  // Simulations run in parallel; each job is single-threaded.
  SimConfig job_base = base;
  job_base.threads = 1;
  std::vector<SweepRecord> fresh(todo.size());
  std::mutex mu;
  parallel_for(todo.size(), options.threads, [&](std::size_t k) {
    fresh[k] = run_sweep_job(job_base, spec, design, todo[k]);
    if (options.on_record) {
      std::lock_guard lock(mu);
      options.on_record(fresh[k]);
    }
  });
  for (auto& r : fresh) done.push_back(std::move(r));
  std::sort(done.begin(), done.end(), [](const SweepRecord& x, const SweepRecord& y) {
    return std::pair(x.row, x.replicate) < std::pair(y.row, y.replicate);
  });
  return done;
}

std::vector<double> row_means(std::span<const SweepRecord> records, const SweepSpec& spec,
                              double SweepOutputs::*field) {
  std::vector<double> sum(spec.rows(), 0.0);
  std::vector<std::size_t> count(spec.rows(), 0);
  for (const SweepRecord& r : records) {
    if (r.row >= spec.rows()) throw std::invalid_argument("record row outside the design");
    sum[r.row] += r.outputs.*field;
    ++count[r.row];
  }
  for (std::size_t row = 0; row < spec.rows(); ++row) {
    if (count[row] != spec.replicates) {
      throw std::invalid_argument("sweep incomplete at row " + std::to_string(row));
    }
    sum[row] /= static_cast<double>(count[row]);
  }
  return sum;
}

void write_sweep_header(std::ostream& os, const SweepSpec& spec) {
  os << "row";
  for (const auto& p : spec.parameters) os << ',' << p.name;
  os << ",replicate,gini,recent_wealth,zerosumness\n";
}

void write_sweep_record(std::ostream& os, const SweepRecord& r) {
  os << r.row;
  for (const double v : r.values) os << ',' << format_number(v);
  os << ',' << r.replicate << ',' << format_number(r.outputs.gini) << ','
     << format_number(r.outputs.recent_wealth) << ',' << format_number(r.outputs.zerosumness)
     << '\n';
}

std::vector<SweepRecord> read_sweep_csv(std::istream& is, const SweepSpec& spec) {
  std::ostringstream expected;
  write_sweep_header(expected, spec);
  std::string header;
  if (!std::getline(is, header)) return {};
  if (header + '\n' != expected.str()) {
    throw ConfigError("results", "existing results file has a different column layout");
  }
  const std::size_t d = spec.dimension();
  std::vector<SweepRecord> out;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    // Every record is written with its newline, so an unterminated last line is a torn write
    // from an interrupted run and is dropped.
    if (is.eof()) break;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    try {
      if (cells.size() != d + 5) throw std::invalid_argument("column count");
      SweepRecord r;
      r.row = std::stoul(cells[0]);
      for (std::size_t k = 0; k < d; ++k) r.values.push_back(std::stod(cells[1 + k]));
      r.replicate = std::stoul(cells[1 + d]);
      r.outputs = {std::stod(cells[2 + d]), std::stod(cells[3 + d]), std::stod(cells[4 + d])};
      if (r.row < spec.rows() && r.replicate < spec.replicates) out.push_back(std::move(r));
    } catch (const std::exception&) {
      throw ConfigError("results", "unreadable row at line " + std::to_string(line_no));
    }
  }
  return out;
}

}  // namespace normscape
