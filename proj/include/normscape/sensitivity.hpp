#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "normscape/abm.hpp"

namespace normscape {

struct ParameterRange {
  std::string name;
  double low = 0.0;
  double high = 1.0;
};

// Swept ABM knobs. "alpha" is homophily strength, "n_norm" the payoff normalization strength,
// the *_shift entries are added to the log-mean of the matching trait distribution.
std::vector<ParameterRange> default_sweep_parameters();

struct SweepSpec {
  std::vector<ParameterRange> parameters = default_sweep_parameters();
  std::size_t n_base = 512;
  std::size_t replicates = 3;
  std::size_t bootstrap = 1000;
  double confidence = 0.95;

  std::size_t dimension() const noexcept { return parameters.size(); }
  std::size_t rows() const noexcept { return n_base * (dimension() + 2); }
  void validate() const;  // ConfigError
};

using DesignMatrix = std::vector<std::vector<double>>;

// N (d + 2) rows in blocks of d + 2 per base sample: A_j, then A_j with column i taken from
// B_j for i = 0..d-1, then B_j. A and B come from a 2d-dimensional Sobol sequence.
DesignMatrix saltelli_sample(const SweepSpec& spec);

struct SobolIndices {
  std::vector<double> s1;  // clipped to [0, 1]
  std::vector<double> st;
  std::vector<double> s1_raw;
  std::vector<double> st_raw;
};

// Outputs must follow the saltelli_sample row layout. nullopt when the outputs have no variance.
std::optional<SobolIndices> sobol_indices(std::span<const double> outputs, std::size_t d);

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

struct SobolIntervals {
  std::vector<Interval> s1;
  std::vector<Interval> st;
};

// Percentile intervals from resampling whole base-sample blocks. resamples <= 1 gives the
// degenerate interval at the point estimate.
std::optional<SobolIntervals> bootstrap_ci(std::span<const double> outputs, std::size_t d,
                                           std::size_t resamples, double confidence,
                                           std::uint64_t seed);

SimConfig apply_sweep_point(const SimConfig& base, std::span<const ParameterRange> parameters,
                            std::span<const double> values);

struct SweepOutputs {
  double gini = 0.0;
  double recent_wealth = 0.0;
  double zerosumness = 0.0;
};

// Final-period metrics of one replicate.
SweepOutputs sweep_outputs(const ReplicateResult& result);

struct SweepRecord {
  std::size_t row = 0;
  std::size_t replicate = 0;
  std::vector<double> values;
  SweepOutputs outputs;
};

struct SweepJob {
  std::size_t row = 0;
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
};

// Job list in (row, replicate) order; each seed depends only on (master, row, replicate).
std::vector<SweepJob> sweep_jobs(const SweepSpec& spec, std::uint64_t master_seed);

SweepRecord run_sweep_job(const SimConfig& base, const SweepSpec& spec,
                          const DesignMatrix& design, const SweepJob& job);

struct SweepRunOptions {
  std::size_t threads = 0;
  std::size_t max_jobs = 0;  // 0 = no limit; lets a run stop early and be resumed
  std::function<void(const SweepRecord&)> on_record;  // called under a lock, in completion order
};

// Runs every job not already present in `done` (matched by row and replicate). Returns all
// records, old and new, sorted by (row, replicate).
std::vector<SweepRecord> run_sweep(const SimConfig& base, const SweepSpec& spec,
                                   std::uint64_t master_seed, std::vector<SweepRecord> done,
                                   const SweepRunOptions& options = {});

// Per-row output averaged over replicates; requires every (row, replicate) pair.
std::vector<double> row_means(std::span<const SweepRecord> records, const SweepSpec& spec,
                              double SweepOutputs::*field);

// Columns: row,<parameter names...>,replicate,gini,recent_wealth,zerosumness
void write_sweep_header(std::ostream& os, const SweepSpec& spec);
void write_sweep_record(std::ostream& os, const SweepRecord& r);
std::vector<SweepRecord> read_sweep_csv(std::istream& is, const SweepSpec& spec);

}  // namespace normscape
