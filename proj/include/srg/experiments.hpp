#pragma once

// Benchmark harness: builds a problem from a config, runs one optimiser
// per seed, writes CSV traces and their log-space average, and summarises
// traces side by side.
//
// Trace CSV layout:
//   # meta: key=value          (any number of lines)
//   work,k,rel_err,var,wall_ns
//   <records>
// Numbers use 17 significant digits; lines end in LF. `work` counts
// component-gradient evaluations. wall_ns is 0 unless wall-clock timing
// is switched on, which keeps traces byte-reproducible by default.

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "srg/data_io.hpp"
#include "srg/objective.hpp"
#include "srg/schedules.hpp"

namespace srg {

enum class Algorithm { Sgd, SgdShuffle, Srg, Lsvrg };

std::string to_string(Algorithm algo);
Algorithm algorithm_from_string(const std::string& name);

struct RunConfig {
  Algorithm algorithm = Algorithm::Srg;
  LossKind objective = LossKind::Logistic;
  std::string data_path;                   // LIBSVM file, or
  std::optional<SyntheticSpec> synthetic;  // generated data
  std::optional<bool> normalize;           // default: logistic only
  std::optional<double> mu;                // default: 1/n logistic, 0 ls
  SchedulePreset schedule = SchedulePreset::ConstExperiment;
  std::optional<double> alpha;
  std::optional<double> epsilon;
  std::size_t batch = 128;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  double budget = 4e6;           // component-gradient evaluations
  std::size_t record_every = 0;  // iterations; 0 picks ~200 records
  bool always_update = true;     // SRG: skip the Bernoulli gate
  bool wall_clock = false;
  std::string out_dir = ".";
  std::string cache_dir;  // x* cache; default beside the data file
  unsigned workers = 0;   // 0: SRG_WORKERS or hardware concurrency
  double divergence_threshold = 1e12;

  void validate() const;
};

// Applies one key=value setting. Keys mirror the CLI long options with
// '_' for '-': algo, objective, data, synthetic_seed, synthetic_n,
// synthetic_d, normalize, mu, schedule, alpha, epsilon, batch, seeds,
// seed_base, budget, record_every, always_update, wall_clock, out,
// cache_dir, workers, divergence_threshold.
void apply_setting(RunConfig& cfg, const std::string& key,
                   const std::string& value);
// key=value lines; '#' starts a comment.
void apply_config_text(RunConfig& cfg, std::istream& in);

struct RunRecord {
  std::uint64_t work = 0;
  std::uint64_t k = 0;
  double rel_err = 0.0;
  double var = 0.0;
  std::int64_t wall_ns = 0;
};

struct Trace {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<RunRecord> records;

  std::optional<std::string> find_meta(const std::string& key) const;
};

void write_trace(const Trace& trace, std::ostream& out);
Trace read_trace(std::istream& in, const std::string& source = "<stream>");
Trace load_trace(const std::string& path);

// Everything a run needs besides the seed.
struct Problem {
  std::shared_ptr<const Dataset> data;
  std::unique_ptr<Objective> objective;
  Vector x_star;
  double x_star_grad_norm = 0.0;
  double sigma_sq = 0.0;
  double sigma_star_sq = 0.0;
  std::vector<std::pair<std::string, std::string>> meta;
};

Problem prepare_problem(const RunConfig& cfg);
// For callers that already hold an objective (tests, custom problems).
Problem prepare_problem(std::unique_ptr<Objective> objective,
                        std::string description);

struct SeedResult {
  Trace trace;
  bool diverged = false;
  std::string message;
};

SeedResult run_seed(const RunConfig& cfg, const Problem& problem,
                    std::uint64_t seed);

struct RunOutcome {
  std::vector<std::string> trace_files;
  std::string mean_file;
  bool diverged = false;
  std::string message;
};

// Writes seed_<s>.csv per seed and mean.csv into cfg.out_dir.
RunOutcome run_experiment(const RunConfig& cfg);

// Log10-space average across traces on the first trace's work grid, other
// traces resampled by last value carried forward.
Trace average_traces(const std::vector<Trace>& traces);

struct TraceSummary {
  std::string name;
  std::string algorithm;
  double final_log10 = 0.0;
  double plateau_log10 = 0.0;  // mean over the last 10% of records
  double sigma_sq = 0.0;
  double sigma_star_sq = 0.0;
  double ratio = 0.0;
  double diff_vs_first = 0.0;  // mean log10 gap to the first trace
};

std::vector<TraceSummary> compare_traces(
    const std::vector<std::pair<std::string, Trace>>& traces,
    std::vector<std::string>* warnings = nullptr);
std::string format_summary(const std::vector<TraceSummary>& rows);

}  // namespace srg
