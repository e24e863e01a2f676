#include "srg/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "srg/baselines.hpp"
#include "srg/error.hpp"
#include "srg/srg.hpp"

namespace srg {

namespace fs = std::filesystem;

std::string to_string(Algorithm algo) {
  switch (algo) {
    case Algorithm::Sgd: return "sgd";
    case Algorithm::SgdShuffle: return "sgd_shuffle";
    case Algorithm::Srg: return "srg";
    case Algorithm::Lsvrg: return "lsvrg";
  }
  return "unknown";
}

Algorithm algorithm_from_string(const std::string& name) {
  for (auto a : {Algorithm::Sgd, Algorithm::SgdShuffle, Algorithm::Srg,
                 Algorithm::Lsvrg}) {
    if (to_string(a) == name) return a;
  }
  if (name == "sgd-shuffle" || name == "shuffle") return Algorithm::SgdShuffle;
  if (name == "svrg") return Algorithm::Lsvrg;
  throw InvalidArgument("unknown algorithm '" + name +
                        "' (expected sgd, sgd_shuffle, srg or lsvrg)");
}

// ---- configuration -----------------------------------------------------

namespace {

double to_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size() || !std::isfinite(v)) {
    throw InvalidArgument("setting '" + key + "': '" + value +
                          "' is not a number");
  }
  return v;
}

std::uint64_t to_count(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  if (v < 0.0 || v != std::floor(v) || v > 1.8e19) {
    throw InvalidArgument("setting '" + key + "': '" + value +
                          "' is not a non-negative integer");
  }
  return static_cast<std::uint64_t>(v);
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes" || value == "on") {
    return true;
  }
  if (value == "0" || value == "false" || value == "no" || value == "off") {
    return false;
  }
  throw InvalidArgument("setting '" + key + "': '" + value +
                        "' is not a boolean");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

SyntheticSpec& synthetic_of(RunConfig& cfg) {
  if (!cfg.synthetic) cfg.synthetic = SyntheticSpec{};
  return *cfg.synthetic;
}

}  // namespace

void RunConfig::validate() const {
  if (data_path.empty() && !synthetic) {
    throw InvalidArgument("config needs a data path or a synthetic spec");
  }
  if (seeds.empty()) throw InvalidArgument("config needs at least one seed");
  if (!(budget > 0.0)) throw InvalidArgument("budget must be positive");
  if (batch == 0) throw InvalidArgument("batch size must be >= 1");
  if (!(divergence_threshold > 1.0)) {
    throw InvalidArgument("divergence threshold must exceed 1");
  }
}

void apply_setting(RunConfig& cfg, const std::string& raw_key,
                   const std::string& raw_value) {
  std::string key = trim(raw_key);
  std::replace(key.begin(), key.end(), '-', '_');
  const std::string value = trim(raw_value);
  if (key == "algo" || key == "algorithm") {
    cfg.algorithm = algorithm_from_string(value);
  } else if (key == "objective") {
    cfg.objective = loss_kind_from_string(value);
  } else if (key == "data") {
    cfg.data_path = value;
  } else if (key == "synthetic_seed") {
    synthetic_of(cfg).seed = to_count(key, value);
  } else if (key == "synthetic_n") {
    synthetic_of(cfg).n = to_count(key, value);
  } else if (key == "synthetic_d") {
    synthetic_of(cfg).d = to_count(key, value);
  } else if (key == "normalize") {
    cfg.normalize = to_bool(key, value);
  } else if (key == "mu") {
    cfg.mu = to_double(key, value);
  } else if (key == "schedule") {
    cfg.schedule = schedule_preset_from_string(value);
  } else if (key == "alpha") {
    cfg.alpha = to_double(key, value);
  } else if (key == "epsilon") {
    cfg.epsilon = to_double(key, value);
  } else if (key == "batch") {
    cfg.batch = to_count(key, value);
  } else if (key == "seeds") {
    cfg.seeds.clear();
    if (value.find(',') != std::string::npos) {
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (!trim(item).empty()) cfg.seeds.push_back(to_count(key, trim(item)));
      }
    } else {
      const std::uint64_t count = to_count(key, value);
      for (std::uint64_t s = 1; s <= count; ++s) cfg.seeds.push_back(s);
    }
  } else if (key == "seed_base") {
    // Renumbers the current seed list to start at the given value.
    const std::uint64_t base = to_count(key, value);
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i) cfg.seeds[i] = base + i;
  } else if (key == "budget") {
    cfg.budget = to_double(key, value);
  } else if (key == "record_every") {
    cfg.record_every = to_count(key, value);
  } else if (key == "always_update") {
    cfg.always_update = to_bool(key, value);
  } else if (key == "wall_clock") {
    cfg.wall_clock = to_bool(key, value);
  } else if (key == "out") {
    cfg.out_dir = value;
  } else if (key == "cache_dir") {
    cfg.cache_dir = value;
  } else if (key == "workers") {
    cfg.workers = static_cast<unsigned>(to_count(key, value));
  } else if (key == "divergence_threshold") {
    cfg.divergence_threshold = to_double(key, value);
  } else {
    throw InvalidArgument("unknown setting '" + key + "'");
  }
}

void apply_config_text(RunConfig& cfg, std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.resize(hash);
    }
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(line_no, "expected key=value, got '" + trim(line) + "'");
    }
    try {
      apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
    } catch (const InvalidArgument& e) {
      throw ParseError(line_no, e.what());
    }
  }
}

// ---- traces ------------------------------------------------------------

std::optional<std::string> Trace::find_meta(const std::string& key) const {
  for (const auto& [k, v] : meta) {
    if (k == key) return v;
  }
  return std::nullopt;
}

void write_trace(const Trace& trace, std::ostream& out) {
  for (const auto& [k, v] : trace.meta) out << "# meta: " << k << '=' << v << '\n';
  out << "work,k,rel_err,var,wall_ns\n";
  for (const RunRecord& r : trace.records) {
    out << r.work << ',' << r.k << ',' << format_double(r.rel_err) << ','
        << format_double(r.var) << ',' << r.wall_ns << '\n';
  }
}

Trace read_trace(std::istream& in, const std::string& source) {
  Trace trace;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("# meta: ", 0) == 0) {
      const std::string body = line.substr(8);
      const auto eq = body.find('=');
      if (eq == std::string::npos) {
        throw ParseError(line_no, source + ": meta line without '='");
      }
      trace.meta.emplace_back(body.substr(0, eq), body.substr(eq + 1));
      continue;
    }
    if (line[0] == '#') continue;
    if (!header) {
      if (line != "work,k,rel_err,var,wall_ns") {
        throw ParseError(line_no, source + ": unexpected header '" + line + "'");
      }
      header = true;
      continue;
    }
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 5) {
      throw ParseError(line_no, source + ": expected 5 fields");
    }
    RunRecord r;
    try {
      r.work = std::stoull(fields[0]);
      r.k = std::stoull(fields[1]);
      r.rel_err = std::stod(fields[2]);
      r.var = std::stod(fields[3]);
      r.wall_ns = std::stoll(fields[4]);
    } catch (const std::exception&) {
      throw ParseError(line_no, source + ": malformed record '" + line + "'");
    }
    trace.records.push_back(r);
  }
  if (!header) throw ParseError(line_no, source + ": missing CSV header");
  return trace;
}

Trace load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_trace(in, path);
}

// ---- problems ----------------------------------------------------------

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string solver_settings(const Objective& f, double tol) {
  return "solver=gd step=" + format_double(1.0 / f.smoothness()) +
         " tol=" + format_double(tol) + " objective=" + f.describe();
}

std::optional<ReferenceSolution> read_cache(const fs::path& path,
                                            const std::string& settings,
                                            std::size_t d) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string line;
  if (!std::getline(in, line) || line != settings) return std::nullopt;
  ReferenceSolution sol;
  if (!std::getline(in, line)) return std::nullopt;
  try {
    sol.gradient_norm = std::stod(line);
    sol.x.reserve(d);
    while (std::getline(in, line)) {
      if (!line.empty()) sol.x.push_back(std::stod(line));
    }
  } catch (const std::exception&) {
    return std::nullopt;
  }
  if (sol.x.size() != d) return std::nullopt;
  return sol;
}

void write_cache(const fs::path& path, const std::string& settings,
                 const ReferenceSolution& sol) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "warning: cannot write x* cache " << path << '\n';
    return;
  }
  out << settings << '\n' << format_double(sol.gradient_norm) << '\n';
  for (double v : sol.x) out << format_double(v) << '\n';
}

void fill_statistics(Problem& p) {
  const Objective& f = *p.objective;
  p.sigma_sq = sigma_sq(f, p.x_star);
  p.sigma_star_sq = sigma_star_sq(f, p.x_star);
  p.meta.emplace_back("L", format_double(f.smoothness()));
  p.meta.emplace_back("L_max", format_double(f.max_smoothness()));
  p.meta.emplace_back("strong_convexity", format_double(f.strong_convexity()));
  p.meta.emplace_back("x_star_grad_norm", format_double(p.x_star_grad_norm));
  p.meta.emplace_back("sigma_sq", format_double(p.sigma_sq));
  p.meta.emplace_back("sigma_star_sq", format_double(p.sigma_star_sq));
  p.meta.emplace_back("ratio", format_double(p.sigma_sq / p.sigma_star_sq));
}

}  // namespace

Problem prepare_problem(const RunConfig& cfg) {
  cfg.validate();
  auto data = std::make_shared<Dataset>();
  if (!cfg.data_path.empty()) {
    *data = load_libsvm(cfg.data_path);
  } else {
    *data = synthetic_cauchy(*cfg.synthetic).data;
  }
  const bool normalize = cfg.normalize.value_or(cfg.objective == LossKind::Logistic);
  if (normalize) {
    const std::size_t zero_rows = normalize_rows(*data);
    if (zero_rows > 0) {
      std::cerr << "warning: " << zero_rows
                << " all-zero rows left unnormalised\n";
    }
  }
  const double mu = cfg.mu.value_or(
      cfg.objective == LossKind::Logistic ? 1.0 / static_cast<double>(data->n)
                                          : 0.0);

  Problem p;
  p.data = data;
  p.objective = std::make_unique<DatasetObjective>(data, cfg.objective, mu);
  const Objective& f = *p.objective;

  const double tol = 1e-12;
  const std::string settings = solver_settings(f, tol);
  std::uint64_t key = dataset_hash(*data);
  key ^= mix64(std::hash<std::string>{}(settings));
  fs::path dir = cfg.cache_dir;
  if (dir.empty()) {
    dir = cfg.data_path.empty() ? fs::path(cfg.out_dir)
                                : fs::path(cfg.data_path).parent_path();
  }
  if (dir.empty()) dir = ".";
  const fs::path cache = dir / (hex64(key) + ".xstar");
  if (auto cached = read_cache(cache, settings, f.dim())) {
    p.x_star = std::move(cached->x);
    p.x_star_grad_norm = cached->gradient_norm;
  } else {
    ReferenceSolution sol = reference_solution(f, tol);
    std::error_code ec;
    fs::create_directories(dir, ec);
    write_cache(cache, settings, sol);
    p.x_star = std::move(sol.x);
    p.x_star_grad_norm = sol.gradient_norm;
  }

  p.meta.emplace_back("objective", to_string(cfg.objective));
  p.meta.emplace_back("dataset", data->source);
  p.meta.emplace_back("dataset_hash", hex64(dataset_hash(*data)));
  p.meta.emplace_back("n", std::to_string(data->n));
  p.meta.emplace_back("d", std::to_string(data->d));
  p.meta.emplace_back("label_mapping", data->label_mapping);
  p.meta.emplace_back("normalized", normalize ? "1" : "0");
  p.meta.emplace_back("mu", format_double(mu));
  fill_statistics(p);
  return p;
}

Problem prepare_problem(std::unique_ptr<Objective> objective,
                        std::string description) {
  Problem p;
  p.objective = std::move(objective);
  const ReferenceSolution sol = reference_solution(*p.objective);
  p.x_star = sol.x;
  p.x_star_grad_norm = sol.gradient_norm;
  p.meta.emplace_back("objective", std::move(description));
  p.meta.emplace_back("n", std::to_string(p.objective->size()));
  p.meta.emplace_back("d", std::to_string(p.objective->dim()));
  fill_statistics(p);
  return p;
}

// ---- runs --------------------------------------------------------------

namespace {

// Uniform interface over the four optimisers for the run loop.
class Driver {
 public:
  virtual ~Driver() = default;
  virtual void step(const Objective& f, double alpha, double epsilon) = 0;
  virtual const Vector& x() const = 0;
  virtual std::uint64_t work() const = 0;
  // Second moment of the single-sample estimator at the current state.
  virtual double variance(const Objective& f, double epsilon) const = 0;
};

double uniform_variance(const Objective& f, const Vector& x) {
  const std::vector<double> p(f.size(), 1.0 / static_cast<double>(f.size()));
  return variance_true(f, x, p);
}

class SgdDriver final : public Driver {
 public:
  SgdDriver(const Objective& f, Vector x0, std::uint64_t seed, std::size_t m)
      : opt_(f, std::move(x0), seed, m) {}
  void step(const Objective& f, double alpha, double) override { opt_.step(f, alpha); }
  const Vector& x() const override { return opt_.x(); }
  std::uint64_t work() const override { return opt_.work(); }
  double variance(const Objective& f, double) const override {
    return uniform_variance(f, opt_.x());
  }

 private:
  SgdOptimizer opt_;
};

class ShuffleDriver final : public Driver {
 public:
  ShuffleDriver(const Objective& f, Vector x0, std::uint64_t seed, std::size_t m)
      : opt_(f, std::move(x0), seed, m) {}
  void step(const Objective& f, double alpha, double) override { opt_.step(f, alpha); }
  const Vector& x() const override { return opt_.x(); }
  std::uint64_t work() const override { return opt_.work(); }
  double variance(const Objective& f, double) const override {
    return uniform_variance(f, opt_.x());
  }

 private:
  ShuffledSgdOptimizer opt_;
};

class SrgDriver final : public Driver {
 public:
  SrgDriver(const Objective& f, Vector x0, std::uint64_t seed,
            SrgOptions options)
      : opt_(f, std::move(x0), seed, options) {}
  void step(const Objective& f, double alpha, double epsilon) override {
    opt_.step(f, alpha, epsilon);
    work_ += opt_.options().batch_size;
  }
  const Vector& x() const override { return opt_.x(); }
  std::uint64_t work() const override { return work_; }
  double variance(const Objective& f, double epsilon) const override {
    return variance_true(f, opt_.x(), opt_.distribution(epsilon));
  }

 private:
  SrgOptimizer opt_;
  std::uint64_t work_ = 0;
};

class LsvrgDriver final : public Driver {
 public:
  LsvrgDriver(const Objective& f, Vector x0, std::uint64_t seed, std::size_t m)
      : opt_(f, std::move(x0), seed, m,
             std::min(1.0, static_cast<double>(m) / static_cast<double>(f.size()))) {}
  void step(const Objective& f, double alpha, double) override { opt_.step(f, alpha); }
  const Vector& x() const override { return opt_.x(); }
  std::uint64_t work() const override { return opt_.work(); }
  double variance(const Objective& f, double) const override {
    return lsvrg_second_moment(f, opt_.x(), opt_.reference(),
                               opt_.reference_gradient());
  }

 private:
  LsvrgOptimizer opt_;
};

std::unique_ptr<Driver> make_driver(const RunConfig& cfg, const Objective& f,
                                    std::uint64_t seed) {
  Vector x0(f.dim(), 0.0);
  switch (cfg.algorithm) {
    case Algorithm::Sgd:
      return std::make_unique<SgdDriver>(f, std::move(x0), seed, cfg.batch);
    case Algorithm::SgdShuffle:
      return std::make_unique<ShuffleDriver>(f, std::move(x0), seed, cfg.batch);
    case Algorithm::Srg: {
      SrgOptions opts;
      opts.always_update = cfg.always_update;
      opts.batch_size = cfg.batch;
      return std::make_unique<SrgDriver>(f, std::move(x0), seed, opts);
    }
    case Algorithm::Lsvrg:
      return std::make_unique<LsvrgDriver>(f, std::move(x0), seed, cfg.batch);
  }
  throw InvalidArgument("unknown algorithm");
}

}  // namespace

SeedResult run_seed(const RunConfig& cfg, const Problem& problem,
                    std::uint64_t seed) {
  const Objective& f = *problem.objective;
  if (cfg.batch > f.size()) {
    throw InvalidArgument("batch size " + std::to_string(cfg.batch) +
                          " exceeds n = " + std::to_string(f.size()));
  }
  const Schedule schedule(cfg.schedule,
                          ScheduleConstants::from(f, cfg.batch), cfg.alpha,
                          cfg.epsilon);
  const Vector x0(f.dim(), 0.0);
  const double denom = squared_distance(x0, problem.x_star);
  if (!(denom > 0.0)) {
    throw InvalidArgument("x0 coincides with x*; relative error undefined");
  }

  SeedResult result;
  Trace& trace = result.trace;
  trace.meta = problem.meta;
  trace.meta.emplace_back("algo", to_string(cfg.algorithm));
  trace.meta.emplace_back("seed", std::to_string(seed));
  trace.meta.emplace_back("schedule", to_string(cfg.schedule));
  trace.meta.emplace_back("schedule_label", schedule.label());
  trace.meta.emplace_back("batch", std::to_string(cfg.batch));
  trace.meta.emplace_back("budget", format_double(cfg.budget));
  trace.meta.emplace_back("alpha0", format_double(schedule.alpha(0)));
  trace.meta.emplace_back("epsilon0", format_double(schedule.epsilon(0)));
  trace.meta.emplace_back("script_L",
                          format_double(schedule.constants().script_l()));
  if (cfg.algorithm == Algorithm::Srg) {
    trace.meta.emplace_back("always_update", cfg.always_update ? "1" : "0");
  }
  trace.meta.emplace_back("work_unit", "component_gradient_evaluations");

  auto driver = make_driver(cfg, f, seed);
  const double per_step = static_cast<double>(cfg.batch);
  const auto steps_total =
      static_cast<std::uint64_t>(std::ceil(cfg.budget / per_step));
  const std::uint64_t every =
      cfg.record_every > 0 ? cfg.record_every
                           : std::max<std::uint64_t>(1, steps_total / 200);

  const auto start = std::chrono::steady_clock::now();
  const auto record = [&](std::uint64_t k, double rel, double eps) {
    RunRecord r;
    r.work = driver->work();
    r.k = k;
    r.rel_err = rel;
    r.var = std::isfinite(rel) ? driver->variance(f, eps) : std::nan("");
    if (cfg.wall_clock) {
      r.wall_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    }
    trace.records.push_back(r);
  };

  record(0, 1.0, schedule.epsilon(0));
  std::uint64_t k = 0;
  try {
    while (static_cast<double>(driver->work()) < cfg.budget ||
           (cfg.algorithm == Algorithm::Lsvrg && k == 0)) {
      const double alpha = schedule.alpha(k);
      const double eps = schedule.epsilon(k);
      driver->step(f, alpha, eps);
      ++k;
      const double rel = squared_distance(driver->x(), problem.x_star) / denom;
      if (!std::isfinite(rel) || rel > cfg.divergence_threshold) {
        record(k, rel, schedule.epsilon(k));
        result.diverged = true;
        result.message = "diverged at iteration " + std::to_string(k) +
                         " (relative error " + format_double(rel) + ")";
        break;
      }
      if (k % every == 0 || static_cast<double>(driver->work()) >= cfg.budget) {
        record(k, rel, schedule.epsilon(k));
      }
    }
  } catch (const NumericError& e) {
    result.diverged = true;
    result.message = e.what();
  }
  if (schedule.clamped()) {
    std::cerr << "warning: lower bound clamped to 1/n for seed " << seed << '\n';
  }
  return result;
}

namespace {

unsigned worker_count(const RunConfig& cfg) {
  if (cfg.workers > 0) return cfg.workers;
  if (const char* env = std::getenv("SRG_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void write_file(const fs::path& path, const Trace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_trace(trace, out);
  out.flush();
  if (!out) throw IoError("write failure on " + path.string());
}

}  // namespace

RunOutcome run_experiment(const RunConfig& cfg) {
  cfg.validate();
  const Problem problem = prepare_problem(cfg);
  const fs::path dir = cfg.out_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  const std::size_t jobs = cfg.seeds.size();
  std::vector<SeedResult> results(jobs);
  std::vector<std::string> errors(jobs);
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t j = next++; j < jobs; j = next++) {
      try {
        results[j] = run_seed(cfg, problem, cfg.seeds[j]);
        write_file(dir / ("seed_" + std::to_string(cfg.seeds[j]) + ".csv"),
                   results[j].trace);
      } catch (const std::exception& e) {
        errors[j] = e.what();
      }
    }
  };
  const unsigned threads =
      std::min<unsigned>(worker_count(cfg), static_cast<unsigned>(jobs));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();

  for (const auto& e : errors) {
    if (!e.empty()) throw Error(ErrorCode::Internal, e);
  }

  RunOutcome outcome;
  std::vector<Trace> traces;
  for (std::size_t j = 0; j < jobs; ++j) {
    outcome.trace_files.push_back(
        (dir / ("seed_" + std::to_string(cfg.seeds[j]) + ".csv")).string());
    if (results[j].diverged) {
      outcome.diverged = true;
      if (outcome.message.empty()) {
        outcome.message = "seed " + std::to_string(cfg.seeds[j]) + ": " +
                          results[j].message;
      }
    }
    traces.push_back(results[j].trace);
  }
  if (!outcome.diverged) {
    Trace mean = average_traces(traces);
    std::string seeds;
    for (auto s : cfg.seeds) seeds += (seeds.empty() ? "" : ",") + std::to_string(s);
    mean.meta.emplace_back("seeds", seeds);
    const fs::path mean_path = dir / "mean.csv";
    write_file(mean_path, mean);
    outcome.mean_file = mean_path.string();
  }
  return outcome;
}

namespace {

double safe_log10(double v) { return std::log10(std::max(v, 1e-300)); }

// Index of the last record with work <= w, or 0.
std::size_t carried_index(const std::vector<RunRecord>& recs, std::uint64_t w) {
  const auto it = std::upper_bound(
      recs.begin(), recs.end(), w,
      [](std::uint64_t value, const RunRecord& r) { return value < r.work; });
  return it == recs.begin() ? 0 : static_cast<std::size_t>(it - recs.begin()) - 1;
}

bool same_grid(const Trace& a, const Trace& b) {
  if (a.records.size() != b.records.size()) return false;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    if (a.records[i].work != b.records[i].work) return false;
  }
  return true;
}

}  // namespace

Trace average_traces(const std::vector<Trace>& traces) {
  if (traces.empty()) throw InvalidArgument("nothing to average");
  for (const Trace& t : traces) {
    if (t.records.empty()) throw InvalidArgument("cannot average an empty trace");
  }
  Trace out;
  for (const auto& [k, v] : traces.front().meta) {
    if (k != "seed") out.meta.emplace_back(k, v);
  }
  out.meta.emplace_back("aggregate", "mean_log10");
  out.meta.emplace_back("traces", std::to_string(traces.size()));
  const double count = static_cast<double>(traces.size());
  for (const RunRecord& g : traces.front().records) {
    double log_rel = 0.0, log_var = 0.0;
    long double wall = 0.0L;
    for (const Trace& t : traces) {
      const RunRecord& r = t.records[carried_index(t.records, g.work)];
      log_rel += safe_log10(r.rel_err);
      log_var += safe_log10(r.var);
      wall += static_cast<long double>(r.wall_ns);
    }
    RunRecord m;
    m.work = g.work;
    m.k = g.k;
    m.rel_err = std::pow(10.0, log_rel / count);
    m.var = std::pow(10.0, log_var / count);
    m.wall_ns = static_cast<std::int64_t>(wall / traces.size());
    out.records.push_back(m);
  }
  return out;
}

std::vector<TraceSummary> compare_traces(
    const std::vector<std::pair<std::string, Trace>>& traces,
    std::vector<std::string>* warnings) {
  std::vector<TraceSummary> rows;
  if (traces.empty()) return rows;
  const Trace& first = traces.front().second;
  const auto meta_number = [](const Trace& t, const std::string& key) {
    const auto v = t.find_meta(key);
    if (!v) return std::nan("");
    try {
      return std::stod(*v);
    } catch (const std::exception&) {
      return std::nan("");
    }
  };
  for (const auto& [name, trace] : traces) {
    if (trace.records.empty()) throw InvalidArgument(name + ": empty trace");
    TraceSummary row;
    row.name = name;
    row.algorithm = trace.find_meta("algo").value_or("?");
    row.final_log10 = safe_log10(trace.records.back().rel_err);
    const std::size_t total = trace.records.size();
    const std::size_t tail = std::max<std::size_t>(1, total / 10);
    double acc = 0.0;
    for (std::size_t i = total - tail; i < total; ++i) {
      acc += safe_log10(trace.records[i].rel_err);
    }
    row.plateau_log10 = acc / static_cast<double>(tail);
    row.sigma_sq = meta_number(trace, "sigma_sq");
    row.sigma_star_sq = meta_number(trace, "sigma_star_sq");
    row.ratio = row.sigma_sq / row.sigma_star_sq;

    if (&trace != &first && !same_grid(first, trace) && warnings) {
      warnings->push_back(name +
                          ": work grid differs from the first trace; "
                          "resampled by last value carried forward");
    }
    double gap = 0.0;
    for (const RunRecord& g : first.records) {
      const RunRecord& r = trace.records[carried_index(trace.records, g.work)];
      gap += safe_log10(r.rel_err) - safe_log10(g.rel_err);
    }
    row.diff_vs_first = gap / static_cast<double>(first.records.size());
    rows.push_back(row);
  }
  return rows;
}

std::string format_summary(const std::vector<TraceSummary>& rows) {
  std::ostringstream os;
  char buf[512];
  std::snprintf(buf, sizeof buf, "%-32s %-12s %12s %12s %12s %12s %10s %12s\n",
                "trace", "algo", "final_log10", "plateau", "sigma_sq",
                "sigma*_sq", "r", "diff_first");
  os << buf;
  for (const TraceSummary& r : rows) {
    std::snprintf(buf, sizeof buf,
                  "%-32s %-12s %12.4f %12.4f %12.5g %12.5g %10.4g %12.4f\n",
                  r.name.c_str(), r.algorithm.c_str(), r.final_log10,
                  r.plateau_log10, r.sigma_sq, r.sigma_star_sq, r.ratio,
                  r.diff_vs_first);
    os << buf;
  }
  return os.str();
}

}  // namespace srg
