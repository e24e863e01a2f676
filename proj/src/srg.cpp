#include "srg/srg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "srg/error.hpp"

namespace srg {

namespace {

void check_distribution(std::span<const double> p, std::size_t n) {
  if (p.size() != n) throw InvalidArgument("distribution has wrong length");
  for (double v : p) {
    if (!(v > 0.0)) {
      throw InvalidArgument("distribution must be strictly positive");
    }
  }
}

void check_step_parameters(double alpha, double epsilon, std::size_t n) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw InvalidArgument("step size must be finite and >= 0");
  }
  if (!(epsilon > 0.0)) {
    throw InvalidArgument("lower bound must be positive");
  }
  epsilon_saturates(epsilon, n);
}

}  // namespace

std::vector<double> GradientTable::norms() const {
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = std::sqrt(squared_norm(row(i)));
  return out;
}

SrgOptimizer::SrgOptimizer(const Objective& f, Vector x0, std::uint64_t seed,
                           SrgOptions options)
    : options_(options),
      x_(std::move(x0)),
      tree_(std::vector<double>(f.size(), 0.0)),
      rng_(seed) {
  if (x_.size() != f.dim()) throw InvalidArgument("x0 has wrong dimension");
  if (options_.batch_size == 0) throw InvalidArgument("batch size must be >= 1");
  if (options_.track_vectors) table_.emplace(f.size(), f.dim());
  grad_.resize(f.dim());
  direction_.resize(f.dim());
}

SrgOptimizer::SrgOptimizer(const Objective& f, Vector x0, GradientTable table,
                           std::uint64_t seed, SrgOptions options)
    : options_(options),
      x_(std::move(x0)),
      tree_(table.norms()),
      table_(std::move(table)),
      rng_(seed) {
  if (x_.size() != f.dim()) throw InvalidArgument("x0 has wrong dimension");
  if (table_->size() != f.size() || table_->dim() != f.dim()) {
    throw InvalidArgument("gradient table does not match the objective");
  }
  if (options_.batch_size == 0) throw InvalidArgument("batch size must be >= 1");
  options_.track_vectors = true;
  grad_.resize(f.dim());
  direction_.resize(f.dim());
}

const GradientTable& SrgOptimizer::table() const {
  if (!table_) throw InvalidArgument("optimizer is not tracking gradient vectors");
  return *table_;
}

const StepDiagnostics& SrgOptimizer::step(const Objective& f, double alpha,
                                          double epsilon) {
  const std::size_t n = f.size(), d = f.dim(), m = options_.batch_size;
  check_step_parameters(alpha, epsilon, n);

  const TreeSolution solved = tree_solve(tree_, epsilon);
  diag_.k = k_;
  diag_.draws.resize(m);
  pending_norms_.assign(m, -1.0);
  if (table_) pending_grads_.resize(m * d);
  std::fill(direction_.begin(), direction_.end(), 0.0);

  for (std::size_t j = 0; j < m; ++j) {
    const SampleDraw draw = tree_sample(tree_, solved, rng_.uniform(k_, 2 * j));
    f.gradient(draw.index, x_, grad_);
    double sq = 0.0;
    for (double g : grad_) sq += g * g;
    if (!std::isfinite(sq)) {
      std::ostringstream os;
      os << "non-finite gradient for component " << draw.index << " at step "
         << k_;
      throw NumericError(draw.index, os.str());
    }
    SrgDraw& out = diag_.draws[j];
    out.index = draw.index;
    out.probability = draw.probability;
    out.weight = 1.0 / (static_cast<double>(n) * draw.probability);
    for (std::size_t t = 0; t < d; ++t) direction_[t] += out.weight * grad_[t];

    out.refreshed = options_.always_update ||
                    rng_.uniform(k_, 2 * j + 1) < epsilon / draw.probability;
    if (out.refreshed) {
      pending_norms_[j] = std::sqrt(sq);
      if (table_) {
        std::copy(grad_.begin(), grad_.end(), pending_grads_.begin() + j * d);
      }
    }
  }

  const double scale = alpha / static_cast<double>(m);
  for (std::size_t t = 0; t < d; ++t) x_[t] -= scale * direction_[t];

  // p_k stays fixed for the whole batch; the table moves afterwards.
  for (std::size_t j = 0; j < m; ++j) {
    if (pending_norms_[j] < 0.0) continue;
    const std::size_t i = diag_.draws[j].index;
    tree_.update_key(i, pending_norms_[j]);
    if (table_) {
      auto dst = table_->row(i);
      std::copy_n(pending_grads_.begin() + j * d, d, dst.begin());
    }
    if (++updates_since_rebuild_ >= options_.rebuild_every) {
      tree_.rebuild();
      updates_since_rebuild_ = 0;
    }
  }
  ++k_;
  return diag_;
}

std::vector<double> SrgOptimizer::distribution(double epsilon) const {
  const TreeSolution solved = tree_solve(tree_, epsilon);
  std::vector<double> p(tree_.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = tree_probability(tree_, solved, i);
  }
  return p;
}

Vector estimator_mean(const Objective& f, std::span<const double> x,
                      std::span<const double> p) {
  const std::size_t n = f.size(), d = f.dim();
  check_distribution(p, n);
  Vector mean(d, 0.0), g(d);
  for (std::size_t i = 0; i < n; ++i) {
    f.gradient(i, x, g);
    const double w = p[i] / (static_cast<double>(n) * p[i]);
    for (std::size_t t = 0; t < d; ++t) mean[t] += w * g[t];
  }
  return mean;
}

double variance_true(const Objective& f, std::span<const double> x,
                     std::span<const double> p) {
  const std::size_t n = f.size();
  check_distribution(p, n);
  Vector g(f.dim());
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    f.gradient(i, x, g);
    s += squared_norm(g) / p[i];
  }
  const double nn = static_cast<double>(n);
  return s / (nn * nn);
}

double variance_approx(std::span<const double> norms,
                       std::span<const double> p) {
  check_distribution(p, norms.size());
  double s = 0.0;
  for (std::size_t i = 0; i < norms.size(); ++i) s += norms[i] * norms[i] / p[i];
  const double nn = static_cast<double>(norms.size());
  return s / (nn * nn);
}

double sigma_sq(const Objective& f, std::span<const double> x_star) {
  Vector g(f.dim());
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.gradient(i, x_star, g);
    s += squared_norm(g);
  }
  return s / static_cast<double>(f.size());
}

double sigma_star_sq(const Objective& f, std::span<const double> x_star) {
  Vector g(f.dim());
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.gradient(i, x_star, g);
    s += std::sqrt(squared_norm(g));
  }
  const double nn = static_cast<double>(f.size());
  return s * s / (nn * nn);
}

double table_error(const Objective& f, const GradientTable& table,
                   std::span<const double> x_star) {
  Vector g(f.dim());
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.gradient(i, x_star, g);
    s += squared_distance(table.row(i), g);
  }
  return s;
}

double lyapunov_value(const Objective& f, std::span<const double> x,
                      const GradientTable& table,
                      std::span<const double> x_star, double alpha,
                      double epsilon) {
  const double n = static_cast<double>(f.size());
  const double weight =
      alpha / (n * epsilon) * kLyapunovWeight / f.max_smoothness();
  return weight * table_error(f, table, x_star) + squared_distance(x, x_star);
}

namespace {

// Per-component quantities shared by the one-step enumerations.
struct Enumeration {
  std::vector<double> p;
  std::vector<Vector> grad_x;  // grad f_i(x)
  std::vector<double> stale;   // |g^i - grad f_i(x*)|^2
  std::vector<double> fresh;   // |grad f_i(x) - grad f_i(x*)|^2
  double stale_total = 0.0;
};

Enumeration enumerate(const Objective& f, std::span<const double> x,
                      const GradientTable& table,
                      std::span<const double> x_star, double epsilon) {
  const std::size_t n = f.size(), d = f.dim();
  Enumeration e;
  e.p = restricted_probabilities(table.norms(), epsilon);
  e.grad_x.assign(n, Vector(d));
  e.stale.resize(n);
  e.fresh.resize(n);
  Vector g_star(d);
  for (std::size_t i = 0; i < n; ++i) {
    f.gradient(i, x, e.grad_x[i]);
    f.gradient(i, x_star, g_star);
    e.stale[i] = squared_distance(table.row(i), g_star);
    e.fresh[i] = squared_distance(e.grad_x[i], g_star);
    e.stale_total += e.stale[i];
  }
  return e;
}

}  // namespace

double expected_table_error_one_step(const Objective& f,
                                     std::span<const double> x,
                                     const GradientTable& table,
                                     std::span<const double> x_star,
                                     double epsilon) {
  const Enumeration e = enumerate(f, x, table, x_star, epsilon);
  double expect = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double gate = std::min(1.0, epsilon / e.p[j]);
    const double refreshed = e.stale_total - e.stale[j] + e.fresh[j];
    expect += e.p[j] * ((1.0 - gate) * e.stale_total + gate * refreshed);
  }
  return expect;
}

double expected_lyapunov_one_step(const Objective& f,
                                  std::span<const double> x,
                                  const GradientTable& table,
                                  std::span<const double> x_star,
                                  double alpha, double epsilon) {
  const std::size_t n = f.size(), d = f.dim();
  const Enumeration e = enumerate(f, x, table, x_star, epsilon);
  const double nn = static_cast<double>(n);
  const double weight =
      alpha / (nn * epsilon) * kLyapunovWeight / f.max_smoothness();
  Vector x_next(d);
  double expect = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double step = alpha / (nn * e.p[j]);
    for (std::size_t t = 0; t < d; ++t) x_next[t] = x[t] - step * e.grad_x[j][t];
    const double iterate = squared_distance(x_next, x_star);
    const double gate = std::min(1.0, epsilon / e.p[j]);
    const double refreshed = e.stale_total - e.stale[j] + e.fresh[j];
    const double table_term = (1.0 - gate) * e.stale_total + gate * refreshed;
    expect += e.p[j] * (weight * table_term + iterate);
  }
  return expect;
}

double contraction_rate(const Objective& f) {
  return std::min(f.max_smoothness() / static_cast<double>(f.size()),
                  f.strong_convexity());
}

}  // namespace srg
