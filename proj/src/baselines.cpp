#include "srg/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "srg/error.hpp"

namespace srg {

namespace {

void check_common(const Objective& f, const Vector& x0, std::size_t batch) {
  if (x0.size() != f.dim()) throw InvalidArgument("x0 has wrong dimension");
  if (batch == 0) throw InvalidArgument("batch size must be >= 1");
}

void check_alpha(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw InvalidArgument("step size must be finite and >= 0");
  }
}

}  // namespace

SgdOptimizer::SgdOptimizer(const Objective& f, Vector x0, std::uint64_t seed,
                           std::size_t batch_size)
    : x_(std::move(x0)), rng_(seed), batch_(batch_size) {
  check_common(f, x_, batch_);
  grad_.resize(f.dim());
  direction_.resize(f.dim());
}

void SgdOptimizer::step(const Objective& f, double alpha) {
  check_alpha(alpha);
  const std::size_t d = f.dim();
  std::fill(direction_.begin(), direction_.end(), 0.0);
  for (std::size_t j = 0; j < batch_; ++j) {
    const std::size_t i = rng_.below(k_, 2 * j, f.size());
    f.gradient(i, x_, grad_);
    for (std::size_t t = 0; t < d; ++t) direction_[t] += grad_[t];
  }
  const double scale = alpha / static_cast<double>(batch_);
  for (std::size_t t = 0; t < d; ++t) x_[t] -= scale * direction_[t];
  work_ += batch_;
  ++k_;
}

ShuffledSgdOptimizer::ShuffledSgdOptimizer(const Objective& f, Vector x0,
                                           std::uint64_t seed,
                                           std::size_t batch_size)
    : x_(std::move(x0)), rng_(seed), batch_(batch_size), perm_(f.size()) {
  check_common(f, x_, batch_);
  grad_.resize(f.dim());
  direction_.resize(f.dim());
  cursor_ = perm_.size();  // forces a shuffle on the first step
}

void ShuffledSgdOptimizer::reshuffle() {
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  // Fisher-Yates; lane t picks the element placed at position t.
  const std::size_t n = perm_.size();
  for (std::size_t t = 0; t + 1 < n; ++t) {
    const std::size_t pick = t + rng_.below(epoch_, t, n - t);
    std::swap(perm_[t], perm_[pick]);
  }
  cursor_ = 0;
  ++epoch_;
}

void ShuffledSgdOptimizer::step(const Objective& f, double alpha) {
  check_alpha(alpha);
  if (cursor_ >= perm_.size()) reshuffle();
  const std::size_t d = f.dim();
  const std::size_t end = std::min(perm_.size(), cursor_ + batch_);
  std::fill(direction_.begin(), direction_.end(), 0.0);
  for (std::size_t c = cursor_; c < end; ++c) {
    f.gradient(perm_[c], x_, grad_);
    for (std::size_t t = 0; t < d; ++t) direction_[t] += grad_[t];
  }
  const std::size_t used = end - cursor_;
  const double scale = alpha / static_cast<double>(used);
  for (std::size_t t = 0; t < d; ++t) x_[t] -= scale * direction_[t];
  cursor_ = end;
  work_ += used;
  ++k_;
}

void ShuffledSgdOptimizer::epoch(const Objective& f,
                                 const std::vector<double>& alphas) {
  if (alphas.empty()) throw InvalidArgument("epoch needs at least one step size");
  if (cursor_ >= perm_.size()) reshuffle();
  std::size_t t = 0;
  while (cursor_ < perm_.size()) {
    step(f, alphas[std::min(t, alphas.size() - 1)]);
    ++t;
  }
}

LsvrgOptimizer::LsvrgOptimizer(const Objective& f, Vector x0,
                               std::uint64_t seed, std::size_t batch_size,
                               double refresh_probability)
    : x_(std::move(x0)), rng_(seed), batch_(batch_size), q_(refresh_probability) {
  check_common(f, x_, batch_);
  if (!(q_ > 0.0) || q_ > 1.0) {
    throw InvalidArgument("refresh probability must lie in (0, 1]");
  }
  x_ref_ = x_;
  mu_ref_ = full_gradient(f, x_ref_);
  work_ = f.size();
  indices_.resize(batch_);
}

Vector LsvrgOptimizer::estimate(const Objective& f,
                                const std::vector<std::size_t>& batch) const {
  const std::size_t d = f.dim();
  Vector out(d, 0.0), g(d), g_ref(d);
  for (std::size_t i : batch) {
    f.gradient(i, x_, g);
    f.gradient(i, x_ref_, g_ref);
    for (std::size_t t = 0; t < d; ++t) out[t] += g[t] - g_ref[t];
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (std::size_t t = 0; t < d; ++t) out[t] = out[t] * inv + mu_ref_[t];
  return out;
}

void LsvrgOptimizer::step(const Objective& f, double alpha) {
  check_alpha(alpha);
  for (std::size_t j = 0; j < batch_; ++j) {
    indices_[j] = rng_.below(k_, 2 * j, f.size());
  }
  const Vector direction = estimate(f, indices_);
  for (std::size_t t = 0; t < x_.size(); ++t) x_[t] -= alpha * direction[t];
  work_ += 2 * batch_;
  if (rng_.uniform(k_, 2 * batch_) < q_) {
    x_ref_ = x_;
    mu_ref_ = full_gradient(f, x_ref_);
    work_ += f.size();
  }
  ++k_;
}

double lsvrg_second_moment(const Objective& f, std::span<const double> x,
                           std::span<const double> x_ref,
                           std::span<const double> mu_ref) {
  const std::size_t d = f.dim();
  Vector g(d), g_ref(d);
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.gradient(i, x, g);
    f.gradient(i, x_ref, g_ref);
    for (std::size_t t = 0; t < d; ++t) {
      const double e = g[t] - g_ref[t] + mu_ref[t];
      s += e * e;
    }
  }
  return s / static_cast<double>(f.size());
}

}  // namespace srg
