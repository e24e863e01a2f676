#pragma once

// Reference optimisers sharing the Objective interface: uniform SGD,
// SGD over a fresh permutation each epoch, and loopless SVRG.
//
// All three count work in component-gradient evaluations so curves line
// up with SRG on a common axis.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "srg/objective.hpp"
#include "srg/rng.hpp"

namespace srg {

class SgdOptimizer {
 public:
  SgdOptimizer(const Objective& f, Vector x0, std::uint64_t seed,
               std::size_t batch_size = 1);

  // One step over a with-replacement uniform batch.
  void step(const Objective& f, double alpha);

  const Vector& x() const noexcept { return x_; }
  std::uint64_t iteration() const noexcept { return k_; }
  std::uint64_t work() const noexcept { return work_; }

 private:
  Vector x_;
  CounterRng rng_;
  std::size_t batch_;
  std::uint64_t k_ = 0, work_ = 0;
  Vector grad_, direction_;
};

// Walks consecutive batches of a permutation drawn at the start of each
// epoch; a trailing partial batch is used as is.
class ShuffledSgdOptimizer {
 public:
  ShuffledSgdOptimizer(const Objective& f, Vector x0, std::uint64_t seed,
                       std::size_t batch_size = 1);

  void step(const Objective& f, double alpha);
  // Runs the remainder of the current epoch (a full one at an epoch
  // boundary), taking alphas[t] for its t-th step; missing entries reuse
  // the last one.
  void epoch(const Objective& f, const std::vector<double>& alphas);

  const Vector& x() const noexcept { return x_; }
  std::uint64_t iteration() const noexcept { return k_; }
  std::uint64_t work() const noexcept { return work_; }
  std::uint64_t epochs_started() const noexcept { return epoch_; }
  const std::vector<std::size_t>& permutation() const noexcept { return perm_; }

 private:
  void reshuffle();

  Vector x_;
  CounterRng rng_;
  std::size_t batch_;
  std::vector<std::size_t> perm_;
  std::size_t cursor_ = 0;
  std::uint64_t epoch_ = 0;
  std::uint64_t k_ = 0, work_ = 0;
  Vector grad_, direction_;
};

// Estimator grad f_i(x) - grad f_i(x_ref) + grad F(x_ref); the reference
// moves to x with probability q after each step.
class LsvrgOptimizer {
 public:
  LsvrgOptimizer(const Objective& f, Vector x0, std::uint64_t seed,
                 std::size_t batch_size, double refresh_probability);

  void step(const Objective& f, double alpha);

  // The estimator average for a given batch of indices (no state change).
  Vector estimate(const Objective& f, const std::vector<std::size_t>& batch) const;

  const Vector& x() const noexcept { return x_; }
  const Vector& reference() const noexcept { return x_ref_; }
  const Vector& reference_gradient() const noexcept { return mu_ref_; }
  double refresh_probability() const noexcept { return q_; }
  std::uint64_t iteration() const noexcept { return k_; }
  std::uint64_t work() const noexcept { return work_; }

 private:
  Vector x_, x_ref_, mu_ref_;
  CounterRng rng_;
  std::size_t batch_;
  double q_;
  std::uint64_t k_ = 0, work_ = 0;
  std::vector<std::size_t> indices_;
};

// (1/n) sum_i |grad f_i(x) - grad f_i(x_ref) + mu_ref|^2
double lsvrg_second_moment(const Objective& f, std::span<const double> x,
                           std::span<const double> x_ref,
                           std::span<const double> mu_ref);

}  // namespace srg
