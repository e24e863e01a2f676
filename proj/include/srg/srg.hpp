#pragma once

// SRG: SGD whose sampling distribution is the
// variance-minimising distribution, over the restricted simplex, of a
// table of stored per-component gradient norms.
//
// Each step solves for p_k on the norm tree, draws i ~ p_k, moves along
// grad f_i(x_k) / (n p_k^i), and refreshes the stored norm for i with
// probability eps_k / p_k^i (or always, when the gate is disabled).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "srg/objective.hpp"
#include "srg/rng.hpp"
#include "srg/sampler_tree.hpp"
#include "srg/simplex.hpp"

namespace srg {

// Full stored gradients g^i, kept only in debug mode (O(n d) memory).
class GradientTable {
 public:
  GradientTable() = default;
  GradientTable(std::size_t n, std::size_t d) : n_(n), d_(d), g_(n * d, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  std::size_t dim() const noexcept { return d_; }
  std::span<const double> row(std::size_t i) const {
    return {g_.data() + i * d_, d_};
  }
  std::span<double> row(std::size_t i) { return {g_.data() + i * d_, d_}; }
  std::vector<double> norms() const;

 private:
  std::size_t n_ = 0, d_ = 0;
  std::vector<double> g_;
};

struct SrgOptions {
  bool always_update = false;
  std::size_t batch_size = 1;
  bool track_vectors = false;
  std::uint64_t rebuild_every = 1'000'000;
};

struct SrgDraw {
  std::size_t index = 0;
  double probability = 0.0;
  double weight = 0.0;  // 1 / (n p)
  bool refreshed = false;
};

struct StepDiagnostics {
  std::uint64_t k = 0;
  std::vector<SrgDraw> draws;
};

class SrgOptimizer {
 public:
  // Stored norms start at zero, so the first step is a uniform SGD step.
  SrgOptimizer(const Objective& f, Vector x0, std::uint64_t seed,
               SrgOptions options = {});
  // Debug mode with an explicit starting table (implies track_vectors).
  SrgOptimizer(const Objective& f, Vector x0, GradientTable table,
               std::uint64_t seed, SrgOptions options = {});

  const StepDiagnostics& step(const Objective& f, double alpha, double epsilon);

  const Vector& x() const noexcept { return x_; }
  std::uint64_t iteration() const noexcept { return k_; }
  const SamplerTree& tree() const noexcept { return tree_; }
  const GradientTable& table() const;
  const SrgOptions& options() const noexcept { return options_; }
  const StepDiagnostics& last_step() const noexcept { return diag_; }

  // Dense p_k for the current table (O(n log n)); for diagnostics.
  std::vector<double> distribution(double epsilon) const;

 private:
  SrgOptions options_;
  Vector x_;
  SamplerTree tree_;
  std::optional<GradientTable> table_;
  CounterRng rng_;
  std::uint64_t k_ = 0;
  std::uint64_t updates_since_rebuild_ = 0;
  StepDiagnostics diag_;
  Vector grad_, direction_;
  std::vector<double> pending_norms_;
  std::vector<double> pending_grads_;
};

// ---- Diagnostics -------------------------------------------------------

// sum_i p_i (1/(n p_i)) grad f_i(x), by enumeration.
Vector estimator_mean(const Objective& f, std::span<const double> x,
                      std::span<const double> p);
// (1/n^2) sum_i |grad f_i(x)|^2 / p_i
double variance_true(const Objective& f, std::span<const double> x,
                     std::span<const double> p);
// Same formula with stored norms in place of the true ones.
double variance_approx(std::span<const double> norms,
                       std::span<const double> p);
// (1/n) sum_i |grad f_i(x*)|^2
double sigma_sq(const Objective& f, std::span<const double> x_star);
// (1/n^2) (sum_i |grad f_i(x*)|)^2
double sigma_star_sq(const Objective& f, std::span<const double> x_star);

inline constexpr double kLyapunovWeight = 0.673;

// sum_i |g^i - grad f_i(x*)|^2
double table_error(const Objective& f, const GradientTable& table,
                   std::span<const double> x_star);

// T = (alpha / (n eps)) (a / L) table_error + |x - x*|^2, L = max_i L_i.
double lyapunov_value(const Objective& f, std::span<const double> x,
                      const GradientTable& table,
                      std::span<const double> x_star, double alpha,
                      double epsilon);

// Exact E over (i_k, b_k) of the table error after one step.
double expected_table_error_one_step(const Objective& f,
                                     std::span<const double> x,
                                     const GradientTable& table,
                                     std::span<const double> x_star,
                                     double epsilon);

// Exact E over (i_k, b_k) of T after one batch-1 step with the gate on,
// keeping alpha/eps fixed.
double expected_lyapunov_one_step(const Objective& f,
                                  std::span<const double> x,
                                  const GradientTable& table,
                                  std::span<const double> x_star,
                                  double alpha, double epsilon);

// min{L/n, mu} with L = max_i L_i.
double contraction_rate(const Objective& f);

}  // namespace srg
