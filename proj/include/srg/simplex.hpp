#pragma once

// Minimisation of sum_i a_i^2 / p_i over the restricted simplex
// {p : sum p = 1, p_i >= eps}, eps in [0, 1/n].
//
// The minimiser sorts a in decreasing order and keeps the top rho entries
// proportional to a (p_i = a_i / lambda) while the rest sit at the floor
// eps. rho is the largest position i whose weight clears eps * lambda(i),
// where lambda(i) = (a_1 + ... + a_i) / (1 - (n - i) eps); the predicate is
// monotone in i, so rho can be found by bisection.
//
// Two routes are provided: an O(n log n) one over a sorted copy, and an
// O(log n) one that descends a SamplerTree.

#include <cstddef>
#include <span>
#include <vector>

#include "srg/sampler_tree.hpp"

namespace srg {

struct RestrictedSolution {
  std::size_t n = 0;
  std::size_t rho = 0;  // 1-based; 0 when uniform
  double lambda = 0.0;
  double epsilon = 0.0;
  // All weights zero, or eps == 1/n: every component gets 1/n.
  bool uniform = false;

  // Mass reserved for the top rho entries: 1 - (n - rho) eps.
  double head_mass() const noexcept {
    return 1.0 - static_cast<double>(n - rho) * epsilon;
  }
  // Probability of an entry with weight a at 1-based rank r.
  double probability(double a, std::size_t r) const noexcept {
    if (uniform) return 1.0 / static_cast<double>(n);
    return r <= rho ? a / lambda : epsilon;
  }
};

struct SampleDraw {
  std::size_t index = 0;
  double probability = 0.0;
};

// Validates eps in [0, 1/n] and reports whether it is (numerically) 1/n.
bool epsilon_saturates(double epsilon, std::size_t n);

// Sorted-copy route: decreasing order, prefix sums, bisection for rho.
class NaiveSolver {
 public:
  NaiveSolver(std::span<const double> weights, double epsilon);

  const RestrictedSolution& solution() const noexcept { return solution_; }
  // Indices in decreasing (weight, index) order.
  const std::vector<std::size_t>& order() const noexcept { return order_; }
  // The optimal distribution, indexed like the input weights.
  const std::vector<double>& probabilities() const noexcept { return probs_; }

  // Inverse transform over the explicit distribution in rank order.
  SampleDraw sample(double u) const;

 private:
  RestrictedSolution solution_;
  std::vector<std::size_t> order_;
  std::vector<double> probs_;
  std::vector<double> cdf_;
};

RestrictedSolution solve_naive(std::span<const double> weights, double epsilon);
SampleDraw sample_naive(const NaiveSolver& solver, double u);

// Optimal distribution for the given weights (dense, input-indexed).
std::vector<double> restricted_probabilities(std::span<const double> weights,
                                             double epsilon);

// min over the restricted simplex of sum a_i^2 / p_i. Zero for all-zero a.
double restricted_min_value(std::span<const double> weights, double epsilon);

// Tree-descent route. `node` is the component whose rank is rho.
struct TreeSolution {
  RestrictedSolution solution;
  std::size_t node = 0;
  double head_sum = 0.0;  // key-sum of ranks 1..rho
};

TreeSolution tree_solve(const SamplerTree& tree, double epsilon);
SampleDraw tree_sample(const SamplerTree& tree, const TreeSolution& solved,
                       double u);
SampleDraw tree_sample(const SamplerTree& tree, double epsilon, double u);

// Probability that the tree-backed distribution assigns to component i.
double tree_probability(const SamplerTree& tree, const TreeSolution& solved,
                        std::size_t i);

}  // namespace srg
