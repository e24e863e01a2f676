#include "srg/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "srg/error.hpp"

namespace srg {

bool epsilon_saturates(double epsilon, std::size_t n) {
  if (n == 0) throw InvalidArgument("restricted simplex needs n >= 1");
  const double cap = 1.0 / static_cast<double>(n);
  if (!(epsilon >= 0.0) || epsilon > cap * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "lower bound " << epsilon << " outside [0, 1/n = " << cap << "]";
    throw InvalidArgument(os.str());
  }
  return epsilon >= cap * (1.0 - 1e-14);
}

namespace {

RestrictedSolution uniform_solution(std::size_t n, double epsilon) {
  RestrictedSolution s;
  s.n = n;
  s.rho = n;
  s.epsilon = epsilon;
  s.uniform = true;
  return s;
}

void check_weights(std::span<const double> weights) {
  if (weights.empty()) throw InvalidArgument("weights must be non-empty");
  for (double a : weights) {
    if (!std::isfinite(a) || a < 0.0) {
      std::ostringstream os;
      os << "weights must be finite and non-negative, got " << a;
      throw InvalidArgument(os.str());
    }
  }
}

}  // namespace

NaiveSolver::NaiveSolver(std::span<const double> weights, double epsilon) {
  check_weights(weights);
  const std::size_t n = weights.size();
  const bool saturated = epsilon_saturates(epsilon, n);

  order_.resize(n);
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
    return weights[a] > weights[b] || (weights[a] == weights[b] && a > b);
  });

  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    prefix[i + 1] = prefix[i] + weights[order_[i]];
  }

  probs_.assign(n, 1.0 / static_cast<double>(n));
  if (saturated || prefix[n] == 0.0) {
    solution_ = uniform_solution(n, epsilon);
  } else {
    const auto floor_mass = [&](std::size_t i) {
      return 1.0 - static_cast<double>(n - i) * epsilon;
    };
    // Largest 1-based i with a_(i) * (1 - (n - i) eps) >= eps * P(i).
    std::size_t lo = 1, hi = n, rho = 1;
    while (lo <= hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (weights[order_[mid - 1]] * floor_mass(mid) >= epsilon * prefix[mid]) {
        rho = mid;
        lo = mid + 1;
      } else {
        hi = mid - 1;
      }
    }
    solution_.n = n;
    solution_.rho = rho;
    solution_.epsilon = epsilon;
    solution_.lambda = prefix[rho] / floor_mass(rho);
    for (std::size_t r = 0; r < n; ++r) {
      const std::size_t i = order_[r];
      probs_[i] = solution_.probability(weights[i], r + 1);
    }
  }

  cdf_.resize(n);
  double acc = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    acc += probs_[order_[r]];
    cdf_[r] = acc;
  }
}

SampleDraw NaiveSolver::sample(double u) const {
  const std::size_t n = order_.size();
  std::size_t r = static_cast<std::size_t>(
      std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
  if (r >= n) {
    // u beyond the rounded total: take the last entry with positive mass.
    r = n - 1;
    while (r > 0 && probs_[order_[r]] == 0.0) --r;
  }
  const std::size_t i = order_[r];
  return {i, probs_[i]};
}

RestrictedSolution solve_naive(std::span<const double> weights,
                               double epsilon) {
  return NaiveSolver(weights, epsilon).solution();
}

SampleDraw sample_naive(const NaiveSolver& solver, double u) {
  return solver.sample(u);
}

std::vector<double> restricted_probabilities(std::span<const double> weights,
                                             double epsilon) {
  return NaiveSolver(weights, epsilon).probabilities();
}

double restricted_min_value(std::span<const double> weights, double epsilon) {
  const NaiveSolver solver(weights, epsilon);
  const RestrictedSolution& sol = solver.solution();
  const std::size_t n = weights.size();
  double head = 0.0, tail = 0.0, squares = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const double a = weights[solver.order()[r]];
    squares += a * a;
    if (r < sol.rho) {
      head += a;
    } else {
      tail += a * a;
    }
  }
  if (head == 0.0 && tail == 0.0) return 0.0;
  if (sol.uniform) return static_cast<double>(n) * squares;
  return sol.lambda * head + tail / epsilon;
}

TreeSolution tree_solve(const SamplerTree& tree, double epsilon) {
  const std::size_t n = tree.size();
  TreeSolution out;
  if (epsilon_saturates(epsilon, n) || tree.total() == 0.0) {
    out.solution = uniform_solution(n, epsilon);
    out.head_sum = tree.total();
    return out;
  }

  const auto nil = tree.nil();
  const auto floor_mass = [&](std::size_t r) {
    return 1.0 - static_cast<double>(n - r) * epsilon;
  };

  // `above_*` accumulate the count and key-sum of every node ranked before
  // the current subtree, so (r, s) are the rank and partial sum of v and
  // lambda(r) = s / c without any running subtraction.
  std::size_t above_count = 0;
  double above_sum = 0.0;
  auto v = tree.root();
  std::size_t best = 0, best_rank = 0;
  double best_sum = 0.0;
  bool found = false;
  while (v != nil) {
    tree.count_visit();
    const auto node = tree.node(v);
    const auto right = tree.node(node.right);
    const std::size_t r = above_count + right.size + 1;
    const double s = above_sum + right.sum + node.key;
    const double c = floor_mass(r);
    if (node.key * c >= epsilon * s) {
      found = true;
      best = v;
      best_rank = r;
      best_sum = s;
      above_count = r;
      above_sum = s;
      v = node.left;
    } else {
      v = node.right;
    }
  }
  if (!found) {
    throw Error(ErrorCode::Internal,
                "tree descent found no rank clearing the threshold");
  }
  out.node = best;
  out.head_sum = best_sum;
  out.solution.n = n;
  out.solution.rho = best_rank;
  out.solution.epsilon = epsilon;
  out.solution.lambda = best_sum / floor_mass(best_rank);
  return out;
}

SampleDraw tree_sample(const SamplerTree& tree, const TreeSolution& solved,
                       double u) {
  if (!(u >= 0.0) || !(u < 1.0)) {
    throw InvalidArgument("uniform draw must lie in [0, 1)");
  }
  const RestrictedSolution& sol = solved.solution;
  const std::size_t n = sol.n;
  if (sol.uniform) {
    const std::size_t i =
        std::min(n - 1, static_cast<std::size_t>(u * static_cast<double>(n)));
    return {i, 1.0 / static_cast<double>(n)};
  }
  const double head = sol.head_mass();
  if (u < head) {
    double s = sol.lambda * u;
    if (s >= solved.head_sum) s = std::nextafter(solved.head_sum, 0.0);
    const std::size_t i = tree.select_sum(s);
    return {i, tree.key(i) / sol.lambda};
  }
  if (sol.rho >= n) return {tree.select_rank(n), sol.epsilon};
  const double steps = std::floor((u - head) / sol.epsilon);
  std::size_t r = n;
  if (steps > 0.0) {
    r = steps >= static_cast<double>(n) ? 0 : n - static_cast<std::size_t>(steps);
  }
  r = std::clamp(r, sol.rho + 1, n);
  return {tree.select_rank(r), sol.epsilon};
}

SampleDraw tree_sample(const SamplerTree& tree, double epsilon, double u) {
  return tree_sample(tree, tree_solve(tree, epsilon), u);
}

double tree_probability(const SamplerTree& tree, const TreeSolution& solved,
                        std::size_t i) {
  const RestrictedSolution& sol = solved.solution;
  if (sol.uniform) return 1.0 / static_cast<double>(sol.n);
  return sol.probability(tree.key(i), tree.rank(i));
}

}  // namespace srg
