#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "oracle.hpp"
#include "srg/baselines.hpp"
#include "srg/error.hpp"
#include "srg/objective.hpp"

namespace {

srg::QuadraticObjective make_quadratic(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto q = oracle::random_quadratic(n, d, rng);
  return srg::QuadraticObjective(d, q.c, q.h);
}

}  // namespace

TEST_CASE("SGD with the full batch size is still a sampled step") {
  const auto f = make_quadratic(5, 2, 1);
  srg::SgdOptimizer opt(f, srg::Vector(2, 0.0), 3, 5);
  opt.step(f, 0.1);
  CHECK(opt.work() == 5);
  CHECK(opt.iteration() == 1);
}

TEST_CASE("SGD indices are roughly uniform") {
  // one-dimensional f_i with distinct centres: the step reveals the index
  const std::size_t n = 7;
  std::vector<double> c(n), h(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) c[i] = static_cast<double>(i + 1);
  srg::QuadraticObjective f(1, c, h);
  std::vector<int> counts(n, 0);
  const int trials = 70000;
  srg::SgdOptimizer opt(f, srg::Vector(1, 0.0), 5, 1);
  for (int t = 0; t < trials; ++t) {
    const double before = opt.x()[0];
    opt.step(f, 0.5);
    // x' = x - 0.5 (x - c_i)  =>  c_i = 2 x' - x
    const double ci = 2.0 * opt.x()[0] - before;
    ++counts[static_cast<std::size_t>(std::lround(ci)) - 1];
  }
  std::vector<double> p(n, 1.0 / n);
  std::vector<std::size_t> cs(counts.begin(), counts.end());
  CHECK(oracle::goodness_of_fit(cs, p).pvalue > 0.001);
}

TEST_CASE("shuffled SGD visits every component once per epoch") {
  const std::size_t n = 13;
  const auto f = make_quadratic(n, 2, 2);
  srg::ShuffledSgdOptimizer opt(f, srg::Vector(2, 0.0), 7, 4);
  std::vector<std::vector<std::size_t>> perms;
  for (int e = 0; e < 4; ++e) {
    opt.epoch(f, {0.01});
    auto perm = opt.permutation();
    auto sorted = perm;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> iota(n);
    std::iota(iota.begin(), iota.end(), 0);
    CHECK(sorted == iota);
    perms.push_back(perm);
  }
  CHECK(opt.epochs_started() == 4);
  CHECK(opt.work() == 4 * n);
  CHECK(opt.iteration() == 4 * 4);  // 13 = 4 + 4 + 4 + 1
  CHECK(std::set<std::vector<std::size_t>>(perms.begin(), perms.end()).size() > 1);
}

TEST_CASE("LSVRG estimator is exact at the reference and unbiased") {
  const std::size_t n = 9;
  const auto f = make_quadratic(n, 3, 3);
  srg::LsvrgOptimizer opt(f, srg::Vector(3, 0.4), 1, 1, 0.1);
  CHECK(opt.work() == n);
  const auto full = srg::full_gradient(f, opt.x());
  for (std::size_t i = 0; i < n; ++i) {
    const auto e = opt.estimate(f, {i});
    for (std::size_t t = 0; t < 3; ++t) CHECK(e[t] == doctest::Approx(full[t]).epsilon(1e-12));
  }
  // move away from the reference, then average over all indices
  for (int k = 0; k < 20; ++k) opt.step(f, 0.05);
  const auto g = srg::full_gradient(f, opt.x());
  srg::Vector mean(3, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto e = opt.estimate(f, {i});
    for (std::size_t t = 0; t < 3; ++t) mean[t] += e[t] / n;
  }
  for (std::size_t t = 0; t < 3; ++t) CHECK(mean[t] == doctest::Approx(g[t]).epsilon(1e-10));
}

TEST_CASE("LSVRG with q = 1 is gradient descent") {
  const auto f = make_quadratic(6, 2, 4);
  srg::LsvrgOptimizer opt(f, srg::Vector(2, 1.0), 2, 1, 1.0);
  srg::Vector x(2, 1.0);
  for (int k = 0; k < 10; ++k) {
    const auto g = srg::full_gradient(f, x);
    for (std::size_t t = 0; t < 2; ++t) x[t] -= 0.1 * g[t];
    opt.step(f, 0.1);
    for (std::size_t t = 0; t < 2; ++t) CHECK(opt.x()[t] == doctest::Approx(x[t]).epsilon(1e-12));
  }
  CHECK(opt.work() == 6 + 10 * (2 + 6));
}

TEST_CASE("LSVRG work averages three per sample at q = m / n") {
  const std::size_t n = 200, m = 4;
  const auto f = make_quadratic(n, 1, 5);
  srg::LsvrgOptimizer opt(f, srg::Vector(1, 0.0), 9, m, static_cast<double>(m) / n);
  const int steps = 20000;
  for (int k = 0; k < steps; ++k) opt.step(f, 0.01);
  const double per_step = static_cast<double>(opt.work() - n) / steps;
  CHECK(per_step == doctest::Approx(3.0 * m).epsilon(0.05));
}

TEST_CASE("LSVRG second moment") {
  const auto f = make_quadratic(5, 2, 6);
  const srg::Vector x = {0.1, 0.2}, ref = {0.5, -0.5};
  const auto mu = srg::full_gradient(f, ref);
  double direct = 0.0;
  srg::Vector g(2), gr(2);
  for (std::size_t i = 0; i < 5; ++i) {
    f.gradient(i, x, g);
    f.gradient(i, ref, gr);
    for (std::size_t t = 0; t < 2; ++t) {
      const double e = g[t] - gr[t] + mu[t];
      direct += e * e / 5;
    }
  }
  CHECK(srg::lsvrg_second_moment(f, x, ref, mu) == doctest::Approx(direct));
}

TEST_CASE("argument validation") {
  const auto f = make_quadratic(4, 2, 7);
  CHECK_THROWS_AS(srg::SgdOptimizer(f, srg::Vector(3, 0.0), 1, 1), srg::InvalidArgument);
  CHECK_THROWS_AS(srg::SgdOptimizer(f, srg::Vector(2, 0.0), 1, 0), srg::InvalidArgument);
  // batches are drawn with replacement, so m > n is allowed
  CHECK_NOTHROW(srg::SgdOptimizer(f, srg::Vector(2, 0.0), 1, 5));
  CHECK_THROWS_AS(srg::LsvrgOptimizer(f, srg::Vector(2, 0.0), 1, 1, 0.0), srg::InvalidArgument);
  srg::SgdOptimizer ok(f, srg::Vector(2, 0.0), 1, 1);
  CHECK_THROWS_AS(ok.step(f, -0.1), srg::InvalidArgument);
}
