#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "oracle.hpp"
#include "srg/data_io.hpp"
#include "srg/error.hpp"
#include "srg/objective.hpp"

namespace {

std::shared_ptr<srg::Dataset> make_data(std::size_t n, std::size_t d, std::uint64_t seed,
                                          bool pm_labels) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  auto ds = std::make_shared<srg::Dataset>();
  ds->n = n;
  ds->d = d;
  ds->features.resize(n * d);
  ds->labels.resize(n);
  for (auto& v : ds->features) v = nd(rng);
  for (auto& y : ds->labels) y = pm_labels ? (nd(rng) > 0 ? 1.0 : -1.0) : nd(rng);
  return ds;
}

double fd_check(const srg::Objective& f, std::size_t i, const srg::Vector& x) {
  const std::size_t d = f.dim();
  srg::Vector g(d);
  f.gradient(i, x, g);
  double worst = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double h = 1e-6;
    srg::Vector xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    const double fd = (f.value(i, xp) - f.value(i, xm)) / (2 * h);
    worst = std::max(worst, std::abs(fd - g[j]) / std::max(1e-3, std::abs(fd)));
  }
  return worst;
}

}  // namespace

TEST_CASE("loss kind names") {
  CHECK(srg::loss_kind_from_string("logistic") == srg::LossKind::Logistic);
  CHECK(srg::loss_kind_from_string("least_squares") == srg::LossKind::LeastSquares);
  CHECK(srg::loss_kind_from_string("least-squares") == srg::LossKind::LeastSquares);
  CHECK(srg::to_string(srg::LossKind::LeastSquares) == "least_squares");
  CHECK_THROWS_AS(srg::loss_kind_from_string("hinge"), srg::InvalidArgument);
}

TEST_CASE("gradients match finite differences") {
  for (auto kind : {srg::LossKind::Logistic, srg::LossKind::LeastSquares}) {
    srg::DatasetObjective f(make_data(20, 5, 1, kind == srg::LossKind::Logistic), kind, 0.05);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int t = 0; t < 10; ++t) {
      srg::Vector x(5);
      for (auto& v : x) v = nd(rng);
      for (std::size_t i = 0; i < 20; ++i) CHECK(fd_check(f, i, x) < 1e-5);
    }
  }
}

TEST_CASE("full gradient is the component average") {
  srg::DatasetObjective f(make_data(15, 4, 3, true), srg::LossKind::Logistic, 0.1);
  const srg::Vector x = {0.2, -0.4, 1.0, 0.0};
  const auto g = srg::full_gradient(f, x);
  srg::Vector sum(4, 0.0), gi(4);
  double value = 0.0;
  for (std::size_t i = 0; i < 15; ++i) {
    f.gradient(i, x, gi);
    for (std::size_t j = 0; j < 4; ++j) sum[j] += gi[j] / 15;
    value += f.value(i, x) / 15;
  }
  for (std::size_t j = 0; j < 4; ++j) CHECK(g[j] == doctest::Approx(sum[j]).epsilon(1e-13));
  CHECK(srg::full_value(f, x) == doctest::Approx(value).epsilon(1e-13));
}

TEST_CASE("components are convex along random segments") {
  srg::DatasetObjective f(make_data(10, 3, 4, true), srg::LossKind::Logistic, 0.0);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd(0.0, 2.0);
  for (int t = 0; t < 200; ++t) {
    srg::Vector a(3), b(3), mid(3);
    for (std::size_t j = 0; j < 3; ++j) {
      a[j] = nd(rng);
      b[j] = nd(rng);
      mid[j] = 0.5 * (a[j] + b[j]);
    }
    const std::size_t i = t % 10;
    CHECK(f.value(i, mid) <= 0.5 * (f.value(i, a) + f.value(i, b)) + 1e-12);
  }
}

TEST_CASE("smoothness and strong convexity constants") {
  auto ds = make_data(30, 4, 6, true);
  srg::DatasetObjective logit(ds, srg::LossKind::Logistic, 0.02);
  double max_row = 0.0;
  for (std::size_t i = 0; i < 30; ++i) max_row = std::max(max_row, srg::squared_norm(ds->row(i)));
  CHECK(logit.max_smoothness() == doctest::Approx(0.25 * max_row + 0.02));
  CHECK(logit.strong_convexity() == doctest::Approx(0.02));
  CHECK(logit.smoothness() <= logit.max_smoothness() + 1e-12);

  srg::DatasetObjective ls(ds, srg::LossKind::LeastSquares, 0.0);
  // Gram eigenvalues by Rayleigh quotients on many directions bracket the extremes
  const double lo = srg::gram_min_eigenvalue(*ds), hi = srg::gram_max_eigenvalue(*ds);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int t = 0; t < 500; ++t) {
    srg::Vector v(4);
    for (auto& e : v) e = nd(rng);
    double q = 0.0;
    for (std::size_t i = 0; i < 30; ++i) {
      double r = 0.0;
      for (std::size_t j = 0; j < 4; ++j) r += ds->row(i)[j] * v[j];
      q += r * r / 30;
    }
    q /= oracle::sqnorm(v);
    CHECK(q >= lo - 1e-10);
    CHECK(q <= hi + 1e-10);
  }
  CHECK(ls.smoothness() == doctest::Approx(hi));
  CHECK(ls.strong_convexity() == doctest::Approx(lo));
  CHECK(lo > 0.0);
}

TEST_CASE("unit rows give L = 1/4 + mu for logistic") {
  auto ds = make_data(25, 6, 8, true);
  srg::normalize_rows(*ds);
  srg::DatasetObjective f(ds, srg::LossKind::Logistic, 0.04);
  CHECK(f.smoothness() == doctest::Approx(0.29));
  CHECK(f.max_smoothness() == doctest::Approx(0.29));
}

TEST_CASE("quadratic objective closed forms") {
  std::mt19937_64 rng(9);
  const auto q = oracle::random_quadratic(7, 3, rng);
  srg::QuadraticObjective f(3, q.c, q.h);
  const auto xs = f.minimizer();
  const auto g = srg::full_gradient(f, xs);
  CHECK(oracle::sqnorm(g) < 1e-24);
  CHECK(f.max_smoothness() == doctest::Approx(q.l_max()));
  CHECK(f.strong_convexity() == doctest::Approx(q.mu()));
  CHECK(fd_check(f, 3, {0.1, 0.2, 0.3}) < 1e-6);
  CHECK_THROWS_AS(srg::QuadraticObjective(3, {1.0, 2.0}, {1.0}), srg::InvalidArgument);
  CHECK_THROWS_AS(srg::QuadraticObjective(1, {1.0}, {0.0}), srg::InvalidArgument);
}

TEST_CASE("reference solution reaches a stationary point") {
  srg::DatasetObjective f(make_data(40, 5, 10, true), srg::LossKind::Logistic, 0.1);
  const auto ref = srg::reference_solution(f, 1e-10);
  CHECK(ref.gradient_norm <= 1e-10);
  CHECK(std::sqrt(oracle::sqnorm(srg::full_gradient(f, ref.x))) <= 1e-10);
  // one extra full step from the optimum barely moves
  auto g = srg::full_gradient(f, ref.x);
  CHECK(std::sqrt(oracle::sqnorm(g)) / f.smoothness() < 1e-9);
}

TEST_CASE("invalid objectives") {
  auto empty = std::make_shared<srg::Dataset>();
  CHECK_THROWS_AS(srg::DatasetObjective(empty, srg::LossKind::Logistic, 0.1), srg::InvalidArgument);
  CHECK_THROWS_AS(srg::DatasetObjective(make_data(3, 2, 1, true), srg::LossKind::Logistic, -1.0),
                  srg::InvalidArgument);
}
