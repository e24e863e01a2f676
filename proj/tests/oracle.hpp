#pragma once

// Reference computations used only by the tests. Nothing here calls into
// the library's sampling or solver code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

namespace oracle {

struct Restricted {
  std::vector<double> p;
  std::size_t rho = 0;
  double lambda = 0.0;
  double value = 0.0;  // sum a_i^2 / p_i
};

inline std::vector<std::size_t> descending(const std::vector<double>& a) {
  std::vector<std::size_t> idx(a.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t x, std::size_t y) { return a[x] > a[y]; });
  return idx;
}

// Tries every head size and keeps the feasible candidate with the smallest
// objective. Quadratic in n; meant for small instances.
inline Restricted brute_restricted(const std::vector<double>& a, double eps) {
  const std::size_t n = a.size();
  const double nn = static_cast<double>(n);
  Restricted best;
  if (std::all_of(a.begin(), a.end(), [](double v) { return v == 0.0; }) ||
      eps >= 1.0 / nn) {
    best.p.assign(n, 1.0 / nn);
    best.rho = n;
    for (double v : a) best.value += v * v * nn;
    return best;
  }
  const auto order = descending(a);
  best.value = std::numeric_limits<double>::infinity();
  long double head = 0.0L;
  for (std::size_t r = 1; r <= n; ++r) {
    head += a[order[r - 1]];
    const double mass = 1.0 - static_cast<double>(n - r) * eps;
    if (!(head > 0.0L) || !(mass > 0.0)) continue;
    const double lambda = static_cast<double>(head) / mass;
    std::vector<double> p(n, eps);
    bool ok = true;
    for (std::size_t t = 0; t < r; ++t) {
      p[order[t]] = a[order[t]] / lambda;
      if (p[order[t]] < eps * (1.0 - 1e-12)) ok = false;
    }
    if (!ok) continue;
    double value = 0.0;
    for (std::size_t i = 0; i < n; ++i) value += a[i] * a[i] / p[i];
    if (value < best.value * (1.0 - 1e-13)) {
      best.p = std::move(p);
      best.rho = r;
      best.lambda = lambda;
      best.value = value;
    }
  }
  return best;
}

// Binary search for the largest i with a_(i) >= eps * lambda(i), written
// from the definitions with plain prefix sums.
struct Bisected {
  std::size_t rho = 0;
  double lambda = 0.0;
};

inline Bisected bisect_rho(const std::vector<double>& a, double eps) {
  const std::size_t n = a.size();
  std::vector<double> sorted(a);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + sorted[i];
  const auto lambda = [&](std::size_t i) {
    return prefix[i] / (1.0 - static_cast<double>(n - i) * eps);
  };
  std::size_t l = 1, r = n, c = 0;
  while (l <= r) {
    const std::size_t m = (l + r) / 2;
    if (sorted[m - 1] >= eps * lambda(m)) {
      c = m;
      l = m + 1;
    } else {
      r = m - 1;
    }
  }
  return {c, c > 0 ? lambda(c) : 0.0};
}

// Upper tail of the chi-square distribution.
inline double chi_square_pvalue(double stat, double dof) {
  return boost::math::gamma_q(dof / 2.0, stat / 2.0);
}

struct Goodness {
  double tv = 0.0;
  double chi2 = 0.0;
  double pvalue = 0.0;
  std::size_t dof = 0;
};

inline Goodness goodness_of_fit(const std::vector<std::size_t>& counts,
                                const std::vector<double>& p) {
  Goodness g;
  double total = 0.0;
  for (auto c : counts) total += static_cast<double>(c);
  std::size_t cells = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double freq = static_cast<double>(counts[i]) / total;
    g.tv += 0.5 * std::abs(freq - p[i]);
    if (p[i] > 0.0) {
      const double e = total * p[i];
      g.chi2 += (static_cast<double>(counts[i]) - e) *
                (static_cast<double>(counts[i]) - e) / e;
      ++cells;
    }
  }
  g.dof = cells - 1;
  g.pvalue = chi_square_pvalue(g.chi2, static_cast<double>(g.dof));
  return g;
}

// Quadratic toy f_i(x) = h_i/2 |x - c_i|^2, written out directly.
struct Quadratic {
  std::size_t n = 0, d = 0;
  std::vector<double> h;
  std::vector<double> c;  // row-major n x d

  std::vector<double> grad(std::size_t i, const std::vector<double>& x) const {
    std::vector<double> g(d);
    for (std::size_t t = 0; t < d; ++t) g[t] = h[i] * (x[t] - c[i * d + t]);
    return g;
  }
  std::vector<double> minimizer() const {
    std::vector<double> x(d, 0.0);
    const double hs = std::accumulate(h.begin(), h.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t t = 0; t < d; ++t) x[t] += h[i] * c[i * d + t] / hs;
    }
    return x;
  }
  double l_max() const { return *std::max_element(h.begin(), h.end()); }
  double mu() const {
    return std::accumulate(h.begin(), h.end(), 0.0) / static_cast<double>(n);
  }
};

inline Quadratic random_quadratic(std::size_t n, std::size_t d,
                                  std::mt19937_64& rng, double hlo = 0.2,
                                  double hhi = 4.0, double spread = 3.0) {
  Quadratic q;
  q.n = n;
  q.d = d;
  std::uniform_real_distribution<double> uh(hlo, hhi);
  std::normal_distribution<double> nc(0.0, spread);
  for (std::size_t i = 0; i < n; ++i) q.h.push_back(uh(rng));
  for (std::size_t i = 0; i < n * d; ++i) q.c.push_back(nc(rng));
  return q;
}

inline double sqdist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

inline double sqnorm(const std::vector<double>& a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace oracle
