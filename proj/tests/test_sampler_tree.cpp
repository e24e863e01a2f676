#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "srg/error.hpp"
#include "srg/sampler_tree.hpp"

namespace {

// Ranks by (key desc, index desc), which matches the tree's composite
// order read from the largest end.
std::vector<std::size_t> brute_order(const std::vector<double>& keys) {
  std::vector<std::size_t> idx(keys.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return keys[a] > keys[b] || (keys[a] == keys[b] && a > b);
  });
  return idx;
}

void check_against_brute(const srg::SamplerTree& tree, const std::vector<double>& keys) {
  REQUIRE(tree.check_invariants() == "");
  const auto order = brute_order(keys);
  REQUIRE(tree.indices_by_rank() == order);
  double prefix = 0.0;
  for (std::size_t r = 1; r <= keys.size(); ++r) {
    const std::size_t i = order[r - 1];
    prefix += keys[i];
    CHECK(tree.rank(i) == r);
    CHECK(tree.select_rank(r) == i);
    CHECK(tree.partial_sum(i) == doctest::Approx(prefix).epsilon(1e-12));
  }
  CHECK(tree.total() == doctest::Approx(prefix).epsilon(1e-12));
}

}  // namespace

TEST_CASE("single element") {
  std::vector<double> k = {2.5};
  srg::SamplerTree tree(k);
  CHECK(tree.size() == 1);
  CHECK(tree.rank(0) == 1);
  CHECK(tree.select_rank(1) == 0);
  CHECK(tree.select_sum(1.0) == 0);
  tree.update_key(0, 7.0);
  CHECK(tree.total() == 7.0);
  CHECK(tree.check_invariants() == "");
}

TEST_CASE("bulk build matches sorted order") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t n : {2u, 3u, 7u, 8u, 31u, 100u, 1000u}) {
    std::vector<double> k(n);
    for (auto& v : k) v = u(rng);
    srg::SamplerTree tree(k);
    check_against_brute(tree, k);
  }
}

TEST_CASE("random updates keep order, sums and balance") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t n = 200;
  std::vector<double> k(n);
  for (auto& v : k) v = u(rng);
  srg::SamplerTree tree(k);
  for (int step = 0; step < 3000; ++step) {
    const std::size_t i = static_cast<std::size_t>(u(rng) * n) % n;
    const double r = u(rng);
    // mix of zeros, ties and ordinary values
    k[i] = r < 0.1 ? 0.0 : (r < 0.3 ? std::floor(4.0 * u(rng)) : u(rng));
    tree.update_key(i, k[i]);
    if (step % 250 == 0) check_against_brute(tree, k);
    CHECK(tree.key(i) == k[i]);
  }
  check_against_brute(tree, k);
  tree.rebuild();
  check_against_brute(tree, k);
}

TEST_CASE("height stays logarithmic under adversarial updates") {
  const std::size_t n = 4096;
  std::vector<double> k(n, 1.0);
  srg::SamplerTree tree(k);
  // Monotone insertions are the classic way to unbalance a plain BST.
  for (std::size_t i = 0; i < n; ++i) tree.update_key(i, 10.0 + static_cast<double>(i));
  REQUIRE(tree.check_invariants() == "");
  tree.reset_visits();
  for (std::size_t i = 0; i < n; ++i) (void)tree.rank(i);
  const double mean = static_cast<double>(tree.visits()) / n;
  CHECK(mean <= 2.0 * std::log2(static_cast<double>(n + 1)) + 1.0);
}

TEST_CASE("select_sum inverts prefix sums") {
  std::vector<double> k = {1.0, 0.0, 3.0, 2.0};
  srg::SamplerTree tree(k);
  // rank order: 2 (3.0), 3 (2.0), 0 (1.0), 1 (0.0)
  CHECK(tree.select_sum(0.0) == 2);
  CHECK(tree.select_sum(2.999) == 2);
  CHECK(tree.select_sum(3.0) == 3);
  CHECK(tree.select_sum(4.999) == 3);
  CHECK(tree.select_sum(5.0) == 0);
  CHECK(tree.select_sum(5.999) == 0);
  // a zero-key entry is never returned
  for (double s = 0.0; s < 6.0; s += 0.01) CHECK(tree.select_sum(s) != 1);
}

TEST_CASE("ties break by index") {
  std::vector<double> k(5, 1.0);
  srg::SamplerTree tree(k);
  for (std::size_t i = 0; i < 5; ++i) CHECK(tree.rank(i) == 5 - i);
}

TEST_CASE("invalid input") {
  std::vector<double> empty;
  CHECK_THROWS_AS(srg::SamplerTree{empty}, srg::InvalidArgument);
  std::vector<double> neg = {1.0, -1.0};
  CHECK_THROWS_AS(srg::SamplerTree{neg}, srg::InvalidArgument);
  std::vector<double> nan = {1.0, std::nan("")};
  CHECK_THROWS_AS(srg::SamplerTree{nan}, srg::InvalidArgument);
  std::vector<double> ok = {1.0, 2.0};
  srg::SamplerTree tree(ok);
  CHECK_THROWS_AS(tree.update_key(2, 1.0), srg::InvalidArgument);
  CHECK_THROWS_AS(tree.update_key(0, -0.5), srg::InvalidArgument);
  CHECK_THROWS_AS(tree.update_key(0, INFINITY), srg::InvalidArgument);
  CHECK_THROWS_AS(tree.select_rank(0), srg::InvalidArgument);
  CHECK_THROWS_AS(tree.select_rank(3), srg::InvalidArgument);
  CHECK_THROWS_AS(tree.select_sum(3.0), srg::InvalidArgument);
  CHECK_THROWS_AS(tree.select_sum(-1.0), srg::InvalidArgument);
}

TEST_CASE("dot output names every node") {
  std::vector<double> k = {0.5, 1.5, 2.5};
  srg::SamplerTree tree(k);
  const std::string dot = tree.to_dot();
  CHECK(dot.find("digraph") != std::string::npos);
  for (const char* s : {"n0", "n1", "n2"}) CHECK(dot.find(s) != std::string::npos);
}
