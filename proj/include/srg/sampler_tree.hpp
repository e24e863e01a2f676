#pragma once

// Augmented red-black tree over the stored gradient norms.
//
// Every node carries the size and key-sum of its subtree, which gives
// rank, prefix-sum, select-by-rank and select-by-cumulative-sum in
// O(log n). Keys are ordered by the composite (key, index) so duplicate
// norms (e.g. the all-zero start) still form a strict total order. Rank 1
// is the largest composite key.
//
// Nodes live in a flat array indexed by component, so the node for
// component i is found in O(1). Index n is the shared nil sentinel.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace srg {

class SamplerTree {
 public:
  using Index = std::uint32_t;

  // keys must be finite and non-negative; n >= 1.
  explicit SamplerTree(std::span<const double> keys);

  std::size_t size() const noexcept { return n_; }
  double key(std::size_t i) const;
  double total() const noexcept { return nodes_[root_].sum; }

  void update_key(std::size_t i, double new_key);

  std::size_t rank(std::size_t i) const;
  double partial_sum(std::size_t i) const;
  std::size_t select_rank(std::size_t r) const;
  std::size_t select_sum(double s) const;

  // Recomputes every subtree size and sum from the keys (post-order).
  void rebuild();

  // Keys in decreasing composite order, i.e. the order of ranks 1..n.
  std::vector<std::size_t> indices_by_rank() const;

  // Empty string when the tree is valid, otherwise a description of the
  // first violated property.
  std::string check_invariants() const;

  std::string to_dot() const;

  // Node-visit instrumentation. Every loop iteration or rotation that
  // touches a node adds one.
  std::uint64_t visits() const noexcept { return visits_; }
  void reset_visits() const noexcept { visits_ = 0; }

  // Read-only structural access used by the tree-descent solver.
  struct NodeView {
    Index left, right, parent;
    double key;
    double sum;
    std::uint32_t size;
  };
  Index root() const noexcept { return root_; }
  Index nil() const noexcept { return static_cast<Index>(n_); }
  NodeView node(Index v) const noexcept {
    const Node& x = nodes_[v];
    return {x.left, x.right, x.parent, x.key, x.sum, x.size};
  }
  void count_visit() const noexcept { ++visits_; }

 private:
  struct Node {
    double key = 0.0;
    double sum = 0.0;
    std::uint32_t size = 0;
    Index left = 0, right = 0, parent = 0;
    bool red = false;
  };

  bool less(Index a, Index b) const noexcept {
    const double ka = nodes_[a].key, kb = nodes_[b].key;
    return ka < kb || (ka == kb && a < b);
  }
  void pull(Index v) noexcept;
  void pull_path(Index v) noexcept;
  Index build_range(std::span<const Index> sorted, Index parent, int depth,
                    int red_depth);
  void rotate_left(Index x) noexcept;
  void rotate_right(Index x) noexcept;
  void insert(Index z) noexcept;
  void insert_fixup(Index z) noexcept;
  void erase(Index z) noexcept;
  void erase_fixup(Index x) noexcept;
  void transplant(Index u, Index v) noexcept;
  Index minimum(Index v) const noexcept;
  void check_index(std::size_t i) const;

  std::size_t n_;
  std::vector<Node> nodes_;
  Index root_;
  mutable std::uint64_t visits_ = 0;
};

}  // namespace srg
