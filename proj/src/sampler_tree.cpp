#include "srg/sampler_tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "srg/error.hpp"

namespace srg {

namespace {

void check_key(double key) {
  if (!std::isfinite(key) || key < 0.0) {
    std::ostringstream os;
    os << "sampler tree keys must be finite and non-negative, got " << key;
    throw InvalidArgument(os.str());
  }
}

int floor_log2(std::size_t n) {
  int h = 0;
  while (n > 1) {
    n >>= 1;
    ++h;
  }
  return h;
}

}  // namespace

SamplerTree::SamplerTree(std::span<const double> keys) : n_(keys.size()) {
  if (n_ == 0) throw InvalidArgument("sampler tree needs at least one key");
  if (n_ >= static_cast<std::size_t>(UINT32_MAX))
    throw InvalidArgument("sampler tree supports fewer than 2^32 - 1 keys");
  for (double k : keys) check_key(k);

  nodes_.resize(n_ + 1);
  const Index nil_index = nil();
  Node& sentinel = nodes_[nil_index];
  sentinel.left = sentinel.right = sentinel.parent = nil_index;

  std::vector<Index> order(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    nodes_[i].key = keys[i];
    order[i] = static_cast<Index>(i);
  }
  std::sort(order.begin(), order.end(),
            [this](Index a, Index b) { return less(a, b); });

  // The midpoint build leaves every nil path at depth h or h+1; colouring
  // the deepest level red equalises black heights.
  const int deepest = floor_log2(n_);
  root_ = build_range(order, nil_index, 0, deepest);
  nodes_[root_].red = false;
}

SamplerTree::Index SamplerTree::build_range(std::span<const Index> sorted,
                                            Index parent, int depth,
                                            int red_depth) {
  if (sorted.empty()) return nil();
  const std::size_t mid = sorted.size() / 2;
  const Index v = sorted[mid];
  Node& node = nodes_[v];
  node.parent = parent;
  node.red = depth == red_depth && depth > 0;
  node.left = build_range(sorted.first(mid), v, depth + 1, red_depth);
  node.right = build_range(sorted.subspan(mid + 1), v, depth + 1, red_depth);
  pull(v);
  return v;
}

void SamplerTree::check_index(std::size_t i) const {
  if (i >= n_) {
    throw InvalidArgument("component index " + std::to_string(i) +
                          " out of range [0, " + std::to_string(n_) + ")");
  }
}

double SamplerTree::key(std::size_t i) const {
  check_index(i);
  return nodes_[i].key;
}

void SamplerTree::pull(Index v) noexcept {
  Node& x = nodes_[v];
  const Node& l = nodes_[x.left];
  const Node& r = nodes_[x.right];
  x.size = l.size + r.size + 1;
  x.sum = l.sum + r.sum + x.key;
}

void SamplerTree::pull_path(Index v) noexcept {
  const Index nil_index = nil();
  while (v != nil_index) {
    ++visits_;
    pull(v);
    v = nodes_[v].parent;
  }
}

void SamplerTree::rotate_left(Index x) noexcept {
  const Index nil_index = nil();
  const Index y = nodes_[x].right;
  nodes_[x].right = nodes_[y].left;
  if (nodes_[y].left != nil_index) nodes_[nodes_[y].left].parent = x;
  nodes_[y].parent = nodes_[x].parent;
  const Index xp = nodes_[x].parent;
  if (xp == nil_index) {
    root_ = y;
  } else if (x == nodes_[xp].left) {
    nodes_[xp].left = y;
  } else {
    nodes_[xp].right = y;
  }
  nodes_[y].left = x;
  nodes_[x].parent = y;
  pull(x);
  pull(y);
  visits_ += 2;
}

void SamplerTree::rotate_right(Index x) noexcept {
  const Index nil_index = nil();
  const Index y = nodes_[x].left;
  nodes_[x].left = nodes_[y].right;
  if (nodes_[y].right != nil_index) nodes_[nodes_[y].right].parent = x;
  nodes_[y].parent = nodes_[x].parent;
  const Index xp = nodes_[x].parent;
  if (xp == nil_index) {
    root_ = y;
  } else if (x == nodes_[xp].right) {
    nodes_[xp].right = y;
  } else {
    nodes_[xp].left = y;
  }
  nodes_[y].right = x;
  nodes_[x].parent = y;
  pull(x);
  pull(y);
  visits_ += 2;
}

void SamplerTree::insert(Index z) noexcept {
  const Index nil_index = nil();
  Index parent = nil_index;
  Index v = root_;
  while (v != nil_index) {
    ++visits_;
    parent = v;
    v = less(z, v) ? nodes_[v].left : nodes_[v].right;
  }
  Node& node = nodes_[z];
  node.parent = parent;
  node.left = node.right = nil_index;
  node.red = true;
  if (parent == nil_index) {
    root_ = z;
  } else if (less(z, parent)) {
    nodes_[parent].left = z;
  } else {
    nodes_[parent].right = z;
  }
  pull_path(z);
  insert_fixup(z);
}

void SamplerTree::insert_fixup(Index z) noexcept {
  while (nodes_[nodes_[z].parent].red) {
    ++visits_;
    Index p = nodes_[z].parent;
    Index g = nodes_[p].parent;
    if (p == nodes_[g].left) {
      const Index uncle = nodes_[g].right;
      if (nodes_[uncle].red) {
        nodes_[p].red = false;
        nodes_[uncle].red = false;
        nodes_[g].red = true;
        z = g;
      } else {
        if (z == nodes_[p].right) {
          z = p;
          rotate_left(z);
          p = nodes_[z].parent;
          g = nodes_[p].parent;
        }
        nodes_[p].red = false;
        nodes_[g].red = true;
        rotate_right(g);
      }
    } else {
      const Index uncle = nodes_[g].left;
      if (nodes_[uncle].red) {
        nodes_[p].red = false;
        nodes_[uncle].red = false;
        nodes_[g].red = true;
        z = g;
      } else {
        if (z == nodes_[p].left) {
          z = p;
          rotate_right(z);
          p = nodes_[z].parent;
          g = nodes_[p].parent;
        }
        nodes_[p].red = false;
        nodes_[g].red = true;
        rotate_left(g);
      }
    }
  }
  nodes_[root_].red = false;
}

void SamplerTree::transplant(Index u, Index v) noexcept {
  const Index up = nodes_[u].parent;
  if (up == nil()) {
    root_ = v;
  } else if (u == nodes_[up].left) {
    nodes_[up].left = v;
  } else {
    nodes_[up].right = v;
  }
  nodes_[v].parent = up;
}

SamplerTree::Index SamplerTree::minimum(Index v) const noexcept {
  while (nodes_[v].left != nil()) {
    ++visits_;
    v = nodes_[v].left;
  }
  return v;
}

void SamplerTree::erase(Index z) noexcept {
  const Index nil_index = nil();
  Index y = z;
  bool y_was_red = nodes_[y].red;
  Index x;
  Index repair_from;
  if (nodes_[z].left == nil_index) {
    x = nodes_[z].right;
    repair_from = nodes_[z].parent;
    transplant(z, x);
  } else if (nodes_[z].right == nil_index) {
    x = nodes_[z].left;
    repair_from = nodes_[z].parent;
    transplant(z, x);
  } else {
    y = minimum(nodes_[z].right);
    y_was_red = nodes_[y].red;
    x = nodes_[y].right;
    if (nodes_[y].parent == z) {
      nodes_[x].parent = y;
      repair_from = y;
    } else {
      repair_from = nodes_[y].parent;
      transplant(y, nodes_[y].right);
      nodes_[y].right = nodes_[z].right;
      nodes_[nodes_[y].right].parent = y;
    }
    transplant(z, y);
    nodes_[y].left = nodes_[z].left;
    nodes_[nodes_[y].left].parent = y;
    nodes_[y].red = nodes_[z].red;
  }
  pull_path(repair_from);
  if (!y_was_red) erase_fixup(x);
  // The fixup may have written a parent into the sentinel; nothing else of
  // the sentinel is ever modified.
  nodes_[nil_index].parent = nil_index;
}

void SamplerTree::erase_fixup(Index x) noexcept {
  while (x != root_ && !nodes_[x].red) {
    ++visits_;
    const Index p = nodes_[x].parent;
    if (x == nodes_[p].left) {
      Index w = nodes_[p].right;
      if (nodes_[w].red) {
        nodes_[w].red = false;
        nodes_[p].red = true;
        rotate_left(p);
        w = nodes_[p].right;
      }
      if (!nodes_[nodes_[w].left].red && !nodes_[nodes_[w].right].red) {
        nodes_[w].red = true;
        x = p;
      } else {
        if (!nodes_[nodes_[w].right].red) {
          nodes_[nodes_[w].left].red = false;
          nodes_[w].red = true;
          rotate_right(w);
          w = nodes_[p].right;
        }
        nodes_[w].red = nodes_[p].red;
        nodes_[p].red = false;
        nodes_[nodes_[w].right].red = false;
        rotate_left(p);
        x = root_;
      }
    } else {
      Index w = nodes_[p].left;
      if (nodes_[w].red) {
        nodes_[w].red = false;
        nodes_[p].red = true;
        rotate_right(p);
        w = nodes_[p].left;
      }
      if (!nodes_[nodes_[w].right].red && !nodes_[nodes_[w].left].red) {
        nodes_[w].red = true;
        x = p;
      } else {
        if (!nodes_[nodes_[w].left].red) {
          nodes_[nodes_[w].right].red = false;
          nodes_[w].red = true;
          rotate_left(w);
          w = nodes_[p].left;
        }
        nodes_[w].red = nodes_[p].red;
        nodes_[p].red = false;
        nodes_[nodes_[w].left].red = false;
        rotate_right(p);
        x = root_;
      }
    }
  }
  nodes_[x].red = false;
}

void SamplerTree::update_key(std::size_t i, double new_key) {
  check_index(i);
  check_key(new_key);
  const Index z = static_cast<Index>(i);
  if (nodes_[z].key == new_key) return;
  if (n_ == 1) {
    nodes_[z].key = new_key;
    pull(z);
    return;
  }
  erase(z);
  nodes_[z].key = new_key;
  insert(z);
}

std::size_t SamplerTree::rank(std::size_t i) const {
  check_index(i);
  Index v = static_cast<Index>(i);
  std::size_t r = nodes_[nodes_[v].right].size + 1;
  ++visits_;
  while (v != root_) {
    ++visits_;
    const Index p = nodes_[v].parent;
    if (v == nodes_[p].left) r += nodes_[nodes_[p].right].size + 1;
    v = p;
  }
  return r;
}

double SamplerTree::partial_sum(std::size_t i) const {
  check_index(i);
  Index v = static_cast<Index>(i);
  double s = nodes_[nodes_[v].right].sum + nodes_[v].key;
  ++visits_;
  while (v != root_) {
    ++visits_;
    const Index p = nodes_[v].parent;
    if (v == nodes_[p].left) s += nodes_[nodes_[p].right].sum + nodes_[p].key;
    v = p;
  }
  return s;
}

std::size_t SamplerTree::select_rank(std::size_t r) const {
  if (r < 1 || r > n_) {
    throw InvalidArgument("rank " + std::to_string(r) + " out of range [1, " +
                          std::to_string(n_) + "]");
  }
  Index v = root_;
  for (;;) {
    ++visits_;
    const std::size_t here = nodes_[nodes_[v].right].size + 1;
    if (r == here) return v;
    if (r < here) {
      v = nodes_[v].right;
    } else {
      r -= here;
      v = nodes_[v].left;
    }
  }
}

std::size_t SamplerTree::select_sum(double s) const {
  const double total_sum = total();
  if (!(s >= 0.0) || !(s < total_sum)) {
    std::ostringstream os;
    os << "select_sum target " << s << " outside [0, " << total_sum << ")";
    throw InvalidArgument(os.str());
  }
  const Index nil_index = nil();
  Index v = root_;
  // Last node with a non-empty interval passed on the way down; returned if
  // rounding in the running subtraction walks off the smallest end.
  Index passed = nil_index;
  while (v != nil_index) {
    ++visits_;
    const Node& node = nodes_[v];
    const double upper = nodes_[node.right].sum;
    if (s < upper) {
      v = node.right;
    } else if (s < upper + node.key) {
      return v;
    } else {
      if (node.key > 0.0) passed = v;
      s -= upper + node.key;
      v = node.left;
    }
  }
  if (passed == nil_index) {
    throw InvalidArgument("select_sum found no node with positive key");
  }
  return passed;
}

void SamplerTree::rebuild() {
  // Iterative post-order so deep trees never recurse.
  std::vector<Index> stack;
  std::vector<Index> order;
  order.reserve(n_);
  stack.push_back(root_);
  const Index nil_index = nil();
  while (!stack.empty()) {
    const Index v = stack.back();
    stack.pop_back();
    if (v == nil_index) continue;
    order.push_back(v);
    stack.push_back(nodes_[v].left);
    stack.push_back(nodes_[v].right);
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) pull(*it);
}

std::vector<std::size_t> SamplerTree::indices_by_rank() const {
  std::vector<std::size_t> out;
  out.reserve(n_);
  std::vector<Index> stack;
  const Index nil_index = nil();
  Index v = root_;
  // Reverse in-order: right subtree first gives decreasing keys.
  while (v != nil_index || !stack.empty()) {
    while (v != nil_index) {
      stack.push_back(v);
      v = nodes_[v].right;
    }
    v = stack.back();
    stack.pop_back();
    out.push_back(v);
    v = nodes_[v].left;
  }
  return out;
}

std::string SamplerTree::check_invariants() const {
  const Index nil_index = nil();
  std::ostringstream err;
  const Node& sentinel = nodes_[nil_index];
  if (sentinel.size != 0 || sentinel.sum != 0.0 || sentinel.red) {
    return "nil sentinel was modified";
  }
  if (nodes_[root_].red) return "root is red";
  if (nodes_[root_].parent != nil_index) return "root has a parent";

  // Returns the black height, or -1 after recording an error.
  struct Checker {
    const SamplerTree& t;
    std::ostringstream& err;
    std::size_t seen = 0;
    int walk(Index v) {
      const Index nil_index = t.nil();
      if (v == nil_index) return 1;
      ++seen;
      const Node& x = t.nodes_[v];
      if (x.left != nil_index &&
          (t.nodes_[x.left].parent != v || !t.less(x.left, v))) {
        err << "bad left link or order at node " << v;
        return -1;
      }
      if (x.right != nil_index &&
          (t.nodes_[x.right].parent != v || !t.less(v, x.right))) {
        err << "bad right link or order at node " << v;
        return -1;
      }
      if (x.red && (t.nodes_[x.left].red || t.nodes_[x.right].red)) {
        err << "red node " << v << " has a red child";
        return -1;
      }
      const int lh = walk(x.left);
      if (lh < 0) return -1;
      const int rh = walk(x.right);
      if (rh < 0) return -1;
      if (lh != rh) {
        err << "black height mismatch under node " << v;
        return -1;
      }
      const Node& l = t.nodes_[x.left];
      const Node& r = t.nodes_[x.right];
      if (x.size != l.size + r.size + 1) {
        err << "size mismatch at node " << v;
        return -1;
      }
      const double expect = l.sum + r.sum + x.key;
      if (std::abs(x.sum - expect) > 1e-12 * std::max(1.0, expect)) {
        err << "sum mismatch at node " << v << ": " << x.sum << " vs "
            << expect;
        return -1;
      }
      return lh + (x.red ? 0 : 1);
    }
  };
  Checker checker{*this, err};
  if (checker.walk(root_) < 0) return err.str();
  if (checker.seen != n_ || nodes_[root_].size != n_) {
    return "tree does not contain exactly n nodes";
  }
  double fresh = 0.0;
  for (std::size_t i = 0; i < n_; ++i) fresh += nodes_[i].key;
  if (std::abs(total() - fresh) > 1e-9 * std::max(1.0, fresh)) {
    err << "root sum " << total() << " drifted from " << fresh;
    return err.str();
  }
  return {};
}

std::string SamplerTree::to_dot() const {
  const Index nil_index = nil();
  std::ostringstream os;
  os << "digraph sampler_tree {\n";
  for (std::size_t i = 0; i < n_; ++i) {
    const Node& x = nodes_[i];
    os << "  n" << i << " [label=\"" << i << "\\nkey=" << x.key
       << "\\nsize=" << x.size << "\\nsum=" << x.sum << "\", color="
       << (x.red ? "red" : "black") << "];\n";
    if (x.left != nil_index) os << "  n" << i << " -> n" << x.left << ";\n";
    if (x.right != nil_index) os << "  n" << i << " -> n" << x.right << ";\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace srg
