#include "ultragen/merge_tree.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ultragen/errors.hpp"

namespace ultragen {

namespace {

void check_positive_depth(double h) {
  if (!(h > 0.0)) throw ValidationError("depth h must be positive");
}

}  // namespace

MergeTree MergeTree::leaf(std::string label, double mass) {
  TreeBuilder b;
  int i = b.add_leaf(std::move(label), mass);
  return b.build(i);
}

MergeTree MergeTree::merge(double height, std::vector<MergeTree> parts) {
  if (!(height > 0.0)) throw ValidationError("merge height must be positive");
  if (parts.empty()) throw ValidationError("merge: empty part list");
  if (parts.size() == 1) return std::move(parts[0]);
  TreeBuilder b;
  std::vector<int> children;
  for (const MergeTree& p : parts) {
    if (p.root_height() > height)
      throw ValidationError("merge: part root height exceeds merge height");
    // Copy nodes of p into the builder, children first (node indices are in
    // DFS preorder, so descending index order visits children before parents).
    std::vector<int> map(p.nodes().size(), -1);
    for (int i = static_cast<int>(p.nodes().size()); i-- > 0;) {
      const Node& n = p.nodes()[i];
      if (n.children.empty()) {
        map[i] = b.add_leaf(n.label, n.mass);
      } else {
        std::vector<int> ch;
        ch.reserve(n.children.size());
        for (int c : n.children) ch.push_back(map[c]);
        map[i] = b.add_internal(n.height, std::move(ch));
      }
    }
    children.push_back(map[p.root()]);
  }
  int r = b.add_internal(height, std::move(children));
  return b.build(r);
}

std::vector<double> MergeTree::merge_heights() const {
  std::set<double> hs;
  for (const Node& n : nodes_)
    if (!n.children.empty()) hs.insert(n.height);
  return {hs.begin(), hs.end()};
}

RankedProfile MergeTree::leaf_profile() const {
  std::vector<double> m;
  m.reserve(leaves_.size());
  for (int i : leaves_) m.push_back(nodes_[i].mass);
  return RankedProfile(std::move(m));
}

int TreeBuilder::add_leaf(std::string label, double mass) {
  if (!(mass > 0.0)) throw ValidationError("leaf mass must be strictly positive");
  MergeTree::Node n;
  n.height = 0.0;
  n.mass = mass;
  n.label = std::move(label);
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

int TreeBuilder::add_internal(double height, std::vector<int> children) {
  if (!(height > 0.0)) throw ValidationError("internal node height must be positive");
  // Splice children that sit at exactly this height: heights must strictly
  // increase toward the root, so an equal-height child is the same merge
  // event and its children are adopted directly.
  std::vector<int> flat;
  for (int c : children) {
    if (c < 0 || c >= static_cast<int>(nodes_.size()))
      throw ValidationError("add_internal: child index out of range");
    const MergeTree::Node& cn = nodes_[c];
    if (!cn.children.empty() && cn.height == height) {
      for (int gc : cn.children) flat.push_back(gc);
    } else if (cn.height > height) {
      throw ValidationError("add_internal: child height exceeds node height");
    } else {
      flat.push_back(c);
    }
  }
  if (flat.size() < 2) throw ValidationError("add_internal: needs at least 2 children");
  MergeTree::Node n;
  n.height = height;
  n.mass = 0.0;
  for (int c : flat) n.mass += nodes_[c].mass;
  n.children = std::move(flat);
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

MergeTree TreeBuilder::build(int root) {
  if (root < 0 || root >= static_cast<int>(nodes_.size()))
    throw ValidationError("build: root index out of range");
  MergeTree t;
  // Keep only nodes reachable from root, re-indexed in DFS order.
  std::vector<int> order;
  std::vector<int> stack{root};
  std::vector<int> map(nodes_.size(), -1);
  while (!stack.empty()) {
    int i = stack.back();
    stack.pop_back();
    if (map[i] != -1) throw ValidationError("build: node reachable twice (not a tree)");
    map[i] = static_cast<int>(order.size());
    order.push_back(i);
    for (int c : nodes_[i].children) stack.push_back(c);
  }
  t.nodes_.resize(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const MergeTree::Node& src = nodes_[order[k]];
    MergeTree::Node n;
    n.height = src.height;
    n.mass = src.mass;
    n.label = src.label;
    for (int c : src.children) n.children.push_back(map[c]);
    t.nodes_[k] = std::move(n);
  }
  for (std::size_t k = 0; k < t.nodes_.size(); ++k)
    for (int c : t.nodes_[k].children) t.nodes_[c].parent = static_cast<int>(k);
  t.root_ = map[root];
  for (std::size_t k = 0; k < t.nodes_.size(); ++k)
    if (t.nodes_[k].children.empty()) t.leaves_.push_back(static_cast<int>(k));
  if (t.leaves_.empty()) throw ValidationError("build: tree has no leaves");
  return t;
}

namespace {

// Shared implementation: `strict` selects open-ball semantics (root height
// strictly below h).
BallPartition partition_impl(const MergeTree& t, double h, bool strict) {
  check_positive_depth(h);
  BallPartition part;
  part.depth = h;
  std::vector<int> stack{t.root()};
  while (!stack.empty()) {
    int i = stack.back();
    stack.pop_back();
    const MergeTree::Node& n = t.node(i);
    const bool inside = strict ? n.height < h : n.height <= h;
    if (inside) {
      // Maximal subtree within depth h: one block.
      std::vector<int> block;
      std::vector<int> sub{i};
      while (!sub.empty()) {
        int j = sub.back();
        sub.pop_back();
        if (t.is_leaf(j)) block.push_back(j);
        for (int c : t.node(j).children) sub.push_back(c);
      }
      std::sort(block.begin(), block.end());
      part.block_masses.push_back(n.mass);
      part.block_roots.push_back(i);
      part.blocks.push_back(std::move(block));
    } else {
      for (int c : n.children) stack.push_back(c);
    }
  }
  return part;
}

}  // namespace

BallPartition ball_partition(const MergeTree& t, double h) {
  return partition_impl(t, h, /*strict=*/false);
}

BallPartition ball_partition_left(const MergeTree& t, double h) {
  return partition_impl(t, h, /*strict=*/true);
}

RankedProfile family_sizes(const MergeTree& t, double h) {
  return RankedProfile(ball_partition(t, h).block_masses);
}

RankedProfile family_sizes_left_limit(const MergeTree& t, double h) {
  return RankedProfile(ball_partition_left(t, h).block_masses);
}

RankedProfile family_sizes_at_zero(const MergeTree& t) { return t.leaf_profile(); }

int num_balls(const MergeTree& t, double h) {
  return static_cast<int>(ball_partition(t, h).blocks.size());
}

int num_balls_left_limit(const MergeTree& t, double h) {
  return static_cast<int>(ball_partition_left(t, h).blocks.size());
}

}  // namespace ultragen
