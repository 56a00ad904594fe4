#pragma once

#include <string>
#include <vector>

#include "ultragen/ranked_profile.hpp"

namespace ultragen {

// Canonical representation of a finite ultra-metric measure space: a merge
// tree (dendrogram). Leaves carry strictly positive masses; internal nodes
// carry the depth at which their children's families merge. Heights strictly
// increase toward the root, so the distance between two leaves is the height
// of their lowest common ancestor.
//
// Values are immutable after construction and safe to share across threads.
class MergeTree {
 public:
  struct Node {
    double height = 0.0;        // 0 for leaves
    double mass = 0.0;          // total mass of the subtree
    int parent = -1;
    std::vector<int> children;  // empty <=> leaf
    std::string label;          // leaves only
  };

  static MergeTree leaf(std::string label, double mass);

  // New root at `height` over the given parts. A part whose root sits exactly
  // at `height` is spliced into the new node (no zero-length edges); a part
  // with root height above `height` is rejected.
  static MergeTree merge(double height, std::vector<MergeTree> parts);

  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(int i) const { return nodes_[i]; }
  int root() const { return root_; }
  bool is_leaf(int i) const { return nodes_[i].children.empty(); }
  // Leaf node indices in stored order.
  const std::vector<int>& leaves() const { return leaves_; }
  int num_leaves() const { return static_cast<int>(leaves_.size()); }
  double total_mass() const { return nodes_[root_].mass; }
  // Diameter of the space; 0 for a single leaf.
  double root_height() const { return nodes_[root_].height; }
  // Sorted distinct internal-node heights (the jump set of the profile path).
  std::vector<double> merge_heights() const;

  // Ranked leaf masses, i.e. the value of the decomposition at depth 0.
  RankedProfile leaf_profile() const;

 private:
  friend class TreeBuilder;
  MergeTree() = default;

  std::vector<Node> nodes_;
  std::vector<int> leaves_;
  int root_ = -1;
};

// Mutable construction helper used by algorithms that assemble trees node by
// node. Validates structure in build().
class TreeBuilder {
 public:
  int add_leaf(std::string label, double mass);
  int add_internal(double height, std::vector<int> children);
  MergeTree build(int root);

 private:
  std::vector<MergeTree::Node> nodes_;
};

// Decomposition of a tree into closed balls of radius h: blocks are the
// maximal subtrees whose root height does not exceed h.
struct BallPartition {
  double depth = 0.0;
  std::vector<std::vector<int>> blocks;  // leaf indices per block
  std::vector<double> block_masses;
  std::vector<int> block_roots;          // subtree root node per block
};

// Closed-ball partition at depth h (> 0). Leaves at distance exactly h share
// a block.
BallPartition ball_partition(const MergeTree& t, double h);
// Open-ball variant: blocks are maximal subtrees with root height strictly
// below h. This is the left limit of ball_partition at h.
BallPartition ball_partition_left(const MergeTree& t, double h);

// Ranked block masses of the closed-ball partition at depth h.
RankedProfile family_sizes(const MergeTree& t, double h);
// Left limit: ranked block masses of the open-ball partition at h.
RankedProfile family_sizes_left_limit(const MergeTree& t, double h);
// Value at depth 0: ranked atom masses.
RankedProfile family_sizes_at_zero(const MergeTree& t);

// Number of closed balls at depth h; non-increasing in h.
int num_balls(const MergeTree& t, double h);
int num_balls_left_limit(const MergeTree& t, double h);

}  // namespace ultragen
