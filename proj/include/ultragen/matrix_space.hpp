#pragma once

#include <string>
#include <vector>

#include "ultragen/merge_tree.hpp"

namespace ultragen {

// Matrix view of a finite ultra-metric measure space. Import/export form;
// the merge tree is the canonical representation.
struct UltrametricMatrixSpace {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> dist;  // symmetric, zero diagonal
  std::vector<double> mass;               // strictly positive

  UltrametricMatrixSpace(std::vector<std::string> labels_,
                         std::vector<std::vector<double>> dist_,
                         std::vector<double> mass_);

  int size() const { return static_cast<int>(labels.size()); }
};

struct TriangleViolation {
  int i, j, k;
  double slack;  // dist[i][j] - max(dist[i][k], dist[k][j]) > 0
};

// Empty iff the strong triangle inequality holds for all triples.
std::vector<TriangleViolation> validate_ultrametric(const UltrametricMatrixSpace& m);

// Single-linkage agglomeration (equal to complete linkage on ultrametrics).
// Rejects input that fails validate_ultrametric.
MergeTree to_merge_tree(const UltrametricMatrixSpace& m);

// Pairwise LCA heights; exact inverse of to_merge_tree.
UltrametricMatrixSpace to_matrix(const MergeTree& t);

}  // namespace ultragen
