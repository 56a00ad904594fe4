#pragma once

#include <vector>

#include "ultragen/matrix_space.hpp"
#include "ultragen/merge_tree.hpp"

namespace ultragen::fixtures {

// Three unit-mass points at mutual distance 1 (one simultaneous merge).
inline MergeTree equilateral_u() {
  return MergeTree::merge(1.0, {MergeTree::leaf("x1", 1.0), MergeTree::leaf("x2", 1.0),
                                MergeTree::leaf("x3", 1.0)});
}

// r(x1,x2) = 1, r(x1,x3) = r(x2,x3) = 1 + 1/n, unit masses.
inline MergeTree caterpillar_un(int n) {
  const double outer = 1.0 + 1.0 / static_cast<double>(n);
  return MergeTree::merge(
      outer, {MergeTree::merge(1.0, {MergeTree::leaf("x1", 1.0), MergeTree::leaf("x2", 1.0)}),
              MergeTree::leaf("x3", 1.0)});
}

// Seven unit-mass leaves falling into four closed balls at depth 3:
// a triple merged at 2, a pair merged at 1 (joining the rest at 4 and 5),
// root at 7.
inline MergeTree seven_leaf_tree() {
  MergeTree triple = MergeTree::merge(
      2.0, {MergeTree::leaf("a", 1.0), MergeTree::leaf("b", 1.0), MergeTree::leaf("c", 1.0)});
  MergeTree pair = MergeTree::merge(1.0, {MergeTree::leaf("d", 1.0), MergeTree::leaf("e", 1.0)});
  MergeTree right =
      MergeTree::merge(5.0, {MergeTree::merge(4.0, {std::move(pair), MergeTree::leaf("f", 1.0)}),
                             MergeTree::leaf("g", 1.0)});
  return MergeTree::merge(7.0, {std::move(triple), std::move(right)});
}

inline UltrametricMatrixSpace un_matrix(int n) {
  const double outer = 1.0 + 1.0 / static_cast<double>(n);
  return UltrametricMatrixSpace(
      {"x1", "x2", "x3"},
      {{0.0, 1.0, outer}, {1.0, 0.0, outer}, {outer, outer, 0.0}},
      {1.0, 1.0, 1.0});
}

}  // namespace ultragen::fixtures
