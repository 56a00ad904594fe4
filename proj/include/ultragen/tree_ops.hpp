#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ultragen/merge_tree.hpp"

namespace ultragen {

// Quotient by closed balls at depth h and subtract h between distinct balls.
// One leaf per ball, labelled by the ball's first leaf, carrying the ball
// mass; inter-ball distances drop by exactly h.
MergeTree cut(const MergeTree& t, double h);

// Quotient by closed balls at depth h, keeping heights unchanged.
MergeTree psi(const MergeTree& t, double h);

// Truncate all heights at h: distances become min(distance, h).
MergeTree top(const MergeTree& t, double h);

// Concatenation: new root at height h over the parts. Requires every part's
// diameter to be at most h.
MergeTree concat(std::vector<MergeTree> parts, double h);

enum class Identifiability { kIdentifiable, kNotIdentifiable, kUnknown };

struct IdentifiabilityResult {
  Identifiability state = Identifiability::kUnknown;
  // Witness for kNotIdentifiable: two distinct leaf-index sets with equal
  // mass sums.
  std::vector<int> witness_a, witness_b;
};

struct IdentifiabilityOptions {
  // Exact subset-sum check is used for leaf counts up to this cap.
  int exact_cap = 20;
  // Beyond the cap, this many random subset pairs are probed for collisions;
  // a hit yields kNotIdentifiable, otherwise kUnknown.
  std::size_t probe_rounds = 20000;
  std::uint64_t probe_seed = 1;
};

// Identifiable by family sizes: all subset sums of leaf masses are distinct.
IdentifiabilityResult is_identifiable(const MergeTree& t,
                                      const IdentifiabilityOptions& opts = {});

// True iff every internal node has exactly two children and all internal
// heights are pairwise distinct (equivalently: the ball count drops by at
// most one at every depth).
bool is_binary(const MergeTree& t);

// Equivalence of mm-spaces: existence of a mass- and height-matching between
// the trees, entries compared within absolute tolerance tol.
bool isomorphic(const MergeTree& a, const MergeTree& b, double tol = 1e-9);

}  // namespace ultragen
