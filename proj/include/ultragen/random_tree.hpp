#pragma once

#include <cstdint>

#include "ultragen/merge_tree.hpp"
#include "ultragen/rng.hpp"

namespace ultragen {

struct RandomTreeOptions {
  bool binary = false;              // force binary topology with distinct heights
  bool continuous_masses = true;    // i.i.d. continuous masses (identifiable a.s.)
  double multifurcation_prob = 0.2; // chance of merging >2 roots at once
  double tie_prob = 0.15;           // chance of reusing a height for a disjoint merge
  double mass_scale = 1.0;
};

// Random merge tree on n leaves labelled x0..x{n-1}. With binary=false the
// tree may contain multifurcations and repeated heights at disjoint nodes.
MergeTree random_tree(int n, CounterRng& rng, const RandomTreeOptions& opts = {});

// Draws until is_identifiable confirms the tree (bounded retries).
MergeTree random_identifiable_tree(int n, std::uint64_t seed, int max_retries = 32);

// Binary topology, pairwise distinct merge heights, continuous masses.
MergeTree random_binary_tree(int n, std::uint64_t seed);

}  // namespace ultragen
