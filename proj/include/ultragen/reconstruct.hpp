#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ultragen/atomic_measure.hpp"
#include "ultragen/merge_tree.hpp"
#include "ultragen/profile_path.hpp"

namespace ultragen {

struct ReconstructionStep {
  double height = 0.0;
  // Which previous-profile indices summed to each new profile entry.
  std::vector<std::vector<int>> groups;
};

struct ReconstructionTrace {
  std::vector<ReconstructionStep> steps;
  bool certified = false;
  std::string certificate;  // what was re-derived and compared
};

struct ReconstructOptions {
  // Absolute tolerance for matching sums and for the certificate; inputs
  // produced by this library match far tighter than the default.
  double tol = 1e-9;
  bool check_identifiable = true;
  int exact_cap = 20;
  std::uint64_t node_budget = 1'000'000;
};

// Rebuild the tree from its decomposition path (unique on identifiable
// inputs). Throws ReconstructError with kind kAmbiguousMatch or
// kInconsistentPath, BudgetError when the search exceeds the node budget.
std::pair<MergeTree, ReconstructionTrace> tree_from_path(const ProfilePath& path,
                                                         const ReconstructOptions& opts = {});

// Rebuild a binary identifiable tree from its pairwise distance distribution.
// Throws ReconstructError with kind kNoCompletion or kMultipleCompletions.
std::pair<MergeTree, ReconstructionTrace> tree_from_nu2(const AtomicMeasure1D& m,
                                                        const ReconstructOptions& opts = {});

struct ThreePoint {
  double x = 0.0, y = 0.0, z = 0.0;
};

// Closed-form inversion of the three-leaf system
//   b0 = x^2+y^2+z^2, b1 = (x+y)^2+z^2, b2 = (x+y+z)^2  (x >= y).
// Domain violations are reported naming the offending radical.
ThreePoint three_point_inversion(double b0, double b1, double b2);

}  // namespace ultragen
