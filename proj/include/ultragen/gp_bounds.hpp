#pragma once

#include <string>
#include <vector>

#include "ultragen/atomic_measure.hpp"
#include "ultragen/merge_tree.hpp"
#include "ultragen/prohorov.hpp"
#include "ultragen/skorohod.hpp"

namespace ultragen {

struct GpOptions {
  double tol = 1e-10;    // bisection tolerance of the inner Prohorov solver
  int perm_cap = 7;      // exact quotient matching up to this many balls
  int coarsen_grid = 9;  // additional coarsening depths between 0 and diam
};

// Certified upper bound on the Gromov-Prohorov distance together with the
// strategy that achieved it.
struct GpBound {
  double value = 0.0;
  std::string strategy;
};

// Minimum over the implemented embedding strategies:
//  - shared-labels: both trees on the same label set, glued along the label
//    correspondence (exact Prohorov distance in the glue space);
//  - subspace: one label set contains the other with identical restricted
//    metric (exact Prohorov distance in the larger space);
//  - coarsen(h): quotient both trees by their h-balls, match the quotients
//    exactly over permutations, and pay 2h for the two quotient maps.
GpBound gp_upper_bound(const MergeTree& a, const MergeTree& b, const GpOptions& opts = {});

// Surrogate for the Gromov-weak atomic metric: Gromov-Prohorov bound plus the
// atom-at-zero gap of nu2 plus the Skorohod distances between the CDFs of nu2
// and of its squared-atom measure. Metrizes the same convergence on finite
// inputs; not an isometry.
struct GwaSurrogate {
  double value = 0.0;
  double gp = 0.0;
  double atom_zero_gap = 0.0;
  double cdf_skorohod = 0.0;         // between the nu2 CDFs
  double cdf_square_skorohod = 0.0;  // between the (nu2)* CDFs
  std::string gp_strategy;
};

GwaSurrogate gwa_distance_surrogate(const MergeTree& a, const MergeTree& b,
                                    const GpOptions& opts = {});

// Weak vs weak-atomic convergence of a sequence of measures on the line,
// decided through the CDF step paths (Skorohod conditions) and plain CDF
// convergence at continuity points.
enum class MeasureConvergence { kNotWeak, kWeakOnly, kWeakAtomic };

struct WeakAtomicOptions {
  double tol = 1e-9;
  std::size_t tail_window = 1;
};

struct WeakAtomicReport {
  MeasureConvergence grade = MeasureConvergence::kWeakAtomic;
  std::string detail;
};

WeakAtomicReport classify_weak_atomic(const std::vector<AtomicMeasure1D>& seq,
                                      const AtomicMeasure1D& target,
                                      const WeakAtomicOptions& opts = {});

}  // namespace ultragen
