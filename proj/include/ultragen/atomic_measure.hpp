#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ultragen/merge_tree.hpp"
#include "ultragen/profile_path.hpp"

namespace ultragen {

// Finite purely atomic measure on [0, inf): sorted distinct locations with
// strictly positive masses.
class AtomicMeasure1D {
 public:
  AtomicMeasure1D() = default;
  // Sorts by location and sums masses at equal locations; zero-mass atoms are
  // dropped, negative masses rejected.
  static AtomicMeasure1D from_atoms(std::vector<std::pair<double, double>> atoms);

  const std::vector<double>& locations() const { return locs_; }
  const std::vector<double>& masses() const { return masses_; }
  std::size_t size() const { return locs_.size(); }
  bool empty() const { return locs_.empty(); }
  double total_mass() const;
  double mass_at(double loc) const;       // mass of the atom at loc (0 if none)
  double mass_upto(double h) const;       // measure of [0, h]
  double mass_above(double h) const;      // measure of (h, inf)

  bool operator==(const AtomicMeasure1D& o) const {
    return locs_ == o.locs_ && masses_ == o.masses_;
  }

 private:
  std::vector<double> locs_;
  std::vector<double> masses_;
};

// Pairwise distance matrix distribution nu^2: mass m_i * m_j at the distance
// of every ordered leaf pair (diagonal pairs land at 0). Total mass is the
// squared tree mass.
AtomicMeasure1D nu2(const MergeTree& t);

// Squared-atom measure: every atom mass squared, locations kept.
AtomicMeasure1D atomic_square(const AtomicMeasure1D& m);

// (sum_i f(t,H)_i)^2 - sum_i f(t,H)_i^2; equals nu2(t)((H, inf)) exactly.
double nu2_tail(const MergeTree& t, double H);

// Modulus of mass distribution at threshold delta: the smallest eps such that
// the mass of points whose open eps-ball carries at most delta is itself at
// most eps. Computed exactly from the ball partitions of the finite tree.
double modulus_of_mass(const MergeTree& t, double delta);

// Right-continuous CDF of the measure as a scalar-valued step path: a jump at
// every positive atom location; the value on (0, first jump) includes the
// atom at 0 when present.
ProfilePath cdf_path(const AtomicMeasure1D& m);

// Distance matrix distribution of order k.
enum class NuKMode { kExact, kMonteCarlo, kAuto };

struct DistanceSample {
  int k = 2;
  bool exact = true;
  // (upper-triangle distance vector, weight); grouped by vector when exact.
  std::vector<std::pair<std::vector<double>, double>> entries;
  std::uint64_t seed = 0;
  std::size_t sample_count = 0;

  double total_weight() const;
  // Weighted mean of a single coordinate of the distance vector.
  double mean_coordinate(std::size_t idx) const;
};

// Exact enumeration of all n^k ordered leaf tuples with product weights when
// n^k <= cap (required in kExact mode); Monte Carlo with the recorded seed
// otherwise.
DistanceSample nu_k(const MergeTree& t, int k, NuKMode mode = NuKMode::kAuto,
                    std::size_t cap = 1u << 20, std::uint64_t seed = 1,
                    std::size_t mc_samples = 100000);

}  // namespace ultragen
