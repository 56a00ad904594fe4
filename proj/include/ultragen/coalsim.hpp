#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ultragen/matrix_space.hpp"
#include "ultragen/merge_tree.hpp"
#include "ultragen/ranked_profile.hpp"
#include "ultragen/rng.hpp"

namespace ultragen {

// One resampling event of the Moran graphical construction: at `time` the
// pair {a, b} resamples and `parent` (one of a, b) survives; the other slot
// is replaced by the parent's offspring.
struct ArrowEvent {
  double time = 0.0;
  int a = 0, b = 0;  // a < b
  int parent = 0;
};

// Merging events of a partition-valued coalescent on {0, ..., n-1}. Blocks
// are named by their minimal element.
struct PartitionEvent {
  double time = 0.0;
  int rep_a = 0, rep_b = 0;  // reps of the merging blocks, rep_a < rep_b
};

class PartitionPath {
 public:
  PartitionPath(int n, std::vector<PartitionEvent> events);

  int n() const { return n_; }
  const std::vector<PartitionEvent>& events() const { return events_; }
  // Blocks at time h (events at exactly h applied), each sorted, ordered by rep.
  std::vector<std::vector<int>> blocks_at(double h) const;
  int num_blocks_at(double h) const;
  // First time i and j share a block, if they merge at all.
  std::optional<double> merge_time(int i, int j) const;
  // (k, duration) holding times: time spent with exactly k blocks before the
  // event reducing the count to k-1. The first entry is (n, first event time).
  std::vector<std::pair<int, double>> holding_times() const;

 private:
  int n_ = 0;
  std::vector<PartitionEvent> events_;
};

struct AncestryResult {
  std::vector<double> h_grid;                 // ascending, within [0, t]
  std::vector<std::vector<int>> ancestors;    // ancestors[g][i] = A_{h_grid[g]}(i, t)
  std::vector<std::vector<double>> pseudo_metric;  // r_t before quotienting
};

struct MoranResult {
  MergeTree tree;  // quotient tree with uniform mass 1/N per individual
  AncestryResult ancestry;
  std::vector<ArrowEvent> events;
};

// Forward graphical construction on [0, t]: every unordered pair resamples at
// rate one with a fair direction coin. The returned tree is the genealogy of
// the time-t population, with r0 supplying distances of distinct time-0
// ancestors (offset by t).
MoranResult simulate_moran(int n, double t, const UltrametricMatrixSpace& r0,
                           std::uint64_t seed, std::uint64_t stream = 0,
                           const std::optional<std::vector<double>>& h_grid = {});

// Kingman N-coalescent up to time t_max (pass infinity to run to one block):
// holding time at k blocks is Exp(k(k-1)/2), the merging pair uniform.
PartitionPath simulate_kingman(int n, double t_max, std::uint64_t seed,
                               std::uint64_t stream = 0);

// Genealogy induced by a partition path at time t: leaf masses 1/n, the LCA
// depth of i, j is their merge time when they merge before t, and otherwise
// the r0 distance of their block representatives.
MergeTree tree_from_coalescent(const PartitionPath& p, double t,
                               const UltrametricMatrixSpace& r0);

// Restriction to {0, ..., n-1}: keeps exactly the events that merge two
// distinct restricted blocks. Commutes with further restriction.
PartitionPath restrict_coalescent(const PartitionPath& p, int n);

// Deterministic binary ultrametric on n points with all distances above
// base * 1.0 and distinct merge heights; handy as an initial metric for the
// simulators when none is supplied.
UltrametricMatrixSpace caterpillar_metric(int n, double base);

// Ranked uniform-simplex vector: normalized Exp(1) draws, sorted.
RankedProfile ranked_block_frequencies(int k, CounterRng& rng);

// E[largest entry] = H_k / k, analytically.
double largest_block_mean(int k);

struct ConvergenceExperimentConfig {
  std::vector<int> n_list;
  double t = 1.0;
  std::vector<double> h_grid;
  int reps = 100;
  std::uint64_t seed = 1;
  int jobs = 0;  // 0 = hardware concurrency
  double r0_distance_scale = 4.0;  // distances of the initial caterpillar, in units of t
};

struct ConvergenceExperimentRow {
  int n = 0;
  int rep = 0;
  double h = 0.0;
  int rank = 0;
  double mass = 0.0;
};

struct ConvergenceExperimentReport {
  ConvergenceExperimentConfig config;
  std::vector<ConvergenceExperimentRow> rows;  // family sizes per (n, rep, h)
  // Mean largest family per (n, h), indexed [n_list][h_grid].
  std::vector<std::vector<double>> largest_family_mean;
  // nu2([0, h]) means per (n, h).
  std::vector<std::vector<double>> nu2_upto_mean;
  // Mean l1 distance between f(U^{N_i}, h) and f(U^{N_{i+1}}, h) under the
  // restriction coupling, per (i, h); decreasing in N signals convergence.
  std::vector<std::vector<double>> coupled_l1_gap;
};

// Simulates one underlying Kingman coalescent per replication on max(n_list)
// and couples all population sizes through restriction.
ConvergenceExperimentReport convergence_experiment(const ConvergenceExperimentConfig& cfg);

}  // namespace ultragen
