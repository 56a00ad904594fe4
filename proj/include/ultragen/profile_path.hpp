#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ultragen/merge_tree.hpp"
#include "ultragen/ranked_profile.hpp"

namespace ultragen {

// Right-continuous step function h -> RankedProfile on (0, inf) with finitely
// many jumps: values[0] on (0, jumps[0]), values[k] on [jumps[k-1], jumps[k]),
// values[m] on [jumps[m-1], inf). zero_value holds the extension to h = 0 in
// the purely atomic case.
struct ProfilePath {
  std::vector<double> jumps;           // strictly increasing, positive
  std::vector<RankedProfile> values;   // size jumps.size() + 1
  std::optional<RankedProfile> zero_value;

  void validate() const;  // throws ValidationError on malformed paths
};

// The family size decomposition of a tree: jumps at the distinct merge
// heights, plateau values given by family_sizes.
ProfilePath decomposition_path(const MergeTree& t);

const RankedProfile& evaluate(const ProfilePath& p, double h);
const RankedProfile& evaluate_left(const ProfilePath& p, double h);

// One probe for the convergence checker: a limit time t and, per member of
// the sequence, an evaluation time t_n (t_n -> t).
struct ConvergenceProbe {
  double t = 0.0;
  std::vector<double> times;
  std::string origin;  // how the probe was generated (for reports)
};

struct ConvergenceCriteria {
  double tol = 1e-9;          // final-element tolerance for "-> 0"
  std::size_t tail_window = 1;  // how many trailing elements must be within tol
  bool auto_probes = true;      // generate default probes from jump structure
};

struct ConvergenceReport {
  bool converged = true;
  char condition = ' ';   // 'a', 'b' or 'c' of the Skorohod characterization
  std::string detail;     // first violation, human-readable
};

// Checks conditions (a)-(c) of the Skorohod convergence characterization for
// the finite sequence path_seq against `target`, along the supplied probes
// plus (optionally) automatically generated ones.
ConvergenceReport converges_to(const std::vector<ProfilePath>& path_seq,
                               const ProfilePath& target,
                               const ConvergenceCriteria& criteria = {},
                               const std::vector<ConvergenceProbe>& probes = {});

}  // namespace ultragen
