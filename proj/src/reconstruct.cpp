#include "ultragen/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "ultragen/errors.hpp"
#include "ultragen/tree_ops.hpp"

namespace ultragen {

namespace {

std::string profile_string(const std::vector<double>& v) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ")";
  return os.str();
}

// ---------------------------------------------------------------------------
// tree_from_path
// ---------------------------------------------------------------------------

struct GroupSearch {
  const std::vector<double>& cur;      // current profile, non-increasing
  const std::vector<double>& target;   // next profile, non-increasing
  double tol;
  std::uint64_t* budget;

  std::vector<std::vector<int>> assignment;     // groups per target entry
  std::vector<bool> used;
  std::vector<std::vector<std::vector<int>>> solutions;  // value-level distinct

  bool run() {
    used.assign(cur.size(), false);
    assignment.assign(target.size(), {});
    place(0);
    return !solutions.empty();
  }

  void spend() {
    if (*budget == 0) throw BudgetError("tree_from_path: node budget exceeded");
    --(*budget);
  }

  void place(std::size_t j) {
    spend();
    if (solutions.size() >= 2) return;
    if (j == target.size()) {
      for (bool u : used)
        if (!u) return;
      if (!solutions.empty() && same_values(solutions.front(), assignment)) return;
      solutions.push_back(assignment);
      return;
    }
    // For equal target entries, force the first used index to increase so a
    // permutation of identical groups is enumerated once.
    int min_first = 0;
    if (j > 0 && target[j] == target[j - 1] && !assignment[j - 1].empty())
      min_first = assignment[j - 1].front() + 1;
    std::vector<int> group;
    choose(j, min_first, target[j], group);
  }

  void choose(std::size_t j, int from, double need, std::vector<int>& group) {
    spend();
    if (solutions.size() >= 2) return;
    if (std::abs(need) <= tol && !group.empty()) {
      assignment[j] = group;
      place(j + 1);
      assignment[j].clear();
      return;
    }
    for (int i = from; i < static_cast<int>(cur.size()); ++i) {
      if (used[i]) continue;
      if (cur[i] > need + tol) continue;       // too big (entries sorted desc)
      if (i > from && cur[i] == cur[i - 1] && !used[i - 1] && (group.empty() || group.back() != i - 1)) {
        // Equal values: only take the first available representative.
        continue;
      }
      used[i] = true;
      group.push_back(i);
      choose(j, i + 1, need - cur[i], group);
      group.pop_back();
      used[i] = false;
    }
  }

  bool same_values(const std::vector<std::vector<int>>& a,
                   const std::vector<std::vector<int>>& b) const {
    auto values_of = [&](const std::vector<std::vector<int>>& g) {
      std::vector<std::vector<double>> v;
      for (const auto& grp : g) {
        std::vector<double> one;
        for (int i : grp) one.push_back(cur[i]);
        std::sort(one.begin(), one.end());
        v.push_back(std::move(one));
      }
      std::sort(v.begin(), v.end());
      return v;
    };
    return values_of(a) == values_of(b);
  }
};

}  // namespace

std::pair<MergeTree, ReconstructionTrace> tree_from_path(const ProfilePath& path,
                                                         const ReconstructOptions& opts) {
  path.validate();
  const RankedProfile& start = path.values.front();
  if (start.empty())
    throw ReconstructError(ReconstructFailure::kInconsistentPath, "empty starting profile");
  if (path.values.back().size() != 1)
    throw ReconstructError(ReconstructFailure::kInconsistentPath,
                           "path does not end in a single total-mass family");
  if (path.zero_value && !(l1_distance(*path.zero_value, start) <= opts.tol))
    throw ReconstructError(ReconstructFailure::kInconsistentPath,
                           "zero_value does not match the first plateau");

  if (opts.check_identifiable &&
      static_cast<int>(start.size()) <= opts.exact_cap) {
    MergeTree probe = [&] {
      std::vector<MergeTree> ls;
      for (std::size_t i = 0; i < start.size(); ++i)
        ls.push_back(MergeTree::leaf("p" + std::to_string(i), start.entries()[i]));
      if (ls.size() == 1) return std::move(ls.front());
      double top = path.jumps.empty() ? 1.0 : path.jumps.back();
      return MergeTree::merge(top, std::move(ls));
    }();
    if (is_identifiable(probe).state == Identifiability::kNotIdentifiable)
      throw ValidationError(
          "tree_from_path: identifiability pre-check failed (two atom subsets share a sum); "
          "disable check_identifiable to attempt reconstruction anyway");
  }

  std::uint64_t budget = opts.node_budget;
  ReconstructionTrace trace;

  // Forest roots per current profile entry.
  TreeBuilder builder;
  std::vector<double> cur(start.entries());
  std::vector<int> roots;
  for (std::size_t i = 0; i < cur.size(); ++i)
    roots.push_back(builder.add_leaf("p" + std::to_string(i), cur[i]));

  for (std::size_t k = 0; k < path.jumps.size(); ++k) {
    const double h = path.jumps[k];
    const std::vector<double>& target = path.values[k + 1].entries();
    double sc = 0.0, st = 0.0;
    for (double v : cur) sc += v;
    for (double v : target) st += v;
    if (std::abs(sc - st) > opts.tol * std::max(1.0, sc))
      throw ReconstructError(ReconstructFailure::kInconsistentPath,
                             "mass not conserved at jump h=" + std::to_string(h));
    if (target.size() >= cur.size())
      throw ReconstructError(ReconstructFailure::kInconsistentPath,
                             "family count does not drop at jump h=" + std::to_string(h));

    GroupSearch search{cur, target, opts.tol, &budget, {}, {}, {}};
    search.run();
    if (search.solutions.empty())
      throw ReconstructError(ReconstructFailure::kInconsistentPath,
                             "no grouping of " + profile_string(cur) + " sums to " +
                                 profile_string(target) + " at jump h=" + std::to_string(h));
    if (search.solutions.size() > 1) {
      std::ostringstream os;
      os << "ambiguous grouping at jump h=" << h << ": " << profile_string(cur) << " -> "
         << profile_string(target) << " admits at least two distinct matchings";
      throw ReconstructError(ReconstructFailure::kAmbiguousMatch, os.str());
    }

    const auto& groups = search.solutions.front();
    ReconstructionStep step;
    step.height = h;
    step.groups = groups;
    trace.steps.push_back(step);

    std::vector<double> next_vals;
    std::vector<int> next_roots;
    for (std::size_t j = 0; j < groups.size(); ++j) {
      if (groups[j].size() == 1) {
        next_vals.push_back(cur[groups[j][0]]);
        next_roots.push_back(roots[groups[j][0]]);
      } else {
        std::vector<int> children;
        double mass = 0.0;
        for (int i : groups[j]) {
          children.push_back(roots[i]);
          mass += cur[i];
        }
        next_roots.push_back(builder.add_internal(h, std::move(children)));
        next_vals.push_back(mass);
      }
    }
    cur = std::move(next_vals);
    roots = std::move(next_roots);
  }

  if (roots.size() != 1)
    throw ReconstructError(ReconstructFailure::kInconsistentPath,
                           "path leaves a forest of " + std::to_string(roots.size()) +
                               " components");
  MergeTree tree = builder.build(roots.front());

  // Certificate: the rebuilt tree reproduces the input path.
  const ProfilePath check = decomposition_path(tree);
  bool ok = check.jumps.size() == path.jumps.size();
  for (std::size_t i = 0; ok && i < check.jumps.size(); ++i)
    ok = std::abs(check.jumps[i] - path.jumps[i]) <= opts.tol;
  for (std::size_t i = 0; ok && i < check.values.size(); ++i)
    ok = l1_distance(check.values[i], path.values[i]) <= opts.tol;
  if (!ok)
    throw ReconstructError(ReconstructFailure::kInconsistentPath,
                           "certificate failed: rebuilt tree does not reproduce the path");
  trace.certified = true;
  trace.certificate = "decomposition_path(result) matches the input path (tol " +
                      std::to_string(opts.tol) + ")";
  return {std::move(tree), std::move(trace)};
}

// ---------------------------------------------------------------------------
// tree_from_nu2
// ---------------------------------------------------------------------------

namespace {

struct ShadowNode {
  double mass = 0.0;
  double height = 0.0;  // 0 while unsplit
  int left = -1, right = -1;
};

struct Nu2Search {
  std::vector<double> heights;  // descending
  std::vector<double> weights;  // atom masses at those heights
  double tol_scale;
  std::uint64_t budget;

  std::vector<ShadowNode> pool;
  std::vector<int> open;  // unsplit shadow nodes
  std::vector<std::vector<ShadowNode>> solutions;

  void spend() {
    if (budget == 0) throw BudgetError("tree_from_nu2: node budget exceeded");
    --budget;
  }

  void run(double total_mass) {
    pool.push_back({total_mass, 0.0, -1, -1});
    open.push_back(0);
    dfs(0);
  }

  void dfs(std::size_t k) {
    spend();
    if (solutions.size() >= 2) return;
    if (k == heights.size()) {
      solutions.push_back(pool);
      return;
    }
    const double s = 0.5 * weights[k];
    // Candidate balls deduped by mass: equal-mass balls are interchangeable.
    std::vector<int> cands;
    for (int idx : open) {
      bool dup = false;
      for (int c : cands)
        if (pool[c].mass == pool[idx].mass) {
          dup = true;
          break;
        }
      if (!dup) cands.push_back(idx);
    }
    for (int idx : cands) {
      const double a = pool[idx].mass;
      double disc = a * a - 4.0 * s;
      if (disc < -tol_scale) continue;
      disc = std::max(disc, 0.0);
      const double x = 0.5 * (a + std::sqrt(disc));
      const double y = a - x;
      if (!(y > 0.0)) continue;
      // Split idx into (x, y) at heights[k].
      const int l = static_cast<int>(pool.size());
      pool.push_back({x, 0.0, -1, -1});
      const int r = static_cast<int>(pool.size());
      pool.push_back({y, 0.0, -1, -1});
      pool[idx].height = heights[k];
      pool[idx].left = l;
      pool[idx].right = r;
      auto it = std::find(open.begin(), open.end(), idx);
      *it = l;
      open.push_back(r);

      dfs(k + 1);

      open.pop_back();
      *std::find(open.begin(), open.end(), l) = idx;
      pool[idx].height = 0.0;
      pool[idx].left = pool[idx].right = -1;
      pool.pop_back();
      pool.pop_back();
      if (solutions.size() >= 2) return;
    }
  }
};

MergeTree shadow_to_tree(const std::vector<ShadowNode>& pool) {
  TreeBuilder b;
  int leaf_count = 0;
  // Recursive conversion, children before parents.
  std::vector<int> map(pool.size(), -1);
  auto convert = [&](auto&& self, int i) -> int {
    const ShadowNode& n = pool[i];
    if (n.left < 0) {
      map[i] = b.add_leaf("p" + std::to_string(leaf_count++), n.mass);
      return map[i];
    }
    int l = self(self, n.left);
    int r = self(self, n.right);
    map[i] = b.add_internal(n.height, {l, r});
    return map[i];
  };
  return b.build(convert(convert, 0));
}

ReconstructionTrace trace_from_tree(const MergeTree& t, const std::string& certificate) {
  ReconstructionTrace trace;
  const ProfilePath p = decomposition_path(t);
  for (std::size_t k = 0; k < p.jumps.size(); ++k) {
    const std::vector<double>& prev = p.values[k].entries();
    const std::vector<double>& next = p.values[k + 1].entries();
    // Recover the unique grouping from the ball partitions of the tree.
    const BallPartition fine = ball_partition_left(t, p.jumps[k]);
    const BallPartition coarse = ball_partition(t, p.jumps[k]);
    // Rank orders (stable by mass descending).
    auto ranks = [](const std::vector<double>& masses) {
      std::vector<int> idx(masses.size());
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
      std::stable_sort(idx.begin(), idx.end(),
                       [&](int a, int bb) { return masses[a] > masses[bb]; });
      std::vector<int> rank(masses.size());
      for (std::size_t i = 0; i < idx.size(); ++i) rank[idx[i]] = static_cast<int>(i);
      return rank;
    };
    const std::vector<int> fine_rank = ranks(fine.block_masses);
    const std::vector<int> coarse_rank = ranks(coarse.block_masses);
    // Map each fine block to its containing coarse block via the first leaf.
    ReconstructionStep step;
    step.height = p.jumps[k];
    step.groups.assign(next.size(), {});
    for (std::size_t fb = 0; fb < fine.blocks.size(); ++fb) {
      const int leaf = fine.blocks[fb].front();
      for (std::size_t cb = 0; cb < coarse.blocks.size(); ++cb) {
        if (std::binary_search(coarse.blocks[cb].begin(), coarse.blocks[cb].end(), leaf)) {
          step.groups[coarse_rank[cb]].push_back(fine_rank[fb]);
          break;
        }
      }
    }
    for (auto& g : step.groups) std::sort(g.begin(), g.end());
    (void)prev;
    trace.steps.push_back(std::move(step));
  }
  trace.certified = true;
  trace.certificate = certificate;
  return trace;
}

}  // namespace

std::pair<MergeTree, ReconstructionTrace> tree_from_nu2(const AtomicMeasure1D& m,
                                                        const ReconstructOptions& opts) {
  const double total = m.total_mass();
  if (!(total > 0.0)) throw ValidationError("tree_from_nu2: empty measure");
  const double mass = std::sqrt(total);
  const double tol_scale = opts.tol * std::max(1.0, total);

  Nu2Search search;
  for (std::size_t i = m.size(); i-- > 0;) {
    if (m.locations()[i] > 0.0) {
      search.heights.push_back(m.locations()[i]);
      search.weights.push_back(m.masses()[i]);
    }
  }
  search.tol_scale = tol_scale;
  search.budget = opts.node_budget;
  search.run(mass);

  auto certify = [&](const MergeTree& t) {
    const AtomicMeasure1D back = nu2(t);
    if (back.size() != m.size()) return false;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (back.locations()[i] != m.locations()[i]) return false;
      if (std::abs(back.masses()[i] - m.masses()[i]) > tol_scale) return false;
    }
    return true;
  };

  std::vector<MergeTree> certified;
  for (const auto& sol : search.solutions) {
    MergeTree t = shadow_to_tree(sol);
    if (certify(t)) certified.push_back(std::move(t));
  }
  if (certified.empty())
    throw ReconstructError(ReconstructFailure::kNoCompletion,
                           "no binary tree realizes the given pairwise distance distribution");
  // Every completion reproduces the measure by construction, so with several
  // completions the inverse is pinned down by identifiability: within the
  // binary identifiable class the preimage is unique.
  if (certified.size() > 1) {
    std::vector<MergeTree> identifiable;
    for (MergeTree& t : certified)
      if (is_identifiable(t).state != Identifiability::kNotIdentifiable)
        identifiable.push_back(std::move(t));
    if (identifiable.size() != 1)
      throw ReconstructError(
          ReconstructFailure::kMultipleCompletions,
          "input is realizable by " + std::to_string(certified.size()) +
              " non-isomorphic binary trees, " + std::to_string(identifiable.size()) +
              " of them identifiable; refusing to pick");
    certified = std::move(identifiable);
  }

  MergeTree tree = std::move(certified.front());
  ReconstructionTrace trace = trace_from_tree(
      tree, "nu2(result) matches the input measure (tol " + std::to_string(opts.tol) + ")");
  return {std::move(tree), std::move(trace)};
}

ThreePoint three_point_inversion(double b0, double b1, double b2) {
  if (!(b0 >= 0.0 && b1 >= b0 && b2 >= b1))
    throw ValidationError("three_point_inversion: require 0 <= b0 <= b1 <= b2");
  const double inner = 2.0 * b1 - b2;
  if (inner < 0.0)
    throw ValidationError("three_point_inversion: radical 2*b1 - b2 is negative");
  if (b2 < inner)
    throw ValidationError("three_point_inversion: domain requires b2 >= 2*b1 - b2");
  const double cross = 2.0 * std::sqrt(b2) * std::sqrt(inner);
  const double rad1 = cross + 2.0 * b1;
  double rad2 = cross + 8.0 * b0 - 6.0 * b1;
  if (rad2 < 0.0) {
    if (rad2 < -1e-12 * std::max(1.0, b2))
      throw ValidationError(
          "three_point_inversion: second radical 2*sqrt(b2)*sqrt(2*b1-b2)+8*b0-6*b1 is negative");
    rad2 = 0.0;
  }
  ThreePoint r;
  r.x = 0.25 * (std::sqrt(rad1) + std::sqrt(rad2));
  r.y = 0.25 * (std::sqrt(rad1) - std::sqrt(rad2));
  r.z = 0.5 * (std::sqrt(b2) - std::sqrt(inner));
  return r;
}

}  // namespace ultragen
