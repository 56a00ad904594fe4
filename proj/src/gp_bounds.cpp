#include "ultragen/gp_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "ultragen/errors.hpp"
#include "ultragen/matrix_space.hpp"
#include "ultragen/tree_ops.hpp"

namespace ultragen {

namespace {

// Cross-copy distances of the glue space along a correspondence:
//   d(x, y) = min_z (r1(x, z1) + r2(z2, y)) + c,   c = dis(correspondence)/2.
struct Glue {
  std::vector<std::vector<double>> cross;
  double c = 0.0;
};

Glue glue_spaces(const UltrametricMatrixSpace& m1, const UltrametricMatrixSpace& m2,
                 const std::vector<std::pair<int, int>>& corr) {
  Glue g;
  for (std::size_t a = 0; a < corr.size(); ++a)
    for (std::size_t b = 0; b < corr.size(); ++b) {
      const double d1 = m1.dist[corr[a].first][corr[b].first];
      const double d2 = m2.dist[corr[a].second][corr[b].second];
      g.c = std::max(g.c, 0.5 * std::abs(d1 - d2));
    }
  const int n1 = m1.size(), n2 = m2.size();
  g.cross.assign(n1, std::vector<double>(n2, 0.0));
  for (int x = 0; x < n1; ++x)
    for (int y = 0; y < n2; ++y) {
      double best = 1e300;
      for (auto [z1, z2] : corr) best = std::min(best, m1.dist[x][z1] + m2.dist[z2][y]);
      g.cross[x][y] = best + g.c;
    }
  return g;
}

double glued_prohorov(const UltrametricMatrixSpace& m1, const UltrametricMatrixSpace& m2,
                      const std::vector<std::pair<int, int>>& corr, double tol) {
  Glue g = glue_spaces(m1, m2, corr);
  return prohorov_distance_metric(m1.mass, m2.mass, g.cross, tol).value;
}

// Cheap upper bound used to pre-select quotient matchings: matched atoms sit
// at glue distance c, so transporting the overlaps is feasible just above
// max(c, mass deficiency).
double cheap_matched_bound(const UltrametricMatrixSpace& m1, const UltrametricMatrixSpace& m2,
                           const std::vector<std::pair<int, int>>& corr) {
  Glue g{};
  for (std::size_t a = 0; a < corr.size(); ++a)
    for (std::size_t b = 0; b < corr.size(); ++b) {
      const double d1 = m1.dist[corr[a].first][corr[b].first];
      const double d2 = m2.dist[corr[a].second][corr[b].second];
      g.c = std::max(g.c, 0.5 * std::abs(d1 - d2));
    }
  double total1 = std::accumulate(m1.mass.begin(), m1.mass.end(), 0.0);
  double total2 = std::accumulate(m2.mass.begin(), m2.mass.end(), 0.0);
  double moved = 0.0;
  for (auto [i, j] : corr) moved += std::min(m1.mass[i], m2.mass[j]);
  return std::max(g.c, std::max(total1, total2) - moved);
}

std::map<std::string, int> label_index(const MergeTree& t) {
  std::map<std::string, int> idx;
  const auto& ls = t.leaves();
  for (std::size_t a = 0; a < ls.size(); ++a) {
    auto [it, fresh] = idx.insert({t.node(ls[a]).label, static_cast<int>(a)});
    if (!fresh) throw ValidationError("gp_upper_bound: duplicate leaf label");
  }
  return idx;
}

}  // namespace

GpBound gp_upper_bound(const MergeTree& a, const MergeTree& b, const GpOptions& opts) {
  const UltrametricMatrixSpace ma = to_matrix(a);
  const UltrametricMatrixSpace mb = to_matrix(b);
  const auto ia = label_index(a);
  const auto ib = label_index(b);

  GpBound best;
  best.value = 1e300;
  auto consider = [&](double v, const std::string& name) {
    if (v < best.value) {
      best.value = v;
      best.strategy = name;
    }
  };

  // Shared labels: glue along the identity correspondence.
  if (ia.size() == ib.size()) {
    std::vector<std::pair<int, int>> corr;
    bool all = true;
    for (const auto& [label, i] : ia) {
      auto it = ib.find(label);
      if (it == ib.end()) {
        all = false;
        break;
      }
      corr.push_back({i, it->second});
    }
    if (all) consider(glued_prohorov(ma, mb, corr, opts.tol), "shared-labels");
  }

  // Subspace: one label set inside the other with the same restricted metric.
  auto try_subspace = [&](const UltrametricMatrixSpace& big,
                          const std::map<std::string, int>& big_idx,
                          const UltrametricMatrixSpace& small,
                          const std::map<std::string, int>& small_idx, bool flipped) {
    std::vector<int> pos(small.size(), -1);
    for (const auto& [label, i] : small_idx) {
      auto it = big_idx.find(label);
      if (it == big_idx.end()) return;
      pos[i] = it->second;
    }
    for (int i = 0; i < small.size(); ++i)
      for (int j = 0; j < small.size(); ++j)
        if (small.dist[i][j] != big.dist[pos[i]][pos[j]]) return;
    std::vector<std::vector<double>> cross(big.size(), std::vector<double>(small.size()));
    for (int x = 0; x < big.size(); ++x)
      for (int j = 0; j < small.size(); ++j) cross[x][j] = big.dist[x][pos[j]];
    if (flipped) {
      std::vector<std::vector<double>> t(small.size(), std::vector<double>(big.size()));
      for (int x = 0; x < big.size(); ++x)
        for (int j = 0; j < small.size(); ++j) t[j][x] = cross[x][j];
      consider(prohorov_distance_metric(small.mass, big.mass, t, opts.tol).value, "subspace");
    } else {
      consider(prohorov_distance_metric(big.mass, small.mass, cross, opts.tol).value,
               "subspace");
    }
  };
  if (ib.size() < ia.size()) try_subspace(ma, ia, mb, ib, false);
  if (ia.size() < ib.size()) try_subspace(mb, ib, ma, ia, true);

  // Coarsening: quotient both trees at depth h, match the quotients exactly,
  // pay 2h for the quotient maps.
  std::set<double> grid;
  const double diam = std::max(a.root_height(), b.root_height());
  for (double h : a.merge_heights()) grid.insert(h);
  for (double h : b.merge_heights()) grid.insert(h);
  for (int k = 1; k <= opts.coarsen_grid; ++k)
    grid.insert(diam * static_cast<double>(k) / (opts.coarsen_grid + 1));
  grid.insert(diam);
  for (double h : grid) {
    if (!(h > 0.0)) continue;
    if (2.0 * h >= best.value) continue;
    const MergeTree qa = psi(a, h);
    const MergeTree qb = psi(b, h);
    const int na = qa.num_leaves(), nb = qb.num_leaves();
    if (na != nb || na > opts.perm_cap) continue;
    const UltrametricMatrixSpace qma = to_matrix(qa);
    const UltrametricMatrixSpace qmb = to_matrix(qb);
    std::vector<int> perm(na);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::pair<int, int>> best_corr;
    double best_cheap = 1e300;
    do {
      std::vector<std::pair<int, int>> corr;
      corr.reserve(na);
      for (int i = 0; i < na; ++i) corr.push_back({i, perm[i]});
      const double cb = cheap_matched_bound(qma, qmb, corr);
      if (cb < best_cheap) {
        best_cheap = cb;
        best_corr = std::move(corr);
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (!best_corr.empty()) {
      std::ostringstream name;
      name << "coarsen(h=" << h << ")";
      consider(2.0 * h + glued_prohorov(qma, qmb, best_corr, opts.tol), name.str());
    }
  }

  return best;
}

GwaSurrogate gwa_distance_surrogate(const MergeTree& a, const MergeTree& b,
                                    const GpOptions& opts) {
  GwaSurrogate s;
  const GpBound gp = gp_upper_bound(a, b, opts);
  s.gp = gp.value;
  s.gp_strategy = gp.strategy;
  const AtomicMeasure1D na = nu2(a);
  const AtomicMeasure1D nb = nu2(b);
  s.atom_zero_gap = std::abs(na.mass_at(0.0) - nb.mass_at(0.0));
  s.cdf_skorohod = skorohod_distance(cdf_path(na), cdf_path(nb)).value;
  s.cdf_square_skorohod =
      skorohod_distance(cdf_path(atomic_square(na)), cdf_path(atomic_square(nb))).value;
  s.value = s.gp + s.atom_zero_gap + s.cdf_skorohod + s.cdf_square_skorohod;
  return s;
}

WeakAtomicReport classify_weak_atomic(const std::vector<AtomicMeasure1D>& seq,
                                      const AtomicMeasure1D& target,
                                      const WeakAtomicOptions& opts) {
  WeakAtomicReport report;
  if (seq.empty()) return report;

  // Weak convergence: CDF convergence at continuity points of the target,
  // plus total masses.
  std::vector<double> grid;
  const auto& locs = target.locations();
  for (std::size_t i = 0; i < locs.size(); ++i) {
    const double prev = i == 0 ? 0.0 : locs[i - 1];
    if (locs[i] > prev) grid.push_back(0.5 * (prev + locs[i]));
    const double next = i + 1 < locs.size() ? locs[i + 1] : locs[i] + 2.0;
    grid.push_back(0.5 * (locs[i] + next));
  }
  if (grid.empty()) grid.push_back(1.0);

  const std::size_t n = seq.size();
  const std::size_t tail_start = n > opts.tail_window ? n - opts.tail_window : 0;
  for (std::size_t i = tail_start; i < n; ++i) {
    double defect = std::abs(seq[i].total_mass() - target.total_mass());
    double where = -1.0;
    for (double t : grid) {
      const double d = std::abs(seq[i].mass_upto(t) - target.mass_upto(t));
      if (d > defect) {
        defect = d;
        where = t;
      }
    }
    if (defect > opts.tol) {
      report.grade = MeasureConvergence::kNotWeak;
      std::ostringstream os;
      os << "not weakly convergent: member " << i << " has CDF defect " << defect;
      if (where >= 0.0) os << " at t=" << where;
      report.detail = os.str();
      return report;
    }
  }

  // Weak-atomic: Skorohod convergence of the CDF step paths.
  std::vector<ProfilePath> cdfs;
  cdfs.reserve(n);
  for (const auto& m : seq) cdfs.push_back(cdf_path(m));
  ConvergenceCriteria crit;
  crit.tol = opts.tol;
  crit.tail_window = opts.tail_window;
  const ConvergenceReport sk = converges_to(cdfs, cdf_path(target), crit);
  if (!sk.converged) {
    report.grade = MeasureConvergence::kWeakOnly;
    report.detail = "weakly convergent, not weak-atomic: " + sk.detail;
    return report;
  }
  report.grade = MeasureConvergence::kWeakAtomic;
  report.detail = "weak-atomic convergent";
  return report;
}

}  // namespace ultragen
