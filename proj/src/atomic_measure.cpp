#include "ultragen/atomic_measure.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ultragen/errors.hpp"
#include "ultragen/matrix_space.hpp"
#include "ultragen/rng.hpp"

namespace ultragen {

AtomicMeasure1D AtomicMeasure1D::from_atoms(std::vector<std::pair<double, double>> atoms) {
  std::map<double, double> acc;
  for (auto [loc, mass] : atoms) {
    if (!(loc >= 0.0)) throw ValidationError("AtomicMeasure1D: negative or NaN location");
    if (!(mass >= 0.0)) throw ValidationError("AtomicMeasure1D: negative or NaN mass");
    if (mass > 0.0) acc[loc] += mass;
  }
  AtomicMeasure1D m;
  for (auto& [loc, mass] : acc) {
    m.locs_.push_back(loc);
    m.masses_.push_back(mass);
  }
  return m;
}

double AtomicMeasure1D::total_mass() const {
  double s = 0.0;
  for (double x : masses_) s += x;
  return s;
}

double AtomicMeasure1D::mass_at(double loc) const {
  auto it = std::lower_bound(locs_.begin(), locs_.end(), loc);
  if (it == locs_.end() || *it != loc) return 0.0;
  return masses_[static_cast<std::size_t>(it - locs_.begin())];
}

double AtomicMeasure1D::mass_upto(double h) const {
  double s = 0.0;
  for (std::size_t i = 0; i < locs_.size() && locs_[i] <= h; ++i) s += masses_[i];
  return s;
}

double AtomicMeasure1D::mass_above(double h) const {
  double s = 0.0;
  for (std::size_t i = locs_.size(); i-- > 0 && locs_[i] > h;) s += masses_[i];
  return s;
}

AtomicMeasure1D nu2(const MergeTree& t) {
  std::vector<std::pair<double, double>> atoms;
  double at_zero = 0.0;
  for (int i : t.leaves()) at_zero += t.node(i).mass * t.node(i).mass;
  atoms.push_back({0.0, at_zero});
  for (const auto& n : t.nodes()) {
    if (n.children.empty()) continue;
    // Ordered leaf pairs whose LCA is this node: leaves in distinct children.
    double w = 0.0;
    for (std::size_t a = 0; a < n.children.size(); ++a)
      for (std::size_t b = a + 1; b < n.children.size(); ++b)
        w += 2.0 * t.node(n.children[a]).mass * t.node(n.children[b]).mass;
    atoms.push_back({n.height, w});
  }
  return AtomicMeasure1D::from_atoms(std::move(atoms));
}

AtomicMeasure1D atomic_square(const AtomicMeasure1D& m) {
  std::vector<std::pair<double, double>> atoms;
  atoms.reserve(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    atoms.push_back({m.locations()[i], m.masses()[i] * m.masses()[i]});
  return AtomicMeasure1D::from_atoms(std::move(atoms));
}

double nu2_tail(const MergeTree& t, double H) {
  const RankedProfile f = family_sizes(t, H);
  const double s = f.total();
  return s * s - f.sum_of_squares();
}

double modulus_of_mass(const MergeTree& t, double delta) {
  if (!(delta >= 0.0)) throw ValidationError("modulus_of_mass: delta must be non-negative");
  // For eps in (h_k, h_{k+1}] the open eps-ball partition is the closed
  // partition at h_k, so the small-mass total G_k is constant there; the
  // modulus is the first feasible max(h_k, G_k).
  std::vector<double> levels{0.0};
  for (double h : t.merge_heights()) levels.push_back(h);
  levels.push_back(levels.back() + 1.0);  // one open interval beyond the root
  for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
    double g = 0.0;
    if (levels[k] == 0.0) {
      for (int i : t.leaves())
        if (t.node(i).mass <= delta) g += t.node(i).mass;
    } else {
      const BallPartition part = ball_partition(t, levels[k]);
      for (double bm : part.block_masses)
        if (bm <= delta) g += bm;
    }
    const bool last = k + 2 == levels.size();
    if (g <= levels[k + 1] || last) return std::max(levels[k], g);
  }
  return 0.0;  // unreachable
}

ProfilePath cdf_path(const AtomicMeasure1D& m) {
  ProfilePath p;
  double acc = m.mass_at(0.0);
  p.values.push_back(RankedProfile({acc}));
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m.locations()[i] == 0.0) continue;
    acc += m.masses()[i];
    p.jumps.push_back(m.locations()[i]);
    p.values.push_back(RankedProfile({acc}));
  }
  p.zero_value = p.values.front();
  return p;
}

double DistanceSample::total_weight() const {
  double s = 0.0;
  for (const auto& [v, w] : entries) s += w;
  return s;
}

double DistanceSample::mean_coordinate(std::size_t idx) const {
  double s = 0.0, tw = 0.0;
  for (const auto& [v, w] : entries) {
    s += w * v.at(idx);
    tw += w;
  }
  return s / tw;
}

DistanceSample nu_k(const MergeTree& t, int k, NuKMode mode, std::size_t cap,
                    std::uint64_t seed, std::size_t mc_samples) {
  if (k < 2) throw ValidationError("nu_k: order k must be at least 2");
  const int n = t.num_leaves();
  double tuples = std::pow(static_cast<double>(n), k);
  const bool fits = tuples <= static_cast<double>(cap);
  if (mode == NuKMode::kExact && !fits)
    throw ValidationError("nu_k: n^k exceeds cap in exact mode");
  const bool exact = mode == NuKMode::kExact || (mode == NuKMode::kAuto && fits);

  const UltrametricMatrixSpace mat = to_matrix(t);
  DistanceSample out;
  out.k = k;
  out.exact = exact;
  out.seed = seed;

  auto dist_vector = [&](const std::vector<int>& idx) {
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(k) * (k - 1) / 2);
    for (int a = 0; a < k; ++a)
      for (int b = a + 1; b < k; ++b) v.push_back(mat.dist[idx[a]][idx[b]]);
    return v;
  };

  if (exact) {
    std::map<std::vector<double>, double> grouped;
    std::vector<int> idx(k, 0);
    while (true) {
      double w = 1.0;
      for (int a = 0; a < k; ++a) w *= mat.mass[idx[a]];
      grouped[dist_vector(idx)] += w;
      int pos = k - 1;
      while (pos >= 0 && ++idx[pos] == n) idx[pos--] = 0;
      if (pos < 0) break;
    }
    for (auto& [v, w] : grouped) out.entries.push_back({v, w});
    return out;
  }

  // Monte Carlo: sample leaves proportional to mass; each draw carries weight
  // (total mass)^k / samples so weights add up to the exact total.
  out.sample_count = mc_samples;
  std::vector<double> cum(n);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += mat.mass[i];
    cum[i] = acc;
  }
  const double per_draw = std::pow(acc, k) / static_cast<double>(mc_samples);
  CounterRng rng(seed, 0);
  out.entries.reserve(mc_samples);
  std::vector<int> idx(k);
  for (std::size_t s = 0; s < mc_samples; ++s) {
    for (int a = 0; a < k; ++a) {
      const double u = rng.next_unit() * acc;
      idx[a] = static_cast<int>(std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
      if (idx[a] >= n) idx[a] = n - 1;
    }
    out.entries.push_back({dist_vector(idx), per_draw});
  }
  return out;
}

}  // namespace ultragen
