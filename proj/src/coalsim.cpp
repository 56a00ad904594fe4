#include "ultragen/coalsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <thread>

#include "ultragen/atomic_measure.hpp"
#include "ultragen/errors.hpp"

namespace ultragen {

PartitionPath::PartitionPath(int n, std::vector<PartitionEvent> events)
    : n_(n), events_(std::move(events)) {
  if (n_ < 1) throw ValidationError("PartitionPath: n must be at least 1");
  for (std::size_t i = 0; i < events_.size(); ++i) {
    const auto& e = events_[i];
    if (!(e.time > 0.0)) throw ValidationError("PartitionPath: event times must be positive");
    if (i > 0 && !(e.time > events_[i - 1].time))
      throw ValidationError("PartitionPath: event times must be strictly increasing");
    if (e.rep_a < 0 || e.rep_b >= n_ || e.rep_a >= e.rep_b)
      throw ValidationError("PartitionPath: bad merge pair");
  }
  if (events_.size() >= static_cast<std::size_t>(n_))
    throw ValidationError("PartitionPath: more events than possible merges");
}

std::vector<std::vector<int>> PartitionPath::blocks_at(double h) const {
  std::vector<int> parent(n_);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : events_) {
    if (e.time > h) break;
    parent[find(std::max(e.rep_a, e.rep_b))] = find(std::min(e.rep_a, e.rep_b));
  }
  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < n_; ++i) groups[find(i)].push_back(i);
  std::vector<std::vector<int>> out;
  out.reserve(groups.size());
  for (auto& [rep, members] : groups) out.push_back(std::move(members));
  return out;
}

int PartitionPath::num_blocks_at(double h) const {
  int count = n_;
  for (const auto& e : events_) {
    if (e.time > h) break;
    --count;
  }
  return count;
}

std::optional<double> PartitionPath::merge_time(int i, int j) const {
  if (i == j) return 0.0;
  std::vector<int> parent(n_);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : events_) {
    parent[find(e.rep_b)] = find(e.rep_a);
    if (find(i) == find(j)) return e.time;
  }
  return std::nullopt;
}

std::vector<std::pair<int, double>> PartitionPath::holding_times() const {
  std::vector<std::pair<int, double>> out;
  double prev = 0.0;
  int k = n_;
  for (const auto& e : events_) {
    out.push_back({k, e.time - prev});
    prev = e.time;
    --k;
  }
  return out;
}

MoranResult simulate_moran(int n, double t, const UltrametricMatrixSpace& r0,
                           std::uint64_t seed, std::uint64_t stream,
                           const std::optional<std::vector<double>>& h_grid) {
  if (n < 1) throw ValidationError("simulate_moran: n must be at least 1");
  if (!(t >= 0.0)) throw ValidationError("simulate_moran: t must be non-negative");
  if (r0.size() != n) throw ValidationError("simulate_moran: r0 size mismatch");
  if (!validate_ultrametric(r0).empty())
    throw ValidationError("simulate_moran: r0 is not ultrametric");

  CounterRng rng(seed, stream);
  std::vector<ArrowEvent> events;

  // Forward pass: superposition of the pairwise rate-1 processes.
  const double total_rate = 0.5 * static_cast<double>(n) * (n - 1);
  double s = 0.0;
  if (n > 1) {
    while (true) {
      s += rng.next_exponential(total_rate);
      if (s > t) break;
      auto [a, b] = rng.next_pair(n);
      const int parent = rng.next_coin() ? a : b;
      events.push_back({s, a, b, parent});
    }
  }

  // Grid of depths at which the ancestor map is recorded.
  std::vector<double> grid;
  if (h_grid) {
    grid = *h_grid;
    std::sort(grid.begin(), grid.end());
  } else {
    grid.push_back(0.0);
    for (const auto& e : events) grid.push_back(e.time);
    grid.push_back(t);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  }

  // Backward pass: replay events in reverse; slot[i] is the slot holding the
  // lineage of time-t individual i.
  std::vector<int> slot(n);
  std::iota(slot.begin(), slot.end(), 0);
  std::vector<std::vector<int>> members(n);
  for (int i = 0; i < n; ++i) members[i] = {i};
  std::vector<std::vector<double>> r(n, std::vector<double>(n, 0.0));

  std::vector<std::vector<int>> snapshots(grid.size());
  std::size_t gi = grid.size();  // next grid index to snapshot, from the top
  // At an event time itself the ancestor map has already jumped, so grid
  // points equal to the event time are recorded after the event is applied.
  auto snapshot_down_to = [&](double limit, bool strict) {
    while (gi > 0 && (strict ? grid[gi - 1] > limit : grid[gi - 1] >= limit)) {
      snapshots[gi - 1] = slot;
      --gi;
    }
  };

  for (std::size_t e = events.size(); e-- > 0;) {
    const ArrowEvent& ev = events[e];
    snapshot_down_to(ev.time, /*strict=*/true);
    const int child = ev.parent == ev.a ? ev.b : ev.a;
    if (!members[child].empty()) {
      for (int x : members[child])
        for (int y : members[ev.parent]) r[x][y] = r[y][x] = t - ev.time;
      for (int x : members[child]) {
        slot[x] = ev.parent;
        members[ev.parent].push_back(x);
      }
      members[child].clear();
    }
  }
  snapshot_down_to(0.0, /*strict=*/false);

  // Distinct time-0 ancestors: distances through r0, offset by t.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (slot[i] != slot[j]) r[i][j] = r[j][i] = t + r0.dist[slot[i]][slot[j]];

  AncestryResult ancestry;
  ancestry.h_grid = grid;
  ancestry.ancestors = std::move(snapshots);
  ancestry.pseudo_metric = r;

  // Quotient zero-distance classes and build the tree with mass 1/n each.
  std::vector<int> cls(n, -1);
  std::vector<int> reps;
  for (int i = 0; i < n; ++i) {
    for (int rep : reps)
      if (r[i][rep] == 0.0) {
        cls[i] = rep;
        break;
      }
    if (cls[i] == -1) {
      cls[i] = i;
      reps.push_back(i);
    }
  }
  std::vector<std::string> labels;
  std::vector<double> mass;
  std::vector<std::vector<double>> qd(reps.size(), std::vector<double>(reps.size(), 0.0));
  for (std::size_t a = 0; a < reps.size(); ++a) {
    labels.push_back("i" + std::to_string(reps[a]));
    double m = 0.0;
    for (int i = 0; i < n; ++i)
      if (cls[i] == reps[a]) m += 1.0 / static_cast<double>(n);
    mass.push_back(m);
    for (std::size_t b = 0; b < reps.size(); ++b) qd[a][b] = r[reps[a]][reps[b]];
  }
  return MoranResult{to_merge_tree(UltrametricMatrixSpace(labels, qd, mass)),
                     std::move(ancestry), std::move(events)};
}

PartitionPath simulate_kingman(int n, double t_max, std::uint64_t seed, std::uint64_t stream) {
  if (n < 1) throw ValidationError("simulate_kingman: n must be at least 1");
  CounterRng rng(seed, stream);
  std::vector<int> reps(n);
  std::iota(reps.begin(), reps.end(), 0);
  std::vector<PartitionEvent> events;
  double time = 0.0;
  for (int k = n; k > 1; --k) {
    const double rate = 0.5 * static_cast<double>(k) * (k - 1);
    time += rng.next_exponential(rate);
    if (time > t_max) break;
    auto [ia, ib] = rng.next_pair(k);
    int ra = reps[ia], rb = reps[ib];
    if (ra > rb) std::swap(ra, rb);
    events.push_back({time, ra, rb});
    reps[ia] = ra;
    reps.erase(reps.begin() + ib);
  }
  return PartitionPath(n, std::move(events));
}

MergeTree tree_from_coalescent(const PartitionPath& p, double t,
                               const UltrametricMatrixSpace& r0) {
  const int n = p.n();
  if (r0.size() != n) throw ValidationError("tree_from_coalescent: r0 size mismatch");
  // Block representative at time t- for every individual.
  std::vector<int> rep(n);
  std::iota(rep.begin(), rep.end(), 0);
  {
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const auto& e : p.events()) {
      if (!(e.time < t)) break;
      parent[find(e.rep_b)] = find(e.rep_a);
    }
    for (int i = 0; i < n; ++i) rep[i] = find(i);
  }

  std::vector<std::vector<double>> r(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double d;
      if (rep[i] == rep[j]) {
        d = *p.merge_time(i, j);
      } else {
        d = r0.dist[rep[i]][rep[j]];
      }
      r[i][j] = r[j][i] = d;
    }

  // Quotient (distinct individuals are a.s. at positive distance) and build.
  std::vector<int> cls(n, -1);
  std::vector<int> reps;
  for (int i = 0; i < n; ++i) {
    for (int q : reps)
      if (r[i][q] == 0.0) {
        cls[i] = q;
        break;
      }
    if (cls[i] == -1) {
      cls[i] = i;
      reps.push_back(i);
    }
  }
  std::vector<std::string> labels;
  std::vector<double> mass;
  std::vector<std::vector<double>> qd(reps.size(), std::vector<double>(reps.size(), 0.0));
  for (std::size_t a = 0; a < reps.size(); ++a) {
    labels.push_back("i" + std::to_string(reps[a]));
    double m = 0.0;
    for (int i = 0; i < n; ++i)
      if (cls[i] == reps[a]) m += 1.0 / static_cast<double>(n);
    mass.push_back(m);
    for (std::size_t b = 0; b < reps.size(); ++b) qd[a][b] = r[reps[a]][reps[b]];
  }
  return to_merge_tree(UltrametricMatrixSpace(labels, qd, mass));
}

PartitionPath restrict_coalescent(const PartitionPath& p, int n) {
  if (n < 1 || n > p.n()) throw ValidationError("restrict_coalescent: bad n");
  // Track, per full block, its members below n (as a sorted set represented
  // by the minimum only; the minimum is all the naming needs).
  std::vector<int> parent(p.n());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<int> restricted_min(p.n(), -1);  // per full-block root
  for (int i = 0; i < p.n(); ++i) restricted_min[i] = i < n ? i : -1;
  std::vector<PartitionEvent> events;
  for (const auto& e : p.events()) {
    const int ra = find(e.rep_a), rb = find(e.rep_b);
    const int ma = restricted_min[ra], mb = restricted_min[rb];
    parent[rb] = ra;
    restricted_min[ra] = ma == -1 ? mb : (mb == -1 ? ma : std::min(ma, mb));
    if (ma != -1 && mb != -1)
      events.push_back({e.time, std::min(ma, mb), std::max(ma, mb)});
  }
  return PartitionPath(n, std::move(events));
}

UltrametricMatrixSpace caterpillar_metric(int n, double base) {
  if (n < 1) throw ValidationError("caterpillar_metric: n must be at least 1");
  std::vector<std::string> labels(n);
  std::vector<double> mass(n, 1.0);
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    labels[i] = "i" + std::to_string(i);
    for (int j = 0; j < n; ++j)
      if (i != j) d[i][j] = base * (1.0 + static_cast<double>(std::max(i, j)) / (n + 1.0));
  }
  return UltrametricMatrixSpace(labels, d, mass);
}

RankedProfile ranked_block_frequencies(int k, CounterRng& rng) {
  if (k < 1) throw ValidationError("ranked_block_frequencies: k must be at least 1");
  std::vector<double> x(k);
  double sum = 0.0;
  for (int i = 0; i < k; ++i) {
    x[i] = rng.next_exponential(1.0);
    sum += x[i];
  }
  for (double& v : x) v /= sum;
  return RankedProfile(std::move(x));
}

double largest_block_mean(int k) {
  if (k < 1) throw ValidationError("largest_block_mean: k must be at least 1");
  double h = 0.0;
  for (int l = 1; l <= k; ++l) h += 1.0 / static_cast<double>(l);
  return h / static_cast<double>(k);
}

ConvergenceExperimentReport convergence_experiment(const ConvergenceExperimentConfig& cfg) {
  if (cfg.n_list.empty()) throw ValidationError("convergence_experiment: empty n_list");
  if (cfg.reps < 1) throw ValidationError("convergence_experiment: reps must be positive");
  ConvergenceExperimentReport report;
  report.config = cfg;
  const int n_max = *std::max_element(cfg.n_list.begin(), cfg.n_list.end());
  const std::size_t nn = cfg.n_list.size(), nh = cfg.h_grid.size();

  // Per replication: family profiles per (n, h).
  std::vector<std::vector<std::vector<RankedProfile>>> profiles(
      cfg.reps, std::vector<std::vector<RankedProfile>>(nn, std::vector<RankedProfile>(nh)));

  auto run_rep = [&](int rep) {
    const PartitionPath full =
        simulate_kingman(n_max, cfg.t, cfg.seed, static_cast<std::uint64_t>(rep));
    for (std::size_t a = 0; a < nn; ++a) {
      const int n = cfg.n_list[a];
      const PartitionPath restricted = restrict_coalescent(full, n);
      const MergeTree tree = tree_from_coalescent(
          restricted, cfg.t, caterpillar_metric(n, std::max(cfg.t, 1.0) * cfg.r0_distance_scale));
      for (std::size_t b = 0; b < nh; ++b)
        profiles[rep][a][b] = family_sizes(tree, cfg.h_grid[b]);
    }
  };

  int jobs = cfg.jobs > 0 ? cfg.jobs : static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::max(1, std::min(jobs, cfg.reps));
  if (jobs == 1) {
    for (int rep = 0; rep < cfg.reps; ++rep) run_rep(rep);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w)
      pool.emplace_back([&, w] {
        for (int rep = w; rep < cfg.reps; rep += jobs) run_rep(rep);
      });
    for (auto& th : pool) th.join();
  }

  report.largest_family_mean.assign(nn, std::vector<double>(nh, 0.0));
  report.nu2_upto_mean.assign(nn, std::vector<double>(nh, 0.0));
  report.coupled_l1_gap.assign(nn > 1 ? nn - 1 : 0, std::vector<double>(nh, 0.0));
  for (int rep = 0; rep < cfg.reps; ++rep)
    for (std::size_t a = 0; a < nn; ++a)
      for (std::size_t b = 0; b < nh; ++b) {
        const RankedProfile& f = profiles[rep][a][b];
        for (std::size_t k = 0; k < f.size(); ++k)
          report.rows.push_back({cfg.n_list[a], rep, cfg.h_grid[b], static_cast<int>(k),
                                 f.entries()[k]});
        report.largest_family_mean[a][b] += f[0];
        report.nu2_upto_mean[a][b] += f.sum_of_squares();
        if (a + 1 < nn)
          report.coupled_l1_gap[a][b] += l1_distance(f, profiles[rep][a + 1][b]);
      }
  const double inv = 1.0 / static_cast<double>(cfg.reps);
  for (std::size_t a = 0; a < nn; ++a)
    for (std::size_t b = 0; b < nh; ++b) {
      report.largest_family_mean[a][b] *= inv;
      report.nu2_upto_mean[a][b] *= inv;
      if (a + 1 < nn) report.coupled_l1_gap[a][b] *= inv;
    }
  return report;
}

}  // namespace ultragen
