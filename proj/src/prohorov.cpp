#include "ultragen/prohorov.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "ultragen/errors.hpp"

namespace ultragen {

namespace {

// Max flow on a tiny dense graph (Edmonds-Karp with double capacities).
class MaxFlow {
 public:
  explicit MaxFlow(int n) : n_(n), cap_(n, std::vector<double>(n, 0.0)) {}

  void add_edge(int a, int b, double c) { cap_[a][b] += c; }

  double run(int s, int t) {
    double flow = 0.0;
    while (true) {
      std::vector<int> prev(n_, -1);
      prev[s] = s;
      std::queue<int> q;
      q.push(s);
      while (!q.empty() && prev[t] == -1) {
        int u = q.front();
        q.pop();
        for (int v = 0; v < n_; ++v) {
          if (prev[v] == -1 && cap_[u][v] > kEps) {
            prev[v] = u;
            q.push(v);
          }
        }
      }
      if (prev[t] == -1) return flow;
      double push = 1e300;
      for (int v = t; v != s; v = prev[v]) push = std::min(push, cap_[prev[v]][v]);
      for (int v = t; v != s; v = prev[v]) {
        cap_[prev[v]][v] -= push;
        cap_[v][prev[v]] += push;
      }
      flow += push;
    }
  }

 private:
  static constexpr double kEps = 1e-13;
  int n_;
  std::vector<std::vector<double>> cap_;
};

}  // namespace

double transport_capacity(const std::vector<double>& mass_a, const std::vector<double>& mass_b,
                          const std::vector<std::vector<double>>& dist, double eps) {
  const int na = static_cast<int>(mass_a.size());
  const int nb = static_cast<int>(mass_b.size());
  // Nodes: 0 = source, 1..na = atoms of a, na+1..na+nb = atoms of b, last = sink.
  MaxFlow mf(na + nb + 2);
  const int source = 0, sink = na + nb + 1;
  double big = 0.0;
  for (double m : mass_a) big += m;
  for (int i = 0; i < na; ++i) mf.add_edge(source, 1 + i, mass_a[i]);
  for (int j = 0; j < nb; ++j) mf.add_edge(1 + na + j, sink, mass_b[j]);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j)
      if (dist[i][j] < eps) mf.add_edge(1 + i, 1 + na + j, big + 1.0);
  return mf.run(source, sink);
}

namespace {

ProhorovResult bisect(const std::vector<double>& mass_a, const std::vector<double>& mass_b,
                      const std::vector<std::vector<double>>& dist, double tol) {
  if (!(tol > 0.0)) throw ValidationError("prohorov_distance: tol must be positive");
  double ta = 0.0, tb = 0.0;
  for (double m : mass_a) ta += m;
  for (double m : mass_b) tb += m;
  const double need = std::max(ta, tb);

  auto feasible = [&](double eps) {
    if (eps <= 0.0) return need == 0.0;
    return need - transport_capacity(mass_a, mass_b, dist, eps) <= eps;
  };

  ProhorovResult res;
  if (need == 0.0) return res;
  double hi = std::max(need, tol);
  if (!feasible(hi)) hi = 2.0 * hi + 1.0;  // need <= eps is always feasible
  double lo = 0.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid))
      hi = mid;
    else
      lo = mid;
    ++res.iterations;
    if (res.iterations > 200) break;
  }
  res.value = hi;
  res.lower = lo;
  return res;
}

}  // namespace

ProhorovResult prohorov_distance_metric(const std::vector<double>& mass_a,
                                        const std::vector<double>& mass_b,
                                        const std::vector<std::vector<double>>& dist,
                                        double tol) {
  if (dist.size() != mass_a.size())
    throw ValidationError("prohorov_distance_metric: dist rows must match mass_a");
  for (const auto& row : dist)
    if (row.size() != mass_b.size())
      throw ValidationError("prohorov_distance_metric: dist cols must match mass_b");
  return bisect(mass_a, mass_b, dist, tol);
}

ProhorovResult prohorov_distance(const AtomicMeasure1D& a, const AtomicMeasure1D& b,
                                 double tol) {
  if (a == b) return {};
  std::vector<std::vector<double>> dist(a.size(), std::vector<double>(b.size(), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      dist[i][j] = std::abs(a.locations()[i] - b.locations()[j]);
  return bisect(a.masses(), b.masses(), dist, tol);
}

}  // namespace ultragen
