#include "ultragen/skorohod.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ultragen/errors.hpp"

namespace ultragen {

TimeChange::TimeChange(std::vector<std::pair<double, double>> anchors)
    : anchors_(std::move(anchors)) {
  anchors_.insert(anchors_.begin(), {0.0, 0.0});
  for (std::size_t i = 1; i < anchors_.size(); ++i) {
    const auto [p0, q0] = anchors_[i - 1];
    const auto [p1, q1] = anchors_[i];
    if (!(p1 > p0) || !(q1 > q0))
      throw ValidationError("TimeChange: anchors must be strictly increasing");
    gamma_ = std::max(gamma_, std::abs(std::log((q1 - q0) / (p1 - p0))));
  }
}

double TimeChange::operator()(double t) const {
  if (t <= 0.0) return 0.0;
  if (t >= anchors_.back().first) return anchors_.back().second + (t - anchors_.back().first);
  auto it = std::upper_bound(anchors_.begin(), anchors_.end(), std::make_pair(t, 1e300));
  const auto [p1, q1] = *it;
  const auto [p0, q0] = *(it - 1);
  return q0 + (t - p0) * (q1 - q0) / (p1 - p0);
}

double TimeChange::inverse(double s) const {
  if (s <= 0.0) return 0.0;
  if (s >= anchors_.back().second) return anchors_.back().first + (s - anchors_.back().second);
  auto it = std::upper_bound(anchors_.begin(), anchors_.end(), std::make_pair(-1e300, s),
                             [](const auto& a, const auto& b) { return a.second < b.second; });
  const auto [p1, q1] = *it;
  const auto [p0, q0] = *(it - 1);
  return p0 + (s - q0) * (p1 - p0) / (q1 - q0);
}

double adaptive_simpson(const std::function<double(double)>& fn, double a, double b,
                        double tol, int max_depth) {
  struct Impl {
    const std::function<double(double)>& f;
    double run(double a, double fa, double b, double fb, double whole, double fm, double tol,
               int depth) {
      const double m = 0.5 * (a + b);
      const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
      const double flm = f(lm), frm = f(rm);
      const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
      const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
      if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
      return run(a, fa, m, fm, left, flm, 0.5 * tol, depth - 1) +
             run(m, fm, b, fb, right, frm, 0.5 * tol, depth - 1);
    }
  };
  if (!(b > a)) return 0.0;
  Impl impl{fn};
  const double fa = fn(a), fb = fn(b), fm = fn(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return impl.run(a, fa, b, fb, whole, fm, tol, max_depth);
}

namespace {

const RankedProfile& eval_path(const ProfilePath& p, double x) {
  if (x <= 0.0) return p.values.front();
  auto it = std::upper_bound(p.jumps.begin(), p.jumps.end(), x);
  return p.values[static_cast<std::size_t>(it - p.jumps.begin())];
}

using Metric = double (*)(const RankedProfile&, const RankedProfile&);

// rho_i(u) = sup_t d(f(t ^ u), g(lambda(t) ^ u)) ^ 1.  For step paths the
// supremum is attained on a finite candidate set of t values.
double rho(const ProfilePath& f, const ProfilePath& g, const TimeChange& lambda, double u,
           Metric d) {
  std::vector<double> cuts{0.0, u, lambda.inverse(u)};
  for (double p : f.jumps) {
    if (p > u) break;
    cuts.push_back(p);
  }
  for (double q : g.jumps) {
    if (q > u) break;
    cuts.push_back(lambda.inverse(q));
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double best = 0.0;
  auto probe = [&](double t) {
    const double x = std::min(t, u), y = std::min(lambda(t), u);
    best = std::max(best, d(eval_path(f, x), eval_path(g, y)));
  };
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    probe(cuts[i]);
    if (i + 1 < cuts.size()) probe(0.5 * (cuts[i] + cuts[i + 1]));
  }
  probe(cuts.back() + 1.0);  // both arguments saturated
  return std::min(best, 1.0);
}

struct WeightIntegrals {
  double heavy;  // int e^{-u-1/u} over the piece
  double light;  // int e^{-u} over the piece
};

// Piecewise-constant rho integrated against both weights.
std::pair<double, double> weighted_integrals(const ProfilePath& f, const ProfilePath& g,
                                             const TimeChange& lambda,
                                             const SkorohodOptions& opts, Metric d1,
                                             Metric d2) {
  std::set<double> cut_set;
  for (double p : f.jumps) {
    cut_set.insert(p);
    cut_set.insert(lambda(p));
  }
  for (double q : g.jumps) {
    cut_set.insert(q);
    cut_set.insert(lambda.inverse(q));
  }
  std::vector<double> cuts(cut_set.begin(), cut_set.end());
  const int depth =
      std::max(8, static_cast<int>(std::ceil(std::log2(static_cast<double>(
                      std::max(opts.quad_points, 8)))))) +
      2;
  double i1 = 0.0, i2 = 0.0;
  double prev = 0.0;
  auto heavy = [](double u) { return std::exp(-u - 1.0 / u); };
  for (double c : cuts) {
    if (c <= prev) continue;
    const double mid = 0.5 * (prev + c);
    const double r1 = rho(f, g, lambda, mid, d1);
    const double r2 = rho(f, g, lambda, mid, d2);
    if (r1 > 0.0) i1 += r1 * adaptive_simpson(heavy, prev, c, opts.quad_tol, depth);
    if (r2 > 0.0) i2 += r2 * (std::exp(-prev) - std::exp(-c));
    prev = c;
  }
  // Tail: rho is constant beyond the last breakpoint.
  const double r1 = rho(f, g, lambda, prev + 1.0, d1);
  const double r2 = rho(f, g, lambda, prev + 1.0, d2);
  if (r1 > 0.0) i1 += r1 * adaptive_simpson(heavy, prev, prev + 60.0, opts.quad_tol, depth);
  if (r2 > 0.0) i2 += r2 * std::exp(-prev);
  return {i1, i2};
}

using Matching = std::vector<std::pair<double, double>>;

// Additive-surrogate DP over monotone partial matchings of the jump sets.
Matching dp_matching(const ProfilePath& f, const ProfilePath& g) {
  const std::size_t a = f.jumps.size(), b = g.jumps.size();
  if (a == 0 || b == 0) return {};
  auto skip_cost = [](const ProfilePath& p, std::size_t i) {
    const double size = std::min(l1_distance(p.values[i], p.values[i + 1]), 1.0);
    return size * std::exp(-p.jumps[i]);
  };
  auto match_cost = [&](std::size_t i, std::size_t j) {
    const double time = std::abs(std::log(g.jumps[j] / f.jumps[i]));
    const double after = std::min(l1_distance(f.values[i + 1], g.values[j + 1]), 1.0);
    const double before = std::min(l1_distance(f.values[i], g.values[j]), 1.0);
    return 0.5 * time + (after + before) * std::exp(-std::min(f.jumps[i], g.jumps[j]));
  };
  std::vector<std::vector<double>> cost(a + 1, std::vector<double>(b + 1, 0.0));
  std::vector<std::vector<int>> move(a + 1, std::vector<int>(b + 1, 0));
  for (std::size_t i = 1; i <= a; ++i) {
    cost[i][0] = cost[i - 1][0] + skip_cost(f, i - 1);
    move[i][0] = 1;
  }
  for (std::size_t j = 1; j <= b; ++j) {
    cost[0][j] = cost[0][j - 1] + skip_cost(g, j - 1);
    move[0][j] = 2;
  }
  for (std::size_t i = 1; i <= a; ++i)
    for (std::size_t j = 1; j <= b; ++j) {
      double best = cost[i - 1][j] + skip_cost(f, i - 1);
      int mv = 1;
      const double cg = cost[i][j - 1] + skip_cost(g, j - 1);
      if (cg < best) {
        best = cg;
        mv = 2;
      }
      const double cm = cost[i - 1][j - 1] + match_cost(i - 1, j - 1);
      if (cm < best) {
        best = cm;
        mv = 3;
      }
      cost[i][j] = best;
      move[i][j] = mv;
    }
  Matching m;
  std::size_t i = a, j = b;
  while (i > 0 || j > 0) {
    switch (move[i][j]) {
      case 1: --i; break;
      case 2: --j; break;
      default:
        m.push_back({f.jumps[i - 1], g.jumps[j - 1]});
        --i;
        --j;
        break;
    }
  }
  std::reverse(m.begin(), m.end());
  return m;
}

Matching swapped(const Matching& m) {
  Matching out;
  out.reserve(m.size());
  for (auto [p, q] : m) out.push_back({q, p});
  return out;
}

}  // namespace

std::pair<double, double> skorohod_objective(const ProfilePath& f, const ProfilePath& g,
                                             const TimeChange& lambda,
                                             const SkorohodOptions& opts) {
  auto [i1, i2] = weighted_integrals(f, g, lambda, opts, &l1_distance, &sup_distance);
  return {std::max(lambda.gamma(), i1), std::max(lambda.gamma(), i2)};
}

SkorohodResult skorohod_distance(const ProfilePath& f, const ProfilePath& g,
                                 const SkorohodOptions& opts) {
  if (f.jumps.size() > opts.max_jumps || g.jumps.size() > opts.max_jumps)
    throw ValidationError("skorohod_distance: jump count exceeds max_jumps");

  std::vector<Matching> candidates;
  candidates.push_back({});  // identity
  if (!f.jumps.empty() && f.jumps.size() == g.jumps.size()) {
    Matching order;
    for (std::size_t i = 0; i < f.jumps.size(); ++i) order.push_back({f.jumps[i], g.jumps[i]});
    candidates.push_back(std::move(order));
  }
  Matching dp_fg = dp_matching(f, g);
  Matching dp_gf = swapped(dp_matching(g, f));
  if (!dp_fg.empty()) candidates.push_back(dp_fg);
  if (!dp_gf.empty() && dp_gf != dp_fg) candidates.push_back(dp_gf);

  SkorohodResult res;
  bool first = true;
  for (const Matching& m : candidates) {
    TimeChange lambda(m);
    auto [t1, t2] = skorohod_objective(f, g, lambda, opts);
    if (first) {
      // Candidate 0 is the identity.
      res.identity_value = t1 + t2;
      res.seq_term = t1;
      res.max_term = t2;
      res.gamma_seq = res.gamma_max = 0.0;
      res.matching_seq = res.matching_max = m;
      first = false;
      continue;
    }
    if (t1 < res.seq_term) {
      res.seq_term = t1;
      res.gamma_seq = lambda.gamma();
      res.matching_seq = m;
    }
    if (t2 < res.max_term) {
      res.max_term = t2;
      res.gamma_max = lambda.gamma();
      res.matching_max = m;
    }
  }
  res.value = res.seq_term + res.max_term;
  return res;
}

}  // namespace ultragen
