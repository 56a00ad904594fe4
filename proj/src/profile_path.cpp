#include "ultragen/profile_path.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ultragen/errors.hpp"

namespace ultragen {

void ProfilePath::validate() const {
  if (values.size() != jumps.size() + 1)
    throw ValidationError("ProfilePath: values.size() must be jumps.size() + 1");
  for (std::size_t i = 0; i < jumps.size(); ++i) {
    if (!(jumps[i] > 0.0)) throw ValidationError("ProfilePath: jumps must be positive");
    if (i > 0 && !(jumps[i] > jumps[i - 1]))
      throw ValidationError("ProfilePath: jumps must be strictly increasing");
    if (values[i] == values[i + 1])
      throw ValidationError("ProfilePath: consecutive values must differ");
  }
}

ProfilePath decomposition_path(const MergeTree& t) {
  ProfilePath p;
  p.jumps = t.merge_heights();
  p.values.reserve(p.jumps.size() + 1);
  p.values.push_back(t.leaf_profile());
  for (double h : p.jumps) p.values.push_back(family_sizes(t, h));
  p.zero_value = t.leaf_profile();
  return p;
}

const RankedProfile& evaluate(const ProfilePath& p, double h) {
  if (!(h > 0.0)) throw ValidationError("evaluate: h must be positive");
  // Last jump index with jumps[k] <= h, value index k+1; else values[0].
  auto it = std::upper_bound(p.jumps.begin(), p.jumps.end(), h);
  return p.values[static_cast<std::size_t>(it - p.jumps.begin())];
}

const RankedProfile& evaluate_left(const ProfilePath& p, double h) {
  if (!(h > 0.0)) throw ValidationError("evaluate_left: h must be positive");
  auto it = std::lower_bound(p.jumps.begin(), p.jumps.end(), h);
  return p.values[static_cast<std::size_t>(it - p.jumps.begin())];
}

namespace {

std::string to_string(const RankedProfile& p) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? "," : "") << p.entries()[i];
  os << ")";
  return os.str();
}

// Candidate evaluation times for member path f within [center-w, center+w]:
// the center itself, nearby jumps, and nearby plateau midpoints.
std::vector<double> candidate_times(const ProfilePath& f, double center, double w) {
  std::vector<double> cand;
  if (center > 0.0) cand.push_back(center);
  const double lo = std::max(center - w, 0.0), hi = center + w;
  std::vector<double> cuts{lo, hi};
  for (double q : f.jumps)
    if (q >= lo && q <= hi) cuts.push_back(q);
  std::sort(cuts.begin(), cuts.end());
  for (double q : cuts)
    if (q > 0.0) cand.push_back(q);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double m = 0.5 * (cuts[i] + cuts[i + 1]);
    if (m > 0.0) cand.push_back(m);
  }
  return cand;
}

double defect_at(const ProfilePath& f, double s, const RankedProfile& right,
                 const RankedProfile& left) {
  const RankedProfile& v = evaluate(f, s);
  return std::min(l1_distance(v, right), l1_distance(v, left));
}

struct ProbeOutcome {
  bool violated = false;
  char condition = ' ';
  std::string detail;
};

ProbeOutcome check_probe(const std::vector<ProfilePath>& seq, const ProfilePath& target,
                         const ConvergenceProbe& probe, const ConvergenceCriteria& c) {
  ProbeOutcome out;
  const std::size_t n = seq.size();
  const std::size_t tail_start = n > c.tail_window ? n - c.tail_window : 0;
  const double t = probe.t;

  if (t == 0.0) {
    if (!target.zero_value) return out;
    for (std::size_t i = tail_start; i < n; ++i) {
      double ti = probe.times[i];
      const RankedProfile& v = ti > 0.0 ? evaluate(seq[i], ti)
                                        : seq[i].zero_value.value_or(evaluate(seq[i], 1e-300));
      double d = sup_distance(v, *target.zero_value);
      if (d > c.tol) {
        out.violated = true;
        out.condition = 'a';
        std::ostringstream os;
        os << "condition (a) at t=0 [" << probe.origin << "]: member " << i << " at t_n=" << ti
           << " has value " << to_string(v) << " with sup-distance " << d << " from f(0)";
        out.detail = os.str();
        return out;
      }
    }
    return out;
  }

  const RankedProfile& right = evaluate(target, t);
  const RankedProfile& left = evaluate_left(target, t);

  // (a): f_n(t_n) must approach f(t) or f(t-).
  for (std::size_t i = tail_start; i < n; ++i) {
    double ti = probe.times[i];
    double d = defect_at(seq[i], ti, right, left);
    if (d > c.tol) {
      out.violated = true;
      out.condition = 'a';
      std::ostringstream os;
      os << "condition (a) at t=" << t << " [" << probe.origin << "]: member " << i
         << " at t_n=" << ti << " has value " << to_string(evaluate(seq[i], ti))
         << " not in {" << to_string(right) << ", " << to_string(left) << "} (defect " << d
         << ")";
      out.detail = os.str();
      return out;
    }
  }

  // (b)/(c): one-sided stability. Window shrinks with the member index and
  // stays clear of neighbouring target jumps.
  double g0 = t * 0.25;
  for (double q : target.jumps)
    if (q != t) g0 = std::min(g0, 0.4 * std::abs(q - t));
  for (std::size_t i = tail_start; i < n; ++i) {
    double ti = probe.times[i];
    double w = std::max(std::abs(ti - t), g0) / static_cast<double>(i + 1);
    const RankedProfile& vi = evaluate(seq[i], ti);
    if (l1_distance(vi, right) <= c.tol) {
      // (b): s_n >= t_n, s_n -> t.
      for (double s : candidate_times(seq[i], ti, w)) {
        if (s < ti) continue;
        double d = l1_distance(evaluate(seq[i], s), right);
        if (d > c.tol) {
          out.violated = true;
          out.condition = 'b';
          std::ostringstream os;
          os << "condition (b) at t=" << t << " [" << probe.origin << "]: member " << i
             << ", s_n=" << s << " has value " << to_string(evaluate(seq[i], s))
             << " != f(t)=" << to_string(right);
          out.detail = os.str();
          return out;
        }
      }
    }
    if (l1_distance(vi, left) <= c.tol) {
      // (c): s_n <= t_n, s_n -> t.
      for (double s : candidate_times(seq[i], ti, w)) {
        if (s > ti || s <= 0.0) continue;
        double d = l1_distance(evaluate(seq[i], s), left);
        if (d > c.tol) {
          out.violated = true;
          out.condition = 'c';
          std::ostringstream os;
          os << "condition (c) at t=" << t << " [" << probe.origin << "]: member " << i
             << ", s_n=" << s << " has value " << to_string(evaluate(seq[i], s))
             << " != f(t-)=" << to_string(left);
          out.detail = os.str();
          return out;
        }
      }
    }
  }
  return out;
}

// Default probes: for every target jump (and plateau midpoint), follow both
// the constant sequence and the adversarial nearby feature of each member.
std::vector<ConvergenceProbe> auto_probes(const std::vector<ProfilePath>& seq,
                                          const ProfilePath& target) {
  std::vector<ConvergenceProbe> probes;
  const std::size_t n = seq.size();

  std::vector<double> anchors = target.jumps;
  for (std::size_t i = 0; i + 1 < target.jumps.size(); ++i)
    anchors.push_back(0.5 * (target.jumps[i] + target.jumps[i + 1]));
  if (!target.jumps.empty()) {
    anchors.push_back(0.5 * target.jumps.front());
    anchors.push_back(1.5 * target.jumps.back());
  } else {
    anchors.push_back(1.0);
  }

  for (double t : anchors) {
    // Half distance to the nearest other anchor bounds the probe window.
    double g0 = t * 0.5;
    for (double q : target.jumps)
      if (q != t) g0 = std::min(g0, 0.5 * std::abs(q - t));

    ConvergenceProbe constant;
    constant.t = t;
    constant.times.assign(n, t);
    constant.origin = "constant";
    probes.push_back(std::move(constant));

    const RankedProfile& right = evaluate(target, t);
    const RankedProfile& left = evaluate_left(target, t);
    ConvergenceProbe adv;
    adv.t = t;
    adv.origin = "adversarial";
    for (std::size_t i = 0; i < n; ++i) {
      double w = g0 / static_cast<double>(i + 1);
      double best = t, best_defect = -1.0;
      for (double s : candidate_times(seq[i], t, w)) {
        double d = defect_at(seq[i], s, right, left);
        if (d > best_defect) {
          best_defect = d;
          best = s;
        }
      }
      adv.times.push_back(best);
    }
    probes.push_back(std::move(adv));
  }

  if (target.zero_value) {
    ConvergenceProbe zero;
    zero.t = 0.0;
    zero.origin = "zero";
    for (std::size_t i = 0; i < n; ++i) zero.times.push_back(0.0);
    probes.push_back(std::move(zero));
  }
  return probes;
}

}  // namespace

ConvergenceReport converges_to(const std::vector<ProfilePath>& path_seq,
                               const ProfilePath& target, const ConvergenceCriteria& criteria,
                               const std::vector<ConvergenceProbe>& probes) {
  ConvergenceReport report;
  if (path_seq.empty()) return report;
  std::vector<ConvergenceProbe> all = probes;
  if (criteria.auto_probes) {
    auto defaults = auto_probes(path_seq, target);
    all.insert(all.end(), defaults.begin(), defaults.end());
  }
  for (const auto& probe : all) {
    if (probe.times.size() != path_seq.size())
      throw ValidationError("converges_to: probe time sequence length mismatch");
    ProbeOutcome o = check_probe(path_seq, target, probe, criteria);
    if (o.violated) {
      report.converged = false;
      report.condition = o.condition;
      report.detail = o.detail;
      return report;
    }
  }
  return report;
}

}  // namespace ultragen
