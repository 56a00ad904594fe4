#include "ultragen/ranked_profile.hpp"

#include <algorithm>
#include <cmath>

#include "ultragen/errors.hpp"

namespace ultragen {

namespace {

void trim_zeros(std::vector<double>& v) {
  while (!v.empty() && v.back() == 0.0) v.pop_back();
}

}  // namespace

RankedProfile::RankedProfile(std::vector<double> entries) : entries_(std::move(entries)) {
  for (double x : entries_) {
    if (!(x >= 0.0)) throw ValidationError("RankedProfile: negative or NaN entry");
  }
  std::sort(entries_.begin(), entries_.end(), std::greater<double>());
  trim_zeros(entries_);
}

RankedProfile RankedProfile::from_sorted(std::vector<double> entries) {
  RankedProfile p;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!(entries[i] >= 0.0)) throw ValidationError("RankedProfile: negative or NaN entry");
    if (i > 0 && entries[i] > entries[i - 1])
      throw ValidationError("RankedProfile::from_sorted: entries not non-increasing");
  }
  p.entries_ = std::move(entries);
  trim_zeros(p.entries_);
  return p;
}

double RankedProfile::total() const {
  double s = 0.0;
  for (double x : entries_) s += x;
  return s;
}

double RankedProfile::partial_sum(std::size_t m) const {
  double s = 0.0;
  for (std::size_t i = 0; i < m && i < entries_.size(); ++i) s += entries_[i];
  return s;
}

double RankedProfile::sum_of_squares() const {
  double s = 0.0;
  for (double x : entries_) s += x * x;
  return s;
}

double l1_distance(const RankedProfile& p, const RankedProfile& q) {
  const std::size_t n = std::max(p.size(), q.size());
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::abs(p[i] - q[i]);
  return s;
}

double sup_distance(const RankedProfile& p, const RankedProfile& q) {
  const std::size_t n = std::max(p.size(), q.size());
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s = std::max(s, std::abs(p[i] - q[i]));
  return s;
}

}  // namespace ultragen
