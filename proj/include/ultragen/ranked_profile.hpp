#pragma once

#include <cstddef>
#include <vector>

namespace ultragen {

// Element of S-down: a finite non-increasing vector of non-negative masses.
// Trailing zeros are trimmed, so two profiles are equal as sequences iff
// their entry vectors compare equal.
class RankedProfile {
 public:
  RankedProfile() = default;

  // Sorts into non-increasing order and trims trailing zeros.
  // Rejects negative entries.
  explicit RankedProfile(std::vector<double> entries);

  // Entries are already sorted non-increasing; only trims zeros (no sort).
  static RankedProfile from_sorted(std::vector<double> entries);

  const std::vector<double>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  double operator[](std::size_t i) const {
    return i < entries_.size() ? entries_[i] : 0.0;
  }
  double total() const;
  // Sum of the first m entries.
  double partial_sum(std::size_t m) const;
  double sum_of_squares() const;

  bool operator==(const RankedProfile& o) const { return entries_ == o.entries_; }

 private:
  std::vector<double> entries_;
};

// l1 distance after zero-padding to common length.
double l1_distance(const RankedProfile& p, const RankedProfile& q);
// Entrywise max distance after zero-padding.
double sup_distance(const RankedProfile& p, const RankedProfile& q);

}  // namespace ultragen
