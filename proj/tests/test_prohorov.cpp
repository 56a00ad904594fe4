#include "ultragen/prohorov.hpp"

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "ultragen/errors.hpp"
#include "ultragen/rng.hpp"

using namespace ultragen;

namespace {

AtomicMeasure1D meas(std::vector<std::pair<double, double>> atoms) {
  return AtomicMeasure1D::from_atoms(std::move(atoms));
}

// Brute-force oracle: the Prohorov infimum over the finite candidate set of
// pairwise gaps and subset deficits, checking the defining closed-set
// condition on all atom-generated sets.
double prohorov_oracle(const AtomicMeasure1D& m1, const AtomicMeasure1D& m2) {
  auto condition_holds = [&](const AtomicMeasure1D& a, const AtomicMeasure1D& b, double eps) {
    const std::size_t n = a.size();
    for (std::size_t mask = 1; mask < (1u << n); ++mask) {
      double ma = 0.0, mb = 0.0;
      for (std::size_t j = 0; j < b.size(); ++j) {
        bool in_enlargement = false;
        for (std::size_t i = 0; i < n; ++i)
          if ((mask & (1u << i)) &&
              std::abs(a.locations()[i] - b.locations()[j]) < eps)
            in_enlargement = true;
        if (in_enlargement) mb += b.masses()[j];
      }
      for (std::size_t i = 0; i < n; ++i)
        if (mask & (1u << i)) ma += a.masses()[i];
      if (ma > mb + eps) return false;
    }
    return true;
  };
  auto feasible = [&](double eps) {
    return condition_holds(m1, m2, eps) && condition_holds(m2, m1, eps);
  };
  // Candidates: every pairwise gap and, per gap level, the worst deficits,
  // each from above (open enlargement, so the infimum may be one-sided).
  std::vector<double> gaps{0.0};
  for (double x : m1.locations())
    for (double y : m2.locations()) gaps.push_back(std::abs(x - y));
  std::sort(gaps.begin(), gaps.end());
  gaps.erase(std::unique(gaps.begin(), gaps.end()), gaps.end());
  std::vector<double> cands;
  for (double g : gaps) {
    cands.push_back(g);
    cands.push_back(g * (1.0 + 1e-12) + 1e-15);
    // Worst deficit just above this gap level: smallest feasible eps within
    // the level, found by scanning subset deficits at a representative eps.
    const double probe = g * (1.0 + 1e-12) + 1e-15;
    double deficit = 0.0;
    const std::size_t n1 = m1.size(), n2 = m2.size();
    for (std::size_t mask = 1; mask < (1u << n1); ++mask) {
      double ma = 0.0, mb = 0.0;
      for (std::size_t i = 0; i < n1; ++i)
        if (mask & (1u << i)) ma += m1.masses()[i];
      for (std::size_t j = 0; j < n2; ++j) {
        bool in = false;
        for (std::size_t i = 0; i < n1; ++i)
          if ((mask & (1u << i)) &&
              std::abs(m1.locations()[i] - m2.locations()[j]) < probe)
            in = true;
        if (in) mb += m2.masses()[j];
      }
      deficit = std::max(deficit, ma - mb);
    }
    for (std::size_t mask = 1; mask < (1u << n2); ++mask) {
      double ma = 0.0, mb = 0.0;
      for (std::size_t j = 0; j < n2; ++j)
        if (mask & (1u << j)) mb += m2.masses()[j];
      for (std::size_t i = 0; i < n1; ++i) {
        bool in = false;
        for (std::size_t j = 0; j < n2; ++j)
          if ((mask & (1u << j)) &&
              std::abs(m1.locations()[i] - m2.locations()[j]) < probe)
            in = true;
        if (in) ma += m1.masses()[i];
      }
      deficit = std::max(deficit, mb - ma);
    }
    cands.push_back(std::max(g, deficit));
    cands.push_back(std::max(g, deficit) * (1.0 + 1e-12) + 1e-15);
  }
  double best = 1e300;
  for (double eps : cands)
    if (eps > 0.0 && feasible(eps)) best = std::min(best, eps);
  return best;
}

AtomicMeasure1D random_measure(CounterRng& rng, int max_atoms) {
  const int k = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_atoms)));
  std::vector<std::pair<double, double>> atoms;
  for (int i = 0; i < k; ++i)
    atoms.push_back({0.1 * static_cast<double>(rng.next_below(40)),
                     0.05 + 1.2 * rng.next_unit()});
  return AtomicMeasure1D::from_atoms(std::move(atoms));
}

}  // namespace

TEST_SUITE_BEGIN("prohorov");

TEST_CASE("point examples") {
  SUBCASE("identical measures") {
    AtomicMeasure1D m = meas({{0.0, 1.0}, {2.0, 0.5}});
    CHECK(prohorov_distance(m, m, 1e-9).value == 0.0);
  }
  SUBCASE("a*d0 vs a*dx: min(a, x)") {
    for (auto [a, x] : std::vector<std::pair<double, double>>{{1.0, 0.25}, {0.25, 1.0}, {2.0, 3.0}}) {
      const double got = prohorov_distance(meas({{0.0, a}}), meas({{x, a}}), 1e-9).value;
      CHECK(got == doctest::Approx(std::min(a, x)).epsilon(1e-6));
    }
  }
  SUBCASE("d0 vs (1+c)*d0: mass defect c") {
    const double got = prohorov_distance(meas({{0.0, 1.0}}), meas({{0.0, 1.25}}), 1e-9).value;
    CHECK(got == doctest::Approx(0.25).epsilon(1e-6));
  }
  SUBCASE("tolerance must be positive") {
    CHECK_THROWS_AS(prohorov_distance(meas({{0.0, 1.0}}), meas({{1.0, 1.0}}), 0.0),
                    ValidationError);
  }
}

TEST_CASE("bisection + flow matches the brute-force oracle") {
  CounterRng rng(83, 0);
  for (int rep = 0; rep < 60; ++rep) {
    AtomicMeasure1D a = random_measure(rng, 6);
    AtomicMeasure1D b = random_measure(rng, 6);
    const double got = prohorov_distance(a, b, 1e-8).value;
    const double want = prohorov_oracle(a, b);
    CHECK(got == doctest::Approx(want).epsilon(1e-6));
  }
}

TEST_CASE("metric properties on equal-mass inputs") {
  CounterRng rng(89, 0);
  for (int rep = 0; rep < 15; ++rep) {
    AtomicMeasure1D a = random_measure(rng, 5);
    AtomicMeasure1D b = random_measure(rng, 5);
    AtomicMeasure1D c = random_measure(rng, 5);
    const double ab = prohorov_distance(a, b, 1e-9).value;
    const double ba = prohorov_distance(b, a, 1e-9).value;
    const double ac = prohorov_distance(a, c, 1e-9).value;
    const double cb = prohorov_distance(c, b, 1e-9).value;
    CHECK(ab == doctest::Approx(ba).epsilon(1e-7));
    CHECK(ab <= ac + cb + 1e-6);
    CHECK(ab >= 0.0);
  }
}

TEST_SUITE_END();
