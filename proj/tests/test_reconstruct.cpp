#include "ultragen/reconstruct.hpp"

#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "ultragen/errors.hpp"
#include "ultragen/random_tree.hpp"
#include "ultragen/tree_ops.hpp"

using namespace ultragen;

TEST_SUITE_BEGIN("reconstruct");

TEST_CASE("three_point_inversion") {
  SUBCASE("printed example to 1e-12") {
    ThreePoint r = three_point_inversion(0.38, 0.68, 1.0);
    CHECK(std::abs(r.x - 0.5) <= 1e-12);
    CHECK(std::abs(r.y - 0.3) <= 1e-12);
    CHECK(std::abs(r.z - 0.2) <= 1e-12);
  }
  SUBCASE("degenerate x = y (zero discriminant)") {
    // (x, y, z) = (0.4, 0.4, 0.2): b0 = 0.36, b1 = 0.68, b2 = 1.
    ThreePoint r = three_point_inversion(0.36, 0.68, 1.0);
    CHECK(r.x == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(r.y == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(r.z == doctest::Approx(0.2).epsilon(1e-12));
  }
  SUBCASE("domain violations name the radical") {
    // b1 > b2 forces b2 < 2*b1 - b2; rejected by the ordering precondition.
    CHECK_THROWS_AS(three_point_inversion(0.3, 1.0, 0.9), ValidationError);
    CHECK_THROWS_WITH_AS(three_point_inversion(0.05, 0.5, 0.6),
                         doctest::Contains("second radical"), ValidationError);
    CHECK_THROWS_AS(three_point_inversion(0.5, 0.4, 0.6), ValidationError);
  }
  SUBCASE("inverts the forward map on random valid triples") {
    CounterRng rng(109, 0);
    for (int rep = 0; rep < 50; ++rep) {
      const double x = 0.2 + rng.next_unit();
      const double y = x * (0.05 + 0.95 * rng.next_unit());        // y <= x
      const double z = (x + y) * (0.05 + 0.9 * rng.next_unit());   // z <= x + y
      const double b0 = x * x + y * y + z * z;
      const double b1 = (x + y) * (x + y) + z * z;
      const double b2 = (x + y + z) * (x + y + z);
      ThreePoint r = three_point_inversion(b0, b1, b2);
      CHECK(r.x == doctest::Approx(x).epsilon(1e-9));
      CHECK(r.y == doctest::Approx(y).epsilon(1e-9));
      CHECK(r.z == doctest::Approx(z).epsilon(1e-9));
    }
  }
}

TEST_CASE("tree_from_path") {
  SUBCASE("caterpillar from atoms (5,3,1)") {
    ProfilePath p;
    p.jumps = {1.0, 2.0};
    p.values = {RankedProfile({5, 3, 1}), RankedProfile({8, 1}), RankedProfile({9})};
    p.zero_value = RankedProfile({5, 3, 1});
    auto [tree, trace] = tree_from_path(p);
    CHECK(trace.certified);
    REQUIRE(trace.steps.size() == 2);
    // 8 = 5 + 3 is the unique match at h = 1.
    CHECK(trace.steps[0].groups[0] == std::vector<int>{0, 1});
    MergeTree expect = MergeTree::merge(
        2.0, {MergeTree::merge(1.0, {MergeTree::leaf("a", 5), MergeTree::leaf("b", 3)}),
              MergeTree::leaf("c", 1)});
    CHECK(isomorphic(tree, expect, 1e-12));
  }
  SUBCASE("identifiability pre-check on (5,3,2)") {
    ProfilePath p;
    p.jumps = {1.0, 2.0};
    p.values = {RankedProfile({5, 3, 2}), RankedProfile({8, 2}), RankedProfile({10})};
    CHECK_THROWS_WITH_AS(tree_from_path(p), doctest::Contains("pre-check"), ValidationError);
    // With the pre-check disabled the stepwise matching is still unique
    // (8 = 5 + 3 is the only grouping) and certifies.
    ReconstructOptions opts;
    opts.check_identifiable = false;
    auto [tree, trace] = tree_from_path(p, opts);
    CHECK(trace.certified);
    CHECK(tree.num_leaves() == 3);
  }
  SUBCASE("constant path gives a single leaf") {
    ProfilePath p;
    p.values = {RankedProfile({2.5})};
    auto [tree, trace] = tree_from_path(p);
    CHECK(tree.num_leaves() == 1);
    CHECK(tree.total_mass() == 2.5);
    CHECK(trace.steps.empty());
    CHECK(trace.certified);
  }
  SUBCASE("ambiguous grouping is reported, never resolved silently") {
    // Atoms (4,3,2,1): 4+1 = 3+2, and the jump to (5,5) admits both splits.
    ProfilePath p;
    p.jumps = {1.0, 2.0};
    p.values = {RankedProfile({4, 3, 2, 1}), RankedProfile({5, 5}), RankedProfile({10})};
    ReconstructOptions opts;
    opts.check_identifiable = false;
    CHECK_THROWS_AS(tree_from_path(p, opts), ReconstructError);
    try {
      tree_from_path(p, opts);
    } catch (const ReconstructError& e) {
      CHECK(e.kind() == ReconstructFailure::kAmbiguousMatch);
    }
  }
  SUBCASE("inconsistent path is rejected") {
    ProfilePath p;
    p.jumps = {1.0, 2.0};
    p.values = {RankedProfile({5, 3, 1}), RankedProfile({7, 2}), RankedProfile({9})};
    ReconstructOptions opts;
    opts.check_identifiable = false;
    try {
      tree_from_path(p, opts);
      CHECK(false);
    } catch (const ReconstructError& e) {
      CHECK(e.kind() == ReconstructFailure::kInconsistentPath);
    }
  }
  SUBCASE("round trip I on random identifiable trees") {
    for (int rep = 0; rep < 40; ++rep) {
      MergeTree t = random_identifiable_tree(2 + rep % 14, 500 + rep);
      auto [back, trace] = tree_from_path(decomposition_path(t));
      CHECK(trace.certified);
      CHECK(isomorphic(back, t, 1e-9));
    }
  }
}

TEST_CASE("tree_from_nu2") {
  SUBCASE("single atom at zero gives a single leaf") {
    auto [tree, trace] = tree_from_nu2(AtomicMeasure1D::from_atoms({{0.0, 2.25}}));
    CHECK(tree.num_leaves() == 1);
    CHECK(tree.total_mass() == doctest::Approx(1.5));
    CHECK(trace.certified);
  }
  SUBCASE("three-point worked example") {
    // Masses (0.5, 0.3, 0.2) with (x,y) merging at 1 and z joining at 2.
    MergeTree t = MergeTree::merge(
        2.0, {MergeTree::merge(1.0, {MergeTree::leaf("x", 0.5), MergeTree::leaf("y", 0.3)}),
              MergeTree::leaf("z", 0.2)});
    auto [back, trace] = tree_from_nu2(nu2(t));
    CHECK(trace.certified);
    CHECK(isomorphic(back, t, 1e-9));
  }
  SUBCASE("round trip II on random binary identifiable trees") {
    for (int rep = 0; rep < 40; ++rep) {
      MergeTree t = random_binary_tree(2 + rep % 11, 900 + rep);
      if (is_identifiable(t).state != Identifiability::kIdentifiable) continue;
      auto [back, trace] = tree_from_nu2(nu2(t));
      CHECK(trace.certified);
      CHECK(isomorphic(back, t, 1e-9));
    }
  }
  SUBCASE("unrealizable input: no completion") {
    // Total mass 4 => tree mass 2, but the single positive atom wants a split
    // with product 3, impossible from mass 2 (discriminant 4 - 12 < 0).
    AtomicMeasure1D bad = AtomicMeasure1D::from_atoms({{0.0, 1.0}, {1.0, 3.0}});
    try {
      tree_from_nu2(bad);
      CHECK(false);
    } catch (const ReconstructError& e) {
      CHECK(e.kind() == ReconstructFailure::kNoCompletion);
    }
  }
  SUBCASE("equal-mass families reconstruct uniquely at value level") {
    AtomicMeasure1D m = nu2(MergeTree::merge(
        2.0, {MergeTree::merge(1.0, {MergeTree::leaf("a", 1), MergeTree::leaf("b", 1)}),
              MergeTree::merge(1.5, {MergeTree::leaf("c", 1), MergeTree::leaf("d", 1)})}));
    auto [tree, trace] = tree_from_nu2(m);
    CHECK(trace.certified);
    CHECK(l1_distance(tree.leaf_profile(), RankedProfile({1, 1, 1, 1})) <= 1e-9);
  }
  SUBCASE("non-identifiable input with two realizations is reported") {
    // Masses (6,1) merge at 1, (3,2) at 1.5, roots at 2. Since 6 = 1+3+2 the
    // space is not identifiable, and indeed a second binary tree shares this
    // nu2: split 7 at depth 1.5 into (6,1) and then 6 at depth 1 into
    // 3 +- sqrt(3) (the products 2*6*1 = 2*3*2 = 12 coincide).
    MergeTree t = MergeTree::merge(
        2.0, {MergeTree::merge(1.0, {MergeTree::leaf("x", 6), MergeTree::leaf("y", 1)}),
              MergeTree::merge(1.5, {MergeTree::leaf("z", 3), MergeTree::leaf("w", 2)})});
    try {
      tree_from_nu2(nu2(t));
      CHECK(false);
    } catch (const ReconstructError& e) {
      CHECK(e.kind() == ReconstructFailure::kMultipleCompletions);
    }
  }
}

TEST_SUITE_END();
