#include "ultragen/tree_ops.hpp"

#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "ultragen/errors.hpp"
#include "ultragen/matrix_space.hpp"
#include "ultragen/random_tree.hpp"

using namespace ultragen;

TEST_SUITE_BEGIN("tree_ops");

TEST_CASE("cut") {
  MergeTree un = fixtures::caterpillar_un(10);
  SUBCASE("u_n cut at 1: masses (2,1) at distance 1/10") {
    MergeTree c = cut(un, 1.0);
    REQUIRE(c.num_leaves() == 2);
    CHECK(c.leaf_profile() == RankedProfile({2, 1}));
    CHECK(c.root_height() == doctest::Approx(0.1));
  }
  SUBCASE("cutting at or above the root height gives one leaf") {
    MergeTree c = cut(un, 5.0);
    CHECK(c.num_leaves() == 1);
    CHECK(c.total_mass() == 3.0);
  }
  SUBCASE("semigroup: cut(cut(t,a),b) == cut(t,a+b)") {
    CounterRng rng(11, 0);
    for (int rep = 0; rep < 15; ++rep) {
      MergeTree t = random_tree(3 + static_cast<int>(rng.next_below(10)), rng);
      const double a = t.root_height() * (0.1 + 0.5 * rng.next_unit());
      const double b = t.root_height() * 0.2;
      CHECK(isomorphic(cut(cut(t, a), b), cut(t, a + b), 1e-9));
    }
  }
}

TEST_CASE("psi") {
  MergeTree un = fixtures::caterpillar_un(10);
  SUBCASE("u_n quotient at 1 keeps the outer height") {
    MergeTree q = psi(un, 1.0);
    REQUIRE(q.num_leaves() == 2);
    CHECK(q.leaf_profile() == RankedProfile({2, 1}));
    CHECK(q.root_height() == doctest::Approx(1.1));
  }
  SUBCASE("quotient at the diameter gives one leaf") {
    CHECK(psi(un, 1.1).num_leaves() == 1);
  }
  SUBCASE("leaf count equals num_balls; leaf masses match cut") {
    CounterRng rng(13, 0);
    for (int rep = 0; rep < 15; ++rep) {
      MergeTree t = random_tree(3 + static_cast<int>(rng.next_below(10)), rng);
      const double h = t.root_height() * (0.15 + 0.7 * rng.next_unit());
      MergeTree q = psi(t, h);
      CHECK(q.num_leaves() == num_balls(t, h));
      CHECK(q.leaf_profile() == cut(t, h).leaf_profile());
      // psi keeps inter-ball heights; cut shifts them by exactly h.
      UltrametricMatrixSpace mq = to_matrix(q);
      UltrametricMatrixSpace mc = to_matrix(cut(t, h));
      for (int i = 0; i < mq.size(); ++i)
        for (int j = 0; j < mq.size(); ++j)
          if (i != j) CHECK(mq.dist[i][j] - h == doctest::Approx(mc.dist[i][j]).epsilon(1e-12));
    }
  }
}

TEST_CASE("top") {
  MergeTree un = fixtures::caterpillar_un(10);
  SUBCASE("top of u_n at 1 is the equilateral space") {
    CHECK(isomorphic(top(un, 1.0), fixtures::equilateral_u(), 1e-12));
  }
  SUBCASE("top at or above the root height is the identity") {
    CHECK(isomorphic(top(un, 1.1), un, 0.0));
    CHECK(isomorphic(top(un, 99.0), un, 0.0));
  }
  SUBCASE("top(top(t,a),b) == top(t,min(a,b))") {
    CounterRng rng(17, 0);
    for (int rep = 0; rep < 15; ++rep) {
      MergeTree t = random_tree(3 + static_cast<int>(rng.next_below(10)), rng);
      const double a = t.root_height() * (0.2 + 0.6 * rng.next_unit());
      const double b = t.root_height() * (0.2 + 0.6 * rng.next_unit());
      CHECK(isomorphic(top(top(t, a), b), top(t, std::min(a, b)), 1e-12));
    }
  }
}

TEST_CASE("concat") {
  SUBCASE("two single leaves at h: two-point space at distance h") {
    MergeTree t = concat({MergeTree::leaf("a", 0.4), MergeTree::leaf("b", 0.6)}, 2.0);
    CHECK(t.num_leaves() == 2);
    CHECK(t.root_height() == 2.0);
    CHECK(t.total_mass() == 1.0);
  }
  SUBCASE("associative and permutation-invariant up to isomorphism") {
    MergeTree a = MergeTree::leaf("a", 1.0);
    MergeTree b = MergeTree::merge(0.5, {MergeTree::leaf("b1", 1), MergeTree::leaf("b2", 2)});
    MergeTree c = MergeTree::leaf("c", 3.0);
    MergeTree left = concat({concat({a, b}, 2.0), c}, 2.0);
    MergeTree right = concat({a, concat({b, c}, 2.0)}, 2.0);
    MergeTree flat = concat({c, b, a}, 2.0);
    CHECK(isomorphic(left, right, 0.0));
    CHECK(isomorphic(left, flat, 0.0));
  }
  SUBCASE("reassembling the h-ball subtrees recovers one block per part") {
    MergeTree t = fixtures::seven_leaf_tree();
    const double h = 3.0;
    const UltrametricMatrixSpace m = to_matrix(t);
    auto leaf_pos = [&](int node) {
      for (int k = 0; k < m.size(); ++k)
        if (m.labels[k] == t.node(node).label) return k;
      return -1;
    };
    BallPartition part = ball_partition(t, h);
    std::vector<MergeTree> parts;
    for (const auto& leaves : part.blocks) {
      // Rebuild each ball subtree through its induced matrix.
      std::vector<std::string> labels;
      std::vector<double> mass;
      std::vector<std::vector<double>> d(leaves.size(),
                                         std::vector<double>(leaves.size(), 0.0));
      for (std::size_t i = 0; i < leaves.size(); ++i) {
        labels.push_back(t.node(leaves[i]).label);
        mass.push_back(t.node(leaves[i]).mass);
        for (std::size_t j = 0; j < leaves.size(); ++j)
          d[i][j] = m.dist[leaf_pos(leaves[i])][leaf_pos(leaves[j])];
      }
      parts.push_back(to_merge_tree(UltrametricMatrixSpace(labels, d, mass)));
    }
    MergeTree joined = concat(parts, h);
    CHECK(ball_partition(joined, h).blocks.size() == parts.size());
    CHECK(joined.total_mass() == doctest::Approx(t.total_mass()));
  }
  SUBCASE("oversized part rejected with its diameter in the message") {
    MergeTree wide = MergeTree::merge(3.0, {MergeTree::leaf("a", 1), MergeTree::leaf("b", 1)});
    CHECK_THROWS_WITH_AS(concat({wide, MergeTree::leaf("c", 1)}, 2.0),
                         doctest::Contains("diameter"), ValidationError);
  }
}

TEST_CASE("is_identifiable") {
  auto tree_with_masses = [](std::vector<double> masses) {
    std::vector<MergeTree> ls;
    for (std::size_t i = 0; i < masses.size(); ++i)
      ls.push_back(MergeTree::leaf("x" + std::to_string(i), masses[i]));
    return MergeTree::merge(1.0, std::move(ls));
  };
  CHECK(is_identifiable(tree_with_masses({1, 2, 4})).state == Identifiability::kIdentifiable);
  CHECK(is_identifiable(tree_with_masses({1, 1})).state == Identifiability::kNotIdentifiable);
  SUBCASE("5 = 3 + 2 is caught with a witness") {
    MergeTree t = tree_with_masses({5, 3, 2});
    IdentifiabilityResult r = is_identifiable(t);
    CHECK(r.state == Identifiability::kNotIdentifiable);
    // Witness indices refer to the tree's stored leaf order.
    double sa = 0.0, sb = 0.0;
    for (int i : r.witness_a) sa += t.node(t.leaves()[static_cast<std::size_t>(i)]).mass;
    for (int i : r.witness_b) sb += t.node(t.leaves()[static_cast<std::size_t>(i)]).mass;
    CHECK(sa == sb);
    CHECK(r.witness_a != r.witness_b);
  }
  SUBCASE("beyond the cap answers unknown (or finds a collision)") {
    std::vector<double> many(25, 0.0);
    for (std::size_t i = 0; i < many.size(); ++i) many[i] = 1.0 + 0.001 * static_cast<double>(i);
    IdentifiabilityOptions opts;
    opts.exact_cap = 20;
    IdentifiabilityResult r = is_identifiable(tree_with_masses(many), opts);
    // 1.0 + 1.003 = 1.001 + 1.002: a collision exists; the probe may or may
    // not find it, but it must never claim identifiability.
    CHECK(r.state != Identifiability::kIdentifiable);
  }
}

TEST_CASE("is_binary") {
  CHECK_FALSE(is_binary(fixtures::equilateral_u()));
  CHECK(is_binary(fixtures::caterpillar_un(7)));
  CHECK(is_binary(MergeTree::leaf("a", 1.0)));
  SUBCASE("repeated heights at disjoint nodes are not binary") {
    MergeTree t = MergeTree::merge(
        2.0, {MergeTree::merge(1.0, {MergeTree::leaf("a", 1), MergeTree::leaf("b", 1)}),
              MergeTree::merge(1.0, {MergeTree::leaf("c", 1), MergeTree::leaf("d", 1)})});
    CHECK_FALSE(is_binary(t));
  }
  SUBCASE("matches the ball-count characterization") {
    CounterRng rng(23, 0);
    for (int rep = 0; rep < 30; ++rep) {
      RandomTreeOptions opts;
      opts.binary = rep % 2 == 0;
      MergeTree t = random_tree(2 + static_cast<int>(rng.next_below(9)), rng, opts);
      bool drops_by_one = true;
      for (double h : t.merge_heights())
        if (num_balls_left_limit(t, h) - num_balls(t, h) > 1) drops_by_one = false;
      CHECK(is_binary(t) == drops_by_one);
    }
  }
}

TEST_CASE("isomorphic") {
  MergeTree un = fixtures::caterpillar_un(4);
  CHECK(isomorphic(un, un, 0.0));
  SUBCASE("permuted construction order") {
    MergeTree a = MergeTree::merge(
        2.0, {MergeTree::merge(1.0, {MergeTree::leaf("p", 0.25), MergeTree::leaf("q", 0.75)}),
              MergeTree::leaf("r", 1.5)});
    MergeTree b = MergeTree::merge(
        2.0, {MergeTree::leaf("z", 1.5),
              MergeTree::merge(1.0, {MergeTree::leaf("y", 0.75), MergeTree::leaf("x", 0.25)})});
    CHECK(isomorphic(a, b, 0.0));
  }
  SUBCASE("u_n is not u for any n") {
    for (int n : {1, 2, 10, 1000})
      CHECK_FALSE(isomorphic(fixtures::caterpillar_un(n), fixtures::equilateral_u(), 1e-9));
  }
  SUBCASE("mass mismatch breaks equivalence") {
    CHECK_FALSE(isomorphic(MergeTree::leaf("a", 1.0), MergeTree::leaf("a", 1.1), 1e-3));
    CHECK(isomorphic(MergeTree::leaf("a", 1.0), MergeTree::leaf("b", 1.0 + 1e-12), 1e-9));
  }
}

TEST_SUITE_END();
