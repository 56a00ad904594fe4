#include "ultragen/coalsim.hpp"

#include <cmath>
#include <map>
#include <tuple>

#include "doctest.h"
#include "ultragen/atomic_measure.hpp"
#include "ultragen/errors.hpp"
#include "ultragen/stats.hpp"
#include "ultragen/tree_ops.hpp"

using namespace ultragen;

TEST_SUITE_BEGIN("coalsim");

TEST_CASE("kingman basics") {
  SUBCASE("n = 2: a single merge at an Exp(1) time") {
    std::vector<double> times;
    for (int rep = 0; rep < 2000; ++rep) {
      PartitionPath p = simulate_kingman(2, 1e18, 404, rep);
      REQUIRE(p.events().size() == 1);
      times.push_back(p.events()[0].time);
    }
    KsResult ks = ks_test(times, [](double x) { return 1.0 - std::exp(-x); });
    CHECK(ks.p_value > 0.01);
  }
  SUBCASE("block counts drop by exactly one per event") {
    PartitionPath p = simulate_kingman(12, 1e18, 405, 0);
    REQUIRE(p.events().size() == 11);
    int k = 12;
    double prev = 0.0;
    for (const auto& e : p.events()) {
      CHECK(e.time > prev);
      prev = e.time;
      CHECK(p.num_blocks_at(e.time) == k - 1);
      --k;
    }
    CHECK(p.blocks_at(prev).size() == 1);
  }
  SUBCASE("mean time to one block is 2(1 - 1/n)") {
    const int n = 10;
    std::vector<double> depth;
    for (int rep = 0; rep < 3000; ++rep) {
      PartitionPath p = simulate_kingman(n, 1e18, 406, rep);
      depth.push_back(p.events().back().time);
    }
    const double expect = 2.0 * (1.0 - 1.0 / n);
    const double se = sample_stddev(depth) / std::sqrt(static_cast<double>(depth.size()));
    CHECK(std::abs(mean(depth) - expect) <= 3.5 * se);
  }
  SUBCASE("holding times at k blocks are Exp(k(k-1)/2)") {
    const int n = 8;
    std::vector<std::vector<double>> per_k(n + 1);
    for (int rep = 0; rep < 1500; ++rep)
      for (auto [k, dt] : simulate_kingman(n, 1e18, 407, rep).holding_times())
        per_k[static_cast<std::size_t>(k)].push_back(dt);
    for (int k = 2; k <= n; ++k) {
      const double rate = 0.5 * k * (k - 1);
      KsResult ks = ks_test(per_k[static_cast<std::size_t>(k)],
                            [rate](double x) { return 1.0 - std::exp(-rate * x); });
      CHECK(ks.p_value > 0.01 / static_cast<double>(n - 1));  // Bonferroni
    }
  }
  SUBCASE("time horizon truncates") {
    PartitionPath p = simulate_kingman(40, 0.05, 408, 3);
    for (const auto& e : p.events()) CHECK(e.time <= 0.05);
  }
}

TEST_CASE("tree_from_coalescent") {
  const UltrametricMatrixSpace r0 = caterpillar_metric(6, 10.0);
  SUBCASE("full coalescence: tree depth equals the last merge time") {
    PartitionPath p = simulate_kingman(6, 1e18, 409, 1);
    MergeTree t = tree_from_coalescent(p, 1e17, r0);
    CHECK(t.root_height() == doctest::Approx(p.events().back().time));
    CHECK(t.total_mass() == doctest::Approx(1.0));
    CHECK(is_binary(t));
  }
  SUBCASE("no events: the tree is the r0 genealogy") {
    PartitionPath p(6, {});
    MergeTree t = tree_from_coalescent(p, 1.0, r0);
    CHECK(t.num_leaves() == 6);
    CHECK(t.root_height() == doctest::Approx(r0.dist[0][5]));
  }
  SUBCASE("partial coalescence mixes merge times with r0") {
    PartitionPath p = simulate_kingman(6, 0.2, 410, 7);
    MergeTree t = tree_from_coalescent(p, 0.2, r0);
    CHECK(validate_ultrametric(to_matrix(t)).empty());
    CHECK(t.total_mass() == doctest::Approx(1.0));
  }
}

TEST_CASE("restrict_coalescent") {
  PartitionPath p = simulate_kingman(30, 1e18, 411, 2);
  SUBCASE("restriction to the full size is the identity") {
    PartitionPath q = restrict_coalescent(p, 30);
    CHECK(q.events().size() == p.events().size());
  }
  SUBCASE("restriction to one individual has no events") {
    CHECK(restrict_coalescent(p, 1).events().empty());
  }
  SUBCASE("commutes with further restriction, exactly") {
    for (int rep = 0; rep < 25; ++rep) {
      PartitionPath full = simulate_kingman(30, 1e18, 412, rep);
      PartitionPath a = restrict_coalescent(restrict_coalescent(full, 18), 7);
      PartitionPath b = restrict_coalescent(full, 7);
      REQUIRE(a.events().size() == b.events().size());
      for (std::size_t i = 0; i < a.events().size(); ++i) {
        CHECK(a.events()[i].time == b.events()[i].time);
        CHECK(a.events()[i].rep_a == b.events()[i].rep_a);
        CHECK(a.events()[i].rep_b == b.events()[i].rep_b);
      }
    }
  }
  SUBCASE("restricted holding times keep the Kingman law") {
    const int n = 6;
    std::vector<std::vector<double>> per_k(n + 1);
    for (int rep = 0; rep < 1200; ++rep) {
      PartitionPath q = restrict_coalescent(simulate_kingman(40, 1e18, 413, rep), n);
      for (auto [k, dt] : q.holding_times()) per_k[static_cast<std::size_t>(k)].push_back(dt);
    }
    for (int k = 2; k <= n; ++k) {
      const double rate = 0.5 * k * (k - 1);
      KsResult ks = ks_test(per_k[static_cast<std::size_t>(k)],
                            [rate](double x) { return 1.0 - std::exp(-rate * x); });
      CHECK(ks.p_value > 0.01 / static_cast<double>(n - 1));
    }
  }
}

TEST_CASE("moran simulation") {
  SUBCASE("n = 1 is a single leaf") {
    MoranResult r = simulate_moran(1, 5.0, caterpillar_metric(1, 1.0), 414);
    CHECK(r.tree.num_leaves() == 1);
    CHECK(r.tree.total_mass() == doctest::Approx(1.0));
  }
  SUBCASE("n = 2 mean distance matches the analytic value") {
    // Depth = A when the last event is at age A <= t, else t + D:
    // E = (1 - e^{-t} - t e^{-t}) + (t + D) e^{-t} = 1 - e^{-t} + D e^{-t}.
    const double t = 1.5, d0 = 7.0;
    UltrametricMatrixSpace r0({"a", "b"}, {{0, d0}, {d0, 0}}, {1, 1});
    std::vector<double> dist;
    for (int rep = 0; rep < 4000; ++rep) {
      MoranResult r = simulate_moran(2, t, r0, 415, rep);
      dist.push_back(to_matrix(r.tree).dist[0][1]);
    }
    const double expect = 1.0 - std::exp(-t) + d0 * std::exp(-t);
    const double se = sample_stddev(dist) / std::sqrt(static_cast<double>(dist.size()));
    CHECK(std::abs(mean(dist) - expect) <= 3.5 * se);
  }
  SUBCASE("trees are valid, binary, and mass one") {
    for (int rep = 0; rep < 20; ++rep) {
      MoranResult r = simulate_moran(12, 1.0, caterpillar_metric(12, 5.0), 416, rep);
      CHECK(validate_ultrametric(to_matrix(r.tree)).empty());
      CHECK(is_binary(r.tree));
      CHECK(r.tree.total_mass() == doctest::Approx(1.0));
    }
  }
  SUBCASE("backward merge rate matches Exp(k(k-1)/2)") {
    // Lineage-merge ages pooled across replications, split by the number of
    // distinct lineages k just before the merge (backward in time).
    const int n = 5;
    const double t = 60.0;  // deep horizon: all lineages coalesce
    std::vector<std::vector<double>> per_k(n + 1);
    for (int rep = 0; rep < 800; ++rep) {
      MoranResult r = simulate_moran(n, t, caterpillar_metric(n, 100.0), 417, rep);
      // Distinct merge depths of the binary genealogy, ascending: the j-th
      // (0-based) happens while n - j lineages remain.
      std::vector<double> depths = r.tree.merge_heights();
      double prev = 0.0;
      for (std::size_t j = 0; j < depths.size() && depths[j] < t; ++j) {
        per_k[static_cast<std::size_t>(n - static_cast<int>(j))].push_back(depths[j] - prev);
        prev = depths[j];
      }
    }
    for (int k = 3; k <= n; ++k) {
      const double rate = 0.5 * k * (k - 1);
      KsResult ks = ks_test(per_k[static_cast<std::size_t>(k)],
                            [rate](double x) { return 1.0 - std::exp(-rate * x); });
      CHECK(ks.p_value > 0.005);
    }
  }
  SUBCASE("ancestry snapshots are consistent") {
    MoranResult r = simulate_moran(8, 2.0, caterpillar_metric(8, 10.0), 418, 5);
    REQUIRE(!r.ancestry.h_grid.empty());
    // At h = t every individual is its own ancestor.
    const auto& top = r.ancestry.ancestors.back();
    for (int i = 0; i < 8; ++i) CHECK(top[static_cast<std::size_t>(i)] == i);
    // Ancestor maps refine backward: equal ancestors stay equal at lower h.
    for (std::size_t g = 1; g < r.ancestry.h_grid.size(); ++g)
      for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
          if (r.ancestry.ancestors[g][static_cast<std::size_t>(i)] ==
              r.ancestry.ancestors[g][static_cast<std::size_t>(j)])
            CHECK(r.ancestry.ancestors[g - 1][static_cast<std::size_t>(i)] ==
                  r.ancestry.ancestors[g - 1][static_cast<std::size_t>(j)]);
  }
}

TEST_CASE("moran and kingman genealogies agree in law below the horizon") {
  const int n = 25;
  const double t = 1.0;
  const UltrametricMatrixSpace r0 = caterpillar_metric(n, 5.0);
  std::vector<double> stat_moran, stat_kingman;
  for (int rep = 0; rep < 600; ++rep) {
    stat_moran.push_back(nu2(simulate_moran(n, t, r0, 419, rep).tree).mass_upto(0.5));
    stat_kingman.push_back(
        nu2(tree_from_coalescent(simulate_kingman(n, t, 420, rep), t, r0)).mass_upto(0.5));
  }
  KsResult ks = ks_two_sample(stat_moran, stat_kingman);
  CHECK(ks.p_value > 0.01);
}

TEST_CASE("paintbox") {
  SUBCASE("k = 1 is the trivial profile") {
    CounterRng rng(421, 0);
    CHECK(ranked_block_frequencies(1, rng) == RankedProfile({1.0}));
    CHECK(largest_block_mean(1) == 1.0);
  }
  SUBCASE("analytic largest-block means") {
    CHECK(largest_block_mean(2) == doctest::Approx(0.75));
    CHECK(largest_block_mean(3) == doctest::Approx(11.0 / 18.0));
    CHECK(largest_block_mean(10) == doctest::Approx(0.29289682539682538));
  }
  SUBCASE("sample means match H_k/k within 3 sigma") {
    for (int k : {2, 3, 5}) {
      CounterRng rng(422, static_cast<std::uint64_t>(k));
      std::vector<double> largest;
      for (int rep = 0; rep < 8000; ++rep)
        largest.push_back(ranked_block_frequencies(k, rng)[0]);
      const double se = sample_stddev(largest) / std::sqrt(static_cast<double>(largest.size()));
      CHECK(std::abs(mean(largest) - largest_block_mean(k)) <= 3.0 * se);
    }
  }
  SUBCASE("profiles sum to one") {
    CounterRng rng(423, 0);
    for (int rep = 0; rep < 50; ++rep)
      CHECK(ranked_block_frequencies(1 + rep % 9, rng).total() == doctest::Approx(1.0));
  }
}

TEST_CASE("convergence experiment") {
  ConvergenceExperimentConfig cfg;
  cfg.n_list = {8, 16, 32};
  cfg.t = 1.0;
  cfg.h_grid = {0.1, 0.4, 0.8};
  cfg.reps = 200;
  cfg.seed = 424;
  cfg.jobs = 2;
  ConvergenceExperimentReport rep = convergence_experiment(cfg);
  SUBCASE("mass conservation in every row group") {
    // Sum of masses per (n, rep, h) is 1.
    std::map<std::tuple<int, int, double>, double> sums;
    for (const auto& row : rep.rows) sums[{row.n, row.rep, row.h}] += row.mass;
    for (const auto& [key, s] : sums) CHECK(s == doctest::Approx(1.0));
  }
  SUBCASE("coupled gap shrinks with n") {
    REQUIRE(rep.coupled_l1_gap.size() == 2);
    for (std::size_t b = 0; b < cfg.h_grid.size(); ++b)
      CHECK(rep.coupled_l1_gap[1][b] <= rep.coupled_l1_gap[0][b] + 0.05);
  }
  SUBCASE("largest family mean tracks H_k/k at depths where k families survive") {
    // At depth h the expected block count is about k when h ~ 2/k; with the
    // paintbox given k blocks the largest-family mean is H_k/k. Use the
    // realized block counts directly: group rows by observed count.
    std::map<int, std::vector<double>> largest_by_count;
    std::map<std::tuple<int, int, double>, std::pair<int, double>> per_group;
    for (const auto& row : rep.rows) {
      auto& g = per_group[{row.n, row.rep, row.h}];
      g.first = std::max(g.first, row.rank + 1);
      if (row.rank == 0) g.second = row.mass;
    }
    for (const auto& [key, g] : per_group)
      if (std::get<0>(key) == 32) largest_by_count[g.first].push_back(g.second);
    for (int k : {2, 3}) {
      if (largest_by_count[k].size() < 30) continue;
      const auto& v = largest_by_count[k];
      const double se = sample_stddev(v) / std::sqrt(static_cast<double>(v.size()));
      CHECK(std::abs(mean(v) - largest_block_mean(k)) <= 4.0 * se + 0.02);
    }
  }
}

TEST_SUITE_END();
