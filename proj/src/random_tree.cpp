#include "ultragen/random_tree.hpp"

#include <algorithm>
#include <string>

#include "ultragen/errors.hpp"
#include "ultragen/tree_ops.hpp"

namespace ultragen {

MergeTree random_tree(int n, CounterRng& rng, const RandomTreeOptions& opts) {
  if (n < 1) throw ValidationError("random_tree: n must be at least 1");
  TreeBuilder b;
  std::vector<int> roots;
  roots.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double mass =
        opts.continuous_masses ? opts.mass_scale * (0.1 + rng.next_unit()) : opts.mass_scale;
    roots.push_back(b.add_leaf("x" + std::to_string(i), mass));
  }
  double height = 0.0;
  while (roots.size() > 1) {
    height += rng.next_exponential(1.0) * 0.25 + 0.05;
    // One merge event, possibly multifurcating; occasionally a second merge
    // at the same height on disjoint roots.
    int rounds = 1;
    if (!opts.binary && roots.size() >= 4 && rng.next_unit() < opts.tie_prob) rounds = 2;
    for (int round = 0; round < rounds && roots.size() > 1; ++round) {
      std::size_t arity = 2;
      if (!opts.binary && roots.size() > 2 && rng.next_unit() < opts.multifurcation_prob)
        arity = 3 + rng.next_below(std::min<std::uint64_t>(roots.size() - 2, 2));
      arity = std::min(arity, roots.size());
      std::vector<int> picked;
      for (std::size_t k = 0; k < arity; ++k) {
        const std::size_t at = rng.next_below(roots.size());
        picked.push_back(roots[at]);
        roots.erase(roots.begin() + static_cast<long>(at));
      }
      roots.push_back(b.add_internal(height, std::move(picked)));
    }
  }
  return b.build(roots.front());
}

MergeTree random_identifiable_tree(int n, std::uint64_t seed, int max_retries) {
  RandomTreeOptions opts;
  opts.continuous_masses = true;
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    CounterRng rng(seed, static_cast<std::uint64_t>(attempt) + 1000);
    MergeTree t = random_tree(n, rng, opts);
    const IdentifiabilityResult r = is_identifiable(t);
    if (r.state != Identifiability::kNotIdentifiable) return t;
  }
  throw ValidationError("random_identifiable_tree: retries exhausted");
}

MergeTree random_binary_tree(int n, std::uint64_t seed) {
  RandomTreeOptions opts;
  opts.binary = true;
  CounterRng rng(seed, 2000);
  return random_tree(n, rng, opts);
}

}  // namespace ultragen
