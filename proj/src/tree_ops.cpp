#include "ultragen/tree_ops.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "ultragen/errors.hpp"
#include "ultragen/rng.hpp"

namespace ultragen {

namespace {

// Label of the ball: its first leaf in stored order.
std::string ball_label(const MergeTree& t, const std::vector<int>& block) {
  return t.node(block.front()).label;
}

// Quotient the crown (nodes strictly above h) onto ball leaves; `shift`
// subtracts h from the surviving heights (cut) or keeps them (psi).
MergeTree quotient_above(const MergeTree& t, double h, bool shift) {
  BallPartition part = ball_partition(t, h);
  if (part.blocks.size() == 1) {
    return MergeTree::leaf(ball_label(t, part.blocks[0]), part.block_masses[0]);
  }
  TreeBuilder b;
  std::vector<int> map(t.nodes().size(), -1);
  for (std::size_t k = 0; k < part.blocks.size(); ++k) {
    map[part.block_roots[k]] =
        b.add_leaf(ball_label(t, part.blocks[k]), part.block_masses[k]);
  }
  // Crown nodes in children-first order.
  std::vector<int> order;
  {
    std::vector<int> stack{t.root()};
    while (!stack.empty()) {
      int i = stack.back();
      stack.pop_back();
      if (map[i] != -1) continue;  // ball root
      order.push_back(i);
      for (int c : t.node(i).children) stack.push_back(c);
    }
    std::reverse(order.begin(), order.end());
  }
  for (int i : order) {
    const auto& n = t.node(i);
    std::vector<int> ch;
    ch.reserve(n.children.size());
    for (int c : n.children) ch.push_back(map[c]);
    map[i] = b.add_internal(shift ? n.height - h : n.height, std::move(ch));
  }
  return b.build(map[t.root()]);
}

}  // namespace

MergeTree cut(const MergeTree& t, double h) { return quotient_above(t, h, /*shift=*/true); }

MergeTree psi(const MergeTree& t, double h) { return quotient_above(t, h, /*shift=*/false); }

MergeTree top(const MergeTree& t, double h) {
  if (!(h > 0.0)) throw ValidationError("top: depth h must be positive");
  if (t.root_height() <= h) return t;
  BallPartition part = ball_partition(t, h);
  // Rebuild each ball subtree and join them at height h.
  std::vector<MergeTree> parts;
  parts.reserve(part.blocks.size());
  for (std::size_t k = 0; k < part.blocks.size(); ++k) {
    // Extract the subtree rooted at block_roots[k].
    TreeBuilder b;
    std::vector<int> map(t.nodes().size(), -1);
    std::vector<int> order;
    std::vector<int> stack{part.block_roots[k]};
    while (!stack.empty()) {
      int i = stack.back();
      stack.pop_back();
      order.push_back(i);
      for (int c : t.node(i).children) stack.push_back(c);
    }
    std::reverse(order.begin(), order.end());
    for (int i : order) {
      const auto& n = t.node(i);
      if (n.children.empty()) {
        map[i] = b.add_leaf(n.label, n.mass);
      } else {
        std::vector<int> ch;
        for (int c : n.children) ch.push_back(map[c]);
        map[i] = b.add_internal(n.height, std::move(ch));
      }
    }
    parts.push_back(b.build(map[part.block_roots[k]]));
  }
  return MergeTree::merge(h, std::move(parts));
}

MergeTree concat(std::vector<MergeTree> parts, double h) {
  if (!(h > 0.0)) throw ValidationError("concat: height h must be positive");
  if (parts.empty()) throw ValidationError("concat: empty part list");
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].root_height() > h)
      throw ValidationError("concat: part " + std::to_string(i) + " has diameter " +
                            std::to_string(parts[i].root_height()) +
                            " exceeding concatenation height " + std::to_string(h));
  }
  return MergeTree::merge(h, std::move(parts));
}

IdentifiabilityResult is_identifiable(const MergeTree& t, const IdentifiabilityOptions& opts) {
  const int n = t.num_leaves();
  std::vector<double> m;
  m.reserve(n);
  for (int i : t.leaves()) m.push_back(t.node(i).mass);

  IdentifiabilityResult res;
  if (n <= opts.exact_cap) {
    // All 2^n subset sums; distinct subsets must give distinct sums. Sums are
    // accumulated in index-ascending order so equal subsets hash identically.
    const std::uint32_t total = 1u << n;
    std::vector<std::pair<double, std::uint32_t>> sums;
    sums.reserve(total);
    for (std::uint32_t s = 0; s < total; ++s) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i)
        if (s & (1u << i)) acc += m[i];
      sums.push_back({acc, s});
    }
    std::sort(sums.begin(), sums.end());
    for (std::uint32_t i = 1; i < total; ++i) {
      if (sums[i].first == sums[i - 1].first) {
        res.state = Identifiability::kNotIdentifiable;
        for (int b = 0; b < n; ++b) {
          if (sums[i - 1].second & (1u << b)) res.witness_a.push_back(b);
          if (sums[i].second & (1u << b)) res.witness_b.push_back(b);
        }
        return res;
      }
    }
    res.state = Identifiability::kIdentifiable;
    return res;
  }

  // Too large for the exact check: randomized collision probe only.
  CounterRng rng(opts.probe_seed, 0);
  for (std::size_t round = 0; round < opts.probe_rounds; ++round) {
    double a = 0.0, b = 0.0;
    std::vector<int> ia, ib;
    for (int i = 0; i < n; ++i) {
      switch (rng.next_below(3)) {
        case 0: a += m[i]; ia.push_back(i); break;
        case 1: b += m[i]; ib.push_back(i); break;
        default: break;
      }
    }
    if (a == b && ia != ib) {
      res.state = Identifiability::kNotIdentifiable;
      res.witness_a = std::move(ia);
      res.witness_b = std::move(ib);
      return res;
    }
  }
  res.state = Identifiability::kUnknown;
  return res;
}

bool is_binary(const MergeTree& t) {
  std::set<double> heights;
  for (const auto& n : t.nodes()) {
    if (n.children.empty()) continue;
    if (n.children.size() != 2) return false;
    if (!heights.insert(n.height).second) return false;
  }
  return true;
}

namespace {

bool iso_rec(const MergeTree& a, int ia, const MergeTree& b, int ib, double tol);

// Backtracking matching of child lists, candidates restricted to
// tolerance-compatible pairs.
bool match_children(const MergeTree& a, const std::vector<int>& ca, const MergeTree& b,
                    std::vector<int> cb, double tol) {
  if (ca.empty()) return cb.empty();
  int x = ca.front();
  std::vector<int> rest(ca.begin() + 1, ca.end());
  for (std::size_t i = 0; i < cb.size(); ++i) {
    if (iso_rec(a, x, b, cb[i], tol)) {
      std::vector<int> cb2 = cb;
      cb2.erase(cb2.begin() + static_cast<long>(i));
      if (match_children(a, rest, b, std::move(cb2), tol)) return true;
    }
  }
  return false;
}

bool iso_rec(const MergeTree& a, int ia, const MergeTree& b, int ib, double tol) {
  const auto& na = a.node(ia);
  const auto& nb = b.node(ib);
  if (std::abs(na.mass - nb.mass) > tol) return false;
  if (na.children.empty() != nb.children.empty()) return false;
  if (na.children.empty()) return true;
  if (std::abs(na.height - nb.height) > tol) return false;
  if (na.children.size() != nb.children.size()) return false;
  return match_children(a, na.children, b, nb.children, tol);
}

}  // namespace

bool isomorphic(const MergeTree& a, const MergeTree& b, double tol) {
  if (a.num_leaves() != b.num_leaves()) return false;
  return iso_rec(a, a.root(), b, b.root(), tol);
}

}  // namespace ultragen
