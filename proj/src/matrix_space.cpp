#include "ultragen/matrix_space.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "ultragen/errors.hpp"

namespace ultragen {

UltrametricMatrixSpace::UltrametricMatrixSpace(std::vector<std::string> labels_,
                                               std::vector<std::vector<double>> dist_,
                                               std::vector<double> mass_)
    : labels(std::move(labels_)), dist(std::move(dist_)), mass(std::move(mass_)) {
  const std::size_t n = labels.size();
  if (n == 0) throw ValidationError("matrix space: empty point set");
  if (dist.size() != n || mass.size() != n)
    throw ValidationError("matrix space: labels/dist/mass size mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (dist[i].size() != n) throw ValidationError("matrix space: distance matrix not square");
    if (dist[i][i] != 0.0) throw ValidationError("matrix space: nonzero diagonal");
    if (!(mass[i] > 0.0)) throw ValidationError("matrix space: masses must be strictly positive");
    for (std::size_t j = 0; j < n; ++j) {
      if (!(dist[i][j] >= 0.0)) throw ValidationError("matrix space: negative or NaN distance");
      if (dist[i][j] != dist[j][i]) throw ValidationError("matrix space: matrix not symmetric");
      if (i != j && dist[i][j] == 0.0)
        throw ValidationError("matrix space: distinct points at distance zero");
    }
  }
}

std::vector<TriangleViolation> validate_ultrametric(const UltrametricMatrixSpace& m) {
  std::vector<TriangleViolation> out;
  const int n = m.size();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        const double slack = m.dist[i][j] - std::max(m.dist[i][k], m.dist[k][j]);
        if (slack > 0.0) out.push_back({i, j, k, slack});
      }
  return out;
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

MergeTree to_merge_tree(const UltrametricMatrixSpace& m) {
  auto violations = validate_ultrametric(m);
  if (!violations.empty()) {
    const auto& v = violations.front();
    throw ValidationError("to_merge_tree: input is not ultrametric, e.g. triple (" +
                          std::to_string(v.i) + "," + std::to_string(v.j) + "," +
                          std::to_string(v.k) + ") with slack " + std::to_string(v.slack));
  }
  const int n = m.size();
  TreeBuilder b;
  std::vector<int> comp_node(n);  // union-find root -> current tree node
  UnionFind uf(n);
  for (int i = 0; i < n; ++i) comp_node[i] = b.add_leaf(m.labels[i], m.mass[i]);
  if (n == 1) return b.build(comp_node[0]);

  // Group pairs by exact distance level, ascending.
  std::map<double, std::vector<std::pair<int, int>>> levels;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) levels[m.dist[i][j]].push_back({i, j});

  for (const auto& [d, pairs] : levels) {
    // Which current components merge at this level.
    std::vector<int> touched;
    for (auto [i, j] : pairs) {
      int ri = uf.find(i), rj = uf.find(j);
      if (ri != rj) {
        touched.push_back(ri);
        touched.push_back(rj);
        uf.unite(ri, rj);
      }
    }
    if (touched.empty()) continue;
    // Partition touched components by their new root and create one
    // internal node per merged group (multifurcation when several
    // components meet at the same level).
    std::map<int, std::vector<int>> groups;
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (int r : touched) groups[uf.find(r)].push_back(comp_node[r]);
    for (auto& [root, children] : groups) {
      comp_node[root] = b.add_internal(d, std::move(children));
    }
  }
  return b.build(comp_node[uf.find(0)]);
}

UltrametricMatrixSpace to_matrix(const MergeTree& t) {
  const auto& leaf_idx = t.leaves();
  const int n = t.num_leaves();
  std::vector<std::string> labels(n);
  std::vector<double> mass(n);
  std::vector<int> pos(t.nodes().size(), -1);  // node index -> leaf slot
  for (int a = 0; a < n; ++a) {
    labels[a] = t.node(leaf_idx[a]).label;
    mass[a] = t.node(leaf_idx[a]).mass;
    pos[leaf_idx[a]] = a;
  }
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  // For each internal node, leaves in different children have the node's
  // height as their distance.
  std::vector<std::vector<int>> leaves_below(t.nodes().size());
  // Post-order accumulation.
  std::vector<int> order;
  {
    std::vector<int> stack{t.root()};
    while (!stack.empty()) {
      int i = stack.back();
      stack.pop_back();
      order.push_back(i);
      for (int c : t.node(i).children) stack.push_back(c);
    }
    std::reverse(order.begin(), order.end());  // children before parents
  }
  for (int i : order) {
    if (t.is_leaf(i)) {
      leaves_below[i] = {i};
      continue;
    }
    const auto& ch = t.node(i).children;
    for (std::size_t a = 0; a < ch.size(); ++a)
      for (std::size_t b = a + 1; b < ch.size(); ++b)
        for (int x : leaves_below[ch[a]])
          for (int y : leaves_below[ch[b]]) {
            dist[pos[x]][pos[y]] = t.node(i).height;
            dist[pos[y]][pos[x]] = t.node(i).height;
          }
    for (int c : ch) {
      auto& acc = leaves_below[i];
      acc.insert(acc.end(), leaves_below[c].begin(), leaves_below[c].end());
      leaves_below[c].clear();
    }
  }
  return UltrametricMatrixSpace(std::move(labels), std::move(dist), std::move(mass));
}

}  // namespace ultragen
