#include "baca/clustering.hpp"

#include <algorithm>
#include <numeric>

#include "baca/errors.hpp"

namespace baca {

double BoundingBox::distance(const BoundingBox& o) const {
  const Vec3 gap = (o.lo - hi).cwiseMax(lo - o.hi).cwiseMax(0.0);
  return gap.norm();
}

bool is_admissible(const BoundingBox& t, const BoundingBox& s, double beta) {
  return std::min(t.diameter(), s.diameter()) < beta * t.distance(s);
}

ClusterTree::ClusterTree(std::vector<int> permutation, std::vector<ClusterNode> nodes,
                         int leaf_size)
    : permutation_(std::move(permutation)), nodes_(std::move(nodes)), leaf_size_(leaf_size) {
  for (const auto& n : nodes_) depth_ = std::max(depth_, n.level + 1);
}

ClusterTree build_cluster_tree(const TriMesh& mesh, int b_min) {
  if (b_min < 1) throw PreconditionError("leaf size must be positive");
  const int n = static_cast<int>(mesh.num_triangles());
  if (n < 1) throw PreconditionError("cannot cluster an empty mesh");

  std::vector<Vec3> centroid(n);
  std::vector<BoundingBox> support(n);
  for (int i = 0; i < n; ++i) {
    const auto c = mesh.corners(i);
    centroid[i] = (c[0] + c[1] + c[2]) / 3.0;
    for (const auto& p : c) support[i].extend(p);
  }

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<ClusterNode> nodes;
  nodes.reserve(2 * (n / b_min + 1));

  // iterative to keep node ids in breadth-first order
  nodes.push_back({0, n, -1, -1, 0, {}});
  for (std::size_t id = 0; id < nodes.size(); ++id) {
    ClusterNode node = nodes[id];
    for (int k = node.begin; k < node.end; ++k) {
      node.box.extend(support[perm[k]].lo);
      node.box.extend(support[perm[k]].hi);
    }
    if (node.size() > b_min) {
      const Vec3 ext = node.box.hi - node.box.lo;
      int axis = 0;
      for (int a = 1; a < 3; ++a) {
        if (ext[a] > ext[axis]) axis = a;
      }
      std::sort(perm.begin() + node.begin, perm.begin() + node.end, [&](int a, int b) {
        if (centroid[a][axis] != centroid[b][axis]) return centroid[a][axis] < centroid[b][axis];
        return a < b;
      });
      const int mid = node.begin + node.size() / 2;
      node.left = static_cast<int>(nodes.size());
      node.right = node.left + 1;
      nodes.push_back({node.begin, mid, -1, -1, node.level + 1, {}});
      nodes.push_back({mid, node.end, -1, -1, node.level + 1, {}});
    }
    nodes[id] = node;
  }
  return ClusterTree(std::move(perm), std::move(nodes), b_min);
}

namespace {

void subdivide_block(const ClusterTree& tree, int t, int s, int level, double beta,
                     std::vector<Block>& out) {
  const auto& nt = tree.node(t);
  const auto& ns = tree.node(s);
  if (is_admissible(nt.box, ns.box, beta)) {
    out.push_back({t, s, true, level});
    return;
  }
  if (nt.is_leaf() && ns.is_leaf()) {
    out.push_back({t, s, false, level});
    return;
  }
  const std::array<int, 2> rows = nt.is_leaf() ? std::array{t, -1} : std::array{nt.left, nt.right};
  const std::array<int, 2> cols = ns.is_leaf() ? std::array{s, -1} : std::array{ns.left, ns.right};
  for (int r : rows) {
    if (r < 0) continue;
    for (int c : cols) {
      if (c >= 0) subdivide_block(tree, r, c, level + 1, beta, out);
    }
  }
}

}  // namespace

BlockPartition build_partition(ClusterTree tree, double beta) {
  if (!(beta > 0.0)) throw PreconditionError("admissibility parameter must be positive");
  BlockPartition p;
  p.beta = beta;
  subdivide_block(tree, 0, 0, 0, beta, p.blocks);
  p.tree = std::move(tree);
  const auto stats = partition_stats(p);
  p.depth = stats.depth;
  p.sparsity = stats.sparsity;
  return p;
}

PartitionStats partition_stats(const BlockPartition& p) {
  PartitionStats st;
  std::vector<int> per_row(p.tree.nodes().size(), 0), per_col(p.tree.nodes().size(), 0);
  for (const auto& b : p.blocks) {
    ++per_row[b.row];
    ++per_col[b.col];
    st.depth = std::max(st.depth, b.level + 1);
    if (b.admissible) {
      ++st.admissible;
    } else {
      ++st.non_admissible;
    }
  }
  st.sparsity_rows = *std::max_element(per_row.begin(), per_row.end());
  st.sparsity_cols = *std::max_element(per_col.begin(), per_col.end());
  st.sparsity = std::max(st.sparsity_rows, st.sparsity_cols);
  return st;
}

}  // namespace baca
