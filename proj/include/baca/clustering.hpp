#pragma once

#include <limits>
#include <span>
#include <vector>

#include "baca/mesh.hpp"

namespace baca {

struct BoundingBox {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

  void extend(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  double diameter() const { return (hi - lo).norm(); }
  /// Euclidean norm of the component-wise gap; 0 for overlapping boxes.
  double distance(const BoundingBox& o) const;
};

/// min(diam t, diam s) < beta * dist(t, s), evaluated on the boxes.
bool is_admissible(const BoundingBox& t, const BoundingBox& s, double beta);

struct ClusterNode {
  int begin = 0;  // range [begin, end) into ClusterTree::permutation()
  int end = 0;
  int left = -1;
  int right = -1;
  int level = 0;
  BoundingBox box;  // encloses the supports (whole triangles) of the cluster

  int size() const { return end - begin; }
  bool is_leaf() const { return left < 0; }
};

/// Binary cluster tree over the panel indices. Clusters are contiguous
/// ranges of a permutation of {0, ..., N-1}; node 0 is the root.
class ClusterTree {
 public:
  ClusterTree() = default;
  ClusterTree(std::vector<int> permutation, std::vector<ClusterNode> nodes, int leaf_size);

  const ClusterNode& node(int id) const { return nodes_[id]; }
  const std::vector<ClusterNode>& nodes() const { return nodes_; }
  std::span<const int> indices(int id) const {
    const auto& n = nodes_[id];
    return {permutation_.data() + n.begin, static_cast<std::size_t>(n.size())};
  }
  const std::vector<int>& permutation() const { return permutation_; }
  int size() const { return static_cast<int>(permutation_.size()); }
  int leaf_size() const { return leaf_size_; }
  /// Number of levels (a single leaf has depth 1).
  int depth() const { return depth_; }

 private:
  std::vector<int> permutation_;
  std::vector<ClusterNode> nodes_;
  int leaf_size_ = 1;
  int depth_ = 0;
};

/// Median bisection along the longest box axis until |t| <= b_min.
ClusterTree build_cluster_tree(const TriMesh& mesh, int b_min);

struct Block {
  int row = 0;  // cluster node ids
  int col = 0;
  bool admissible = false;
  int level = 0;  // level in the block cluster tree, root = 0
};

/// Leaves of the block cluster tree.
struct BlockPartition {
  ClusterTree tree;
  std::vector<Block> blocks;
  double beta = 0.0;
  int depth = 0;     // L: number of block-tree levels
  int sparsity = 0;  // c_sp

  int rows(const Block& b) const { return tree.node(b.row).size(); }
  int cols(const Block& b) const { return tree.node(b.col).size(); }
};

BlockPartition build_partition(ClusterTree tree, double beta);

struct PartitionStats {
  int depth = 0;
  int sparsity = 0;
  int sparsity_rows = 0;  // max over row clusters
  int sparsity_cols = 0;  // max over column clusters
  std::size_t admissible = 0;
  std::size_t non_admissible = 0;
};

PartitionStats partition_stats(const BlockPartition& p);

}  // namespace baca
