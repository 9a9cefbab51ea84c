#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "baca/aca.hpp"
#include "baca/clustering.hpp"

namespace baca {

/// Which matrix a product refers to: A_k, the look-ahead \hat A_k, or
/// W_k = A_k - \hat A_k.
enum class MatvecMode { Ak, Ahat, Wk };

/// Rank split of one admissible block: A_k uses factors [0, base), \hat A_k
/// uses [0, ahead); `dense` blocks are exact in both.
struct BlockSplit {
  int base = 0;
  int ahead = 0;
  bool dense = false;
  bool operator==(const BlockSplit&) const = default;
};

/// Hierarchical matrix over a BlockPartition storing only \hat A_k; A_k is
/// described by a per-block rank split. The partition must outlive it.
class HMatrix {
 public:
  /// Computes every non-admissible block entry-wise; admissible blocks start
  /// with rank zero.
  HMatrix(const BlockPartition& partition, EntryOracle oracle, int lookahead = 2,
          int threads = 1);

  const BlockPartition& partition() const { return *partition_; }
  int size() const { return partition_->tree.size(); }
  int lookahead() const { return lookahead_; }
  int threads() const { return threads_; }
  void set_threads(int t) { threads_ = t; }

  /// Admissible blocks ("slots") in partition order.
  int num_admissible() const { return static_cast<int>(lowrank_.size()); }
  const Block& admissible_block(int slot) const { return partition_->blocks[adm_block_[slot]]; }
  const AcaBlockState& aca_state(int slot) const { return lowrank_[slot]; }
  int base_rank(int slot) const { return base_[slot]; }
  BlockSplit split(int slot) const;
  std::vector<BlockSplit> splits() const;
  bool is_terminal(int slot) const { return baca::is_terminal(lowrank_[slot].status()); }

  /// Standalone ACA on every admissible block until its status is terminal;
  /// afterwards A_k = \hat A_k.
  void compress_all(double eps, double beta);

  /// A_0 / \hat A_0: `initial_steps` ACA steps per block, then `lookahead`
  /// more for the look-ahead matrix.
  void initialize(int initial_steps, double eps, double beta);

  /// A_{k+1} takes the current look-ahead on this block; the look-ahead
  /// advances by `lookahead` further steps.
  void refine(int slot, double eps, double beta);
  void refine(const std::vector<int>& slots, double eps, double beta);

  /// Applies one admissible block to x_s under the given split: A_k
  /// (use_ahead = false) or \hat A_k (use_ahead = true).
  Eigen::VectorXd apply_block(int slot, const BlockSplit& split, bool use_ahead,
                              const Eigen::VectorXd& xs) const;

  std::size_t dense_entries() const { return dense_entries_; }
  std::size_t entry_count() const;
  const Eigen::MatrixXd& dense_block(int block_index) const { return dense_[block_index]; }

 private:
  const BlockPartition* partition_;
  EntryOracle oracle_;
  int lookahead_;
  int threads_;
  std::vector<Eigen::MatrixXd> dense_;  // indexed by block index; empty for admissible
  std::vector<AcaBlockState> lowrank_;
  std::vector<int> base_;
  std::vector<int> adm_block_;  // slot -> block index
  std::size_t dense_entries_ = 0;
};

/// y = M x for M = A_k, \hat A_k or W_k. `level` restricts the product to
/// blocks on one level of the block cluster tree.
Eigen::VectorXd matvec(const HMatrix& h, const Eigen::VectorXd& x, MatvecMode mode,
                       std::optional<int> level = std::nullopt);

/// Product with the matrix described by an arbitrary split snapshot.
Eigen::VectorXd matvec_split(const HMatrix& h, const std::vector<BlockSplit>& splits,
                             const Eigen::VectorXd& x, MatvecMode mode);

struct EstimatorContributions {
  std::vector<double> per_block;  // ||(W_k)_ts x_s||_2 per admissible slot
  double eta = 0.0;               // sqrt of the sum of squares
};

EstimatorContributions estimator_contributions(const HMatrix& h, const Eigen::VectorXd& x);

struct StorageStats {
  std::size_t bytes = 0;            // factors of \hat A_k plus dense blocks, 8 bytes per real
  std::size_t bytes_symmetric = 0;  // same, counting only blocks on or above the diagonal
  double compression_percent = 0.0; // bytes / (8 N^2)
  double avg_rank_ak = 0.0;
  double avg_rank_ahat = 0.0;
  std::size_t entries = 0;          // oracle evaluations so far
  std::size_t densified = 0;
};

StorageStats storage_stats(const HMatrix& h);

double frobenius_norm(const HMatrix& h, MatvecMode mode);

}  // namespace baca
