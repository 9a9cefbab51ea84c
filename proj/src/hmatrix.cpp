#include "baca/hmatrix.hpp"

#include <climits>
#include <cmath>

#include "baca/errors.hpp"
#include "baca/parallel.hpp"

namespace baca {

namespace {

Eigen::VectorXd gather(std::span<const int> idx, const Eigen::VectorXd& x) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out[static_cast<Eigen::Index>(k)] = x[idx[k]];
  return out;
}

void scatter_add(std::span<const int> idx, const Eigen::VectorXd& local, Eigen::VectorXd& y) {
  for (std::size_t k = 0; k < idx.size(); ++k) y[idx[k]] += local[static_cast<Eigen::Index>(k)];
}

}  // namespace

HMatrix::HMatrix(const BlockPartition& partition, EntryOracle oracle, int lookahead, int threads)
    : partition_(&partition), oracle_(std::move(oracle)), lookahead_(lookahead),
      threads_(threads) {
  if (lookahead_ < 1) throw PreconditionError("look-ahead must be at least one ACA step");
  const auto& blocks = partition.blocks;
  const auto& tree = partition.tree;
  dense_.resize(blocks.size());
  std::vector<int> dense_ids;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto rows = tree.indices(blocks[b].row);
    const auto cols = tree.indices(blocks[b].col);
    if (blocks[b].admissible) {
      adm_block_.push_back(static_cast<int>(b));
      lowrank_.emplace_back(std::vector<int>(rows.begin(), rows.end()),
                            std::vector<int>(cols.begin(), cols.end()));
    } else {
      dense_ids.push_back(static_cast<int>(b));
      dense_entries_ += rows.size() * cols.size();
    }
  }
  base_.assign(lowrank_.size(), 0);
  parallel_for(dense_ids.size(), threads_, [&](std::size_t k) {
    const auto& blk = blocks[dense_ids[k]];
    const auto rows = tree.indices(blk.row);
    const auto cols = tree.indices(blk.col);
    Eigen::MatrixXd d(rows.size(), cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
      for (std::size_t i = 0; i < rows.size(); ++i) d(i, j) = oracle_(rows[i], cols[j]);
    }
    dense_[dense_ids[k]] = std::move(d);
  });
}

BlockSplit HMatrix::split(int slot) const {
  const auto& st = lowrank_[slot];
  return {base_[slot], st.rank(), st.status() == AcaStatus::densified};
}

std::vector<BlockSplit> HMatrix::splits() const {
  std::vector<BlockSplit> out(lowrank_.size());
  for (int s = 0; s < num_admissible(); ++s) out[s] = split(s);
  return out;
}

void HMatrix::compress_all(double eps, double beta) {
  parallel_for(lowrank_.size(), threads_, [&](std::size_t s) {
    auto& st = lowrank_[s];
    while (st.status() == AcaStatus::active) aca_advance(st, oracle_, INT_MAX, eps, beta);
    base_[s] = st.rank();
  });
}

void HMatrix::initialize(int initial_steps, double eps, double beta) {
  if (initial_steps < 0) throw PreconditionError("initial ACA steps must be non-negative");
  parallel_for(lowrank_.size(), threads_, [&](std::size_t s) {
    auto& st = lowrank_[s];
    if (initial_steps > 0) aca_advance(st, oracle_, initial_steps, eps, beta);
    base_[s] = st.rank();
    if (st.status() == AcaStatus::active) aca_advance(st, oracle_, lookahead_, eps, beta);
    if (baca::is_terminal(st.status())) base_[s] = st.rank();
  });
}

void HMatrix::refine(int slot, double eps, double beta) {
  auto& st = lowrank_[slot];
  if (baca::is_terminal(st.status())) return;
  base_[slot] = st.rank();
  aca_advance(st, oracle_, lookahead_, eps, beta);
  if (baca::is_terminal(st.status())) base_[slot] = st.rank();
}

void HMatrix::refine(const std::vector<int>& slots, double eps, double beta) {
  parallel_for(slots.size(), threads_, [&](std::size_t k) { refine(slots[k], eps, beta); });
}

Eigen::VectorXd HMatrix::apply_block(int slot, const BlockSplit& split, bool use_ahead,
                                     const Eigen::VectorXd& xs) const {
  const auto& st = lowrank_[slot];
  if (split.dense) return st.dense() * xs;
  return apply_partial(st, xs, 0, use_ahead ? split.ahead : split.base);
}

std::size_t HMatrix::entry_count() const {
  std::size_t n = dense_entries_;
  for (const auto& st : lowrank_) n += st.entries();
  return n;
}

namespace {

Eigen::VectorXd matvec_impl(const HMatrix& h, const std::vector<BlockSplit>* snapshot,
                            const Eigen::VectorXd& x, MatvecMode mode, std::optional<int> level) {
  if (x.size() != h.size()) throw DimensionError("matvec: vector length differs from N");
  const auto& p = h.partition();
  const auto& tree = p.tree;
  const int nb = static_cast<int>(p.blocks.size());

  // slot lookup in partition order
  std::vector<int> slot_of(nb, -1);
  for (int s = 0; s < h.num_admissible(); ++s) {
    slot_of[&h.admissible_block(s) - p.blocks.data()] = s;
  }

  auto local_product = [&](int b) -> std::optional<Eigen::VectorXd> {
    const auto& blk = p.blocks[b];
    if (level && blk.level != *level) return std::nullopt;
    const auto xs = gather(tree.indices(blk.col), x);
    if (!blk.admissible) {
      if (mode == MatvecMode::Wk) return std::nullopt;
      return Eigen::VectorXd(h.dense_block(b) * xs);
    }
    const int s = slot_of[b];
    const BlockSplit sp = snapshot ? (*snapshot)[s] : h.split(s);
    switch (mode) {
      case MatvecMode::Ak: return h.apply_block(s, sp, false, xs);
      case MatvecMode::Ahat: return h.apply_block(s, sp, true, xs);
      case MatvecMode::Wk:
        if (sp.dense || sp.base == sp.ahead) return std::nullopt;
        return Eigen::VectorXd(-apply_partial(h.aca_state(s), xs, sp.base, sp.ahead));
    }
    return std::nullopt;
  };

  Eigen::VectorXd y = Eigen::VectorXd::Zero(x.size());
  if (h.threads() <= 1) {
    for (int b = 0; b < nb; ++b) {
      if (auto loc = local_product(b)) scatter_add(tree.indices(p.blocks[b].row), *loc, y);
    }
    return y;
  }
  // same accumulation order as the sequential path
  std::vector<std::optional<Eigen::VectorXd>> parts(nb);
  parallel_for(nb, h.threads(), [&](std::size_t b) { parts[b] = local_product(static_cast<int>(b)); });
  for (int b = 0; b < nb; ++b) {
    if (parts[b]) scatter_add(tree.indices(p.blocks[b].row), *parts[b], y);
  }
  return y;
}

}  // namespace

Eigen::VectorXd matvec(const HMatrix& h, const Eigen::VectorXd& x, MatvecMode mode,
                       std::optional<int> level) {
  return matvec_impl(h, nullptr, x, mode, level);
}

Eigen::VectorXd matvec_split(const HMatrix& h, const std::vector<BlockSplit>& splits,
                             const Eigen::VectorXd& x, MatvecMode mode) {
  if (static_cast<int>(splits.size()) != h.num_admissible()) {
    throw DimensionError("split snapshot does not match the admissible block count");
  }
  return matvec_impl(h, &splits, x, mode, std::nullopt);
}

EstimatorContributions estimator_contributions(const HMatrix& h, const Eigen::VectorXd& x) {
  if (x.size() != h.size()) throw DimensionError("estimator: vector length differs from N");
  EstimatorContributions out;
  out.per_block.assign(h.num_admissible(), 0.0);
  const auto& tree = h.partition().tree;
  parallel_for(h.num_admissible(), h.threads(), [&](std::size_t s) {
    const int slot = static_cast<int>(s);
    const BlockSplit sp = h.split(slot);
    if (sp.dense || sp.base == sp.ahead) return;
    const auto xs = gather(tree.indices(h.admissible_block(slot).col), x);
    out.per_block[s] = apply_partial(h.aca_state(slot), xs, sp.base, sp.ahead).norm();
  });
  double sum = 0.0;
  for (double c : out.per_block) sum += c * c;
  out.eta = std::sqrt(sum);
  return out;
}

StorageStats storage_stats(const HMatrix& h) {
  StorageStats st;
  const auto& p = h.partition();
  const auto& tree = p.tree;
  auto upper = [&](const Block& b) { return tree.node(b.row).begin <= tree.node(b.col).begin; };
  std::size_t rank_ak = 0, rank_ahat = 0;
  for (const auto& b : p.blocks) {
    if (b.admissible) continue;
    const std::size_t bytes = 8ull * p.rows(b) * p.cols(b);
    st.bytes += bytes;
    if (upper(b)) st.bytes_symmetric += bytes;
  }
  for (int s = 0; s < h.num_admissible(); ++s) {
    const auto& b = h.admissible_block(s);
    const auto sp = h.split(s);
    const std::size_t m = p.rows(b), n = p.cols(b);
    std::size_t bytes = 0;
    if (sp.dense) {
      bytes = 8 * m * n;
      rank_ak += std::min(m, n);
      rank_ahat += std::min(m, n);
      ++st.densified;
    } else {
      bytes = 8 * static_cast<std::size_t>(sp.ahead) * (m + n);
      rank_ak += sp.base;
      rank_ahat += sp.ahead;
    }
    st.bytes += bytes;
    if (upper(b)) st.bytes_symmetric += bytes;
  }
  const double n = h.size();
  st.compression_percent = 100.0 * static_cast<double>(st.bytes) / (8.0 * n * n);
  if (h.num_admissible() > 0) {
    st.avg_rank_ak = static_cast<double>(rank_ak) / h.num_admissible();
    st.avg_rank_ahat = static_cast<double>(rank_ahat) / h.num_admissible();
  }
  st.entries = h.entry_count();
  return st;
}

double frobenius_norm(const HMatrix& h, MatvecMode mode) {
  const auto& p = h.partition();
  double sum = 0.0;
  if (mode != MatvecMode::Wk) {
    for (std::size_t b = 0; b < p.blocks.size(); ++b) {
      if (!p.blocks[b].admissible) sum += h.dense_block(static_cast<int>(b)).squaredNorm();
    }
  }
  for (int s = 0; s < h.num_admissible(); ++s) {
    const auto sp = h.split(s);
    const auto& st = h.aca_state(s);
    if (sp.dense) {
      if (mode != MatvecMode::Wk) sum += st.dense().squaredNorm();
      continue;
    }
    switch (mode) {
      case MatvecMode::Ak: sum += partial_frobenius_sq(st, 0, sp.base); break;
      case MatvecMode::Ahat: sum += partial_frobenius_sq(st, 0, sp.ahead); break;
      case MatvecMode::Wk: sum += partial_frobenius_sq(st, sp.base, sp.ahead); break;
    }
  }
  return std::sqrt(std::max(sum, 0.0));
}

}  // namespace baca
