#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdpgame/grammar.h"
#include "sdpgame/pivots.h"
#include "sdpgame/real.h"

namespace sdpgame {

// Dense symmetric matrix, row-major, both triangles stored.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int n) : n_(n), a_(static_cast<size_t>(n) * n, Real(0)) {}

  int dim() const { return n_; }
  const Real& operator()(int i, int j) const { return a_[idx(i, j)]; }
  // Writes both (i, j) and (j, i).
  void set(int i, int j, const Real& x) {
    a_[idx(i, j)] = x;
    a_[idx(j, i)] = x;
  }
  void add(int i, int j, const Real& x);
  bool is_zero() const;
  Real frobenius_norm() const;

  static SymMatrix outer(const std::vector<Real>& u, const Real& weight);

 private:
  size_t idx(int i, int j) const { return static_cast<size_t>(i) * n_ + j; }
  int n_ = 0;
  std::vector<Real> a_;
};

// One block's contribution to a row: either weight * u u^T or a dense matrix.
struct BlockTerm {
  int block = 0;
  bool rank_one = false;
  Real weight = 0;
  std::vector<Real> factor;
  SymMatrix dense_matrix;

  SymMatrix dense() const;
  int dim() const;
  // Tr(X * term) for a dense X of matching size.
  Real inner(const SymMatrix& X) const;
};

enum class RowKind { kPivot, kTail, kNormalization };

struct ConstraintRow {
  RowKind kind = RowKind::kPivot;
  std::vector<BlockTerm> terms;
  Real rhs = 0;
};

enum class BlockRole {
  kSentence,
  kFourier,         // transform-side SOS, weight 1
  kFourierShifted,  // transform-side SOS, weight |xi|^2
  kTail,            // tail SOS beyond R, weight 1
  kTailShifted,     // tail SOS beyond R, weight (t - R^2)
};

std::string block_role_name(BlockRole r);

struct BlockInfo {
  int dim = 0;
  BlockRole role = BlockRole::kSentence;
  int monomial = -1;  // sentence index for kSentence blocks
};

struct InstanceMeta {
  int n = 0;
  int d = 0;
  GeometricParams params;
  std::string sentence;
  int K = 0;
  uint64_t seed = 0;
  std::string builder;
  unsigned precision_bits = 0;
  // Pivots of the form (t, t, 0); the polynomial identity on the diagonal is
  // exact when there are at least 2d + 1 of them.
  int diagonal_pivots = 0;
  bool diagonal_exact = false;
};

struct SdpInstance {
  std::vector<BlockInfo> blocks;
  // Homogeneous rows; the first K are the pivot rows in pivot order.
  std::vector<ConstraintRow> rows;
  ConstraintRow normalization;
  // Objective matrix per block; a 0x0 matrix stands for zero.
  std::vector<SymMatrix> objective;
  std::vector<PivotPoint> pivots;
  Sentence sentence;
  InstanceMeta meta;

  int num_blocks() const { return static_cast<int>(blocks.size()); }
  // Homogeneous rows followed by the normalization row.
  int num_rows() const { return static_cast<int>(rows.size()) + 1; }
  const ConstraintRow& row(int k) const {
    return k < static_cast<int>(rows.size()) ? rows[k] : normalization;
  }
  // Throws std::invalid_argument on inconsistent dimensions.
  void validate() const;
};

}  // namespace sdpgame
