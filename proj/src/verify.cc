#include <Eigen/Dense>
#include <limits>

#include "sdpgame/solver.h"

namespace sdpgame {

namespace {
Real term_norm(const BlockTerm& t) {
  if (t.rank_one) {
    Real s = 0;
    for (const auto& x : t.factor) s += x * x;
    return abs(t.weight) * s;
  }
  return t.dense_matrix.frobenius_norm();
}

long double min_eigenvalue(const SymMatrix& m) {
  const int n = m.dim();
  Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic> a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = to_long_double(m(i, j));
  }
  Eigen::SelfAdjointEigenSolver<decltype(a)> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}
}  // namespace

ResidualReport verify_certificate(const SdpInstance& inst,
                                  const SolverResult& res) {
  if (res.primal_blocks.size() != inst.blocks.size()) {
    throw std::invalid_argument("primal block count " +
                                std::to_string(res.primal_blocks.size()) +
                                " does not match instance block count " +
                                std::to_string(inst.blocks.size()));
  }
  for (size_t b = 0; b < inst.blocks.size(); ++b) {
    if (res.primal_blocks[b].dim() != inst.blocks[b].dim) {
      throw std::invalid_argument("primal block " + std::to_string(b) +
                                  " has the wrong dimension");
    }
  }
  ResidualReport rep;
  Real worst = 0;
  for (int k = 0; k < inst.num_rows(); ++k) {
    const auto& row = inst.row(k);
    Real val = 0, norm2 = 0;
    for (const auto& t : row.terms) {
      val += t.inner(res.primal_blocks[t.block]);
      const Real tn = term_norm(t);
      norm2 += tn * tn;
    }
    const Real norm = sqrt(norm2);
    Real viol = abs(val - row.rhs);
    if (norm > 0) viol /= norm;
    if (viol > worst) worst = viol;
    if (k == inst.num_rows() - 1) rep.normalization_residual = to_double(viol);
  }
  rep.equality_residual = to_double(worst);

  long double lo = std::numeric_limits<long double>::infinity();
  for (const auto& X : res.primal_blocks) {
    if (X.dim() > 0) lo = std::min(lo, min_eigenvalue(X));
  }
  rep.psd_residual = std::isfinite(static_cast<double>(lo)) ? static_cast<double>(lo) : 0.0;

  Real obj = 0;
  for (size_t b = 0; b < inst.blocks.size(); ++b) {
    const SymMatrix& C = inst.objective[b];
    if (C.dim() == 0) continue;
    const SymMatrix& X = res.primal_blocks[b];
    for (int i = 0; i < C.dim(); ++i) {
      for (int j = 0; j < C.dim(); ++j) obj += C(i, j) * X(i, j);
    }
  }
  rep.objective_recomputed = obj;
  return rep;
}

}  // namespace sdpgame
