#include "problem.h"

#include <cmath>
#include <type_traits>

namespace sdpgame::detail {

namespace {
template <class S>
S cv(const Real& x) {
  if constexpr (std::is_same_v<S, Quad>) {
    // Two long double limbs carry the full quad mantissa.
    const long double hi = x.convert_to<long double>();
    const long double lo = Real(x - Real(hi)).convert_to<long double>();
    return Quad(hi) + Quad(lo);
  } else {
    return x.convert_to<S>();
  }
}

template <class S>
Mat<S> to_mat(const SymMatrix& m) {
  Mat<S> out(m.dim(), m.dim());
  for (int i = 0; i < m.dim(); ++i) {
    for (int j = 0; j < m.dim(); ++j) out(i, j) = cv<S>(m(i, j));
  }
  return out;
}

template <class S>
S term_norm(const Term<S>& t) {
  return t.rank_one ? abs(t.weight) * t.u.squaredNorm() : t.A.norm();
}

// Columns spanning the range of a symmetric matrix, scaled by sqrt|lambda|
// relative to the largest eigenvalue.
template <class S>
void append_range(const Mat<S>& A, std::vector<Vec<S>>& cols) {
  if (A.size() == 0) return;
  Eigen::SelfAdjointEigenSolver<Mat<S>> es(A);
  const S top = es.eigenvalues().cwiseAbs().maxCoeff();
  if (!(top > 0)) return;
  for (int i = 0; i < A.rows(); ++i) {
    const S lam = abs(es.eigenvalues()(i)) / top;
    if (lam > S(1e-14)) cols.push_back(es.eigenvectors().col(i) * sqrt(lam));
  }
}

template <class S>
void svec_append(const Mat<S>& A, S scale, std::vector<S>& out) {
  const S r2 = sqrt(S(2));
  for (int j = 0; j < A.cols(); ++j) {
    for (int i = 0; i <= j; ++i) out.push_back(scale * (i == j ? A(i, i) : r2 * A(i, j)));
  }
}
}  // namespace

template <class S>
Problem<S> build_problem(const SdpInstance& inst, S rank_tol) {
  inst.validate();
  Problem<S> p;
  const int nb = inst.num_blocks();
  const int m0 = inst.num_rows();

  // Raw rows in the original coordinates.
  std::vector<std::vector<Term<S>>> raw(m0);
  std::vector<S> raw_norm(m0, S(0));
  Vec<S> raw_b(m0);
  for (int k = 0; k < m0; ++k) {
    const auto& row = inst.row(k);
    raw_b(k) = cv<S>(row.rhs);
    for (const auto& t : row.terms) {
      Term<S> q;
      q.block = t.block;
      q.rank_one = t.rank_one;
      if (t.rank_one) {
        q.weight = cv<S>(t.weight);
        q.u.resize(t.factor.size());
        for (size_t i = 0; i < t.factor.size(); ++i) q.u(i) = cv<S>(t.factor[i]);
        if (q.weight == 0 || q.u.squaredNorm() == 0) continue;
      } else {
        q.A = to_mat<S>(t.dense_matrix);
        if (q.A.norm() == 0) continue;
      }
      raw_norm[k] += term_norm(q) * term_norm(q);
      raw[k].push_back(std::move(q));
    }
    raw_norm[k] = sqrt(raw_norm[k]);
  }

  // Congruence per block.
  p.congruence.resize(nb);
  p.dims.resize(nb);
  std::vector<Mat<S>> C0(nb);
  for (int b = 0; b < nb; ++b) {
    const int n = inst.blocks[b].dim;
    std::vector<Vec<S>> cols;
    for (const auto& row : raw) {
      for (const auto& t : row) {
        if (t.block != b) continue;
        if (t.rank_one) {
          cols.push_back(t.u / t.u.norm());
        } else {
          append_range<S>(t.A, cols);
        }
      }
    }
    C0[b] = inst.objective[b].dim() ? to_mat<S>(inst.objective[b]) : Mat<S>::Zero(n, n);
    append_range<S>(C0[b], cols);
    if (cols.empty()) {
      p.congruence[b] = Mat<S>::Zero(n, 0);
      p.dims[b] = 0;
      continue;
    }
    Mat<S> G(n, static_cast<int>(cols.size()));
    for (size_t j = 0; j < cols.size(); ++j) G.col(j) = cols[j];
    Eigen::JacobiSVD<Mat<S>> svd(G, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    int r = 0;
    while (r < sv.size() && sv(r) > rank_tol * sv(0)) ++r;
    p.congruence[b] = svd.matrixU().leftCols(r) *
                      sv.head(r).cwiseInverse().asDiagonal();
    p.dims[b] = r;
  }

  // Transform and normalize rows.
  std::vector<std::vector<Term<S>>> rows(m0);
  std::vector<S> scale(m0, S(0));
  for (int k = 0; k < m0; ++k) {
    for (auto t : raw[k]) {
      const Mat<S>& Sb = p.congruence[t.block];
      if (Sb.cols() == 0) continue;
      if (t.rank_one) {
        t.u = Sb.transpose() * t.u;
      } else {
        t.A = Sb.transpose() * t.A * Sb;
      }
      scale[k] += term_norm(t) * term_norm(t);
      rows[k].push_back(std::move(t));
    }
    scale[k] = sqrt(scale[k]);
  }

  // Dependent rows through a pivoted QR of the stacked svec vectors.
  std::vector<int> candidates;
  for (int k = 0; k < m0; ++k) {
    if (scale[k] > 0) {
      candidates.push_back(k);
    } else if (raw_b(k) != 0) {
      p.inconsistent = true;
      p.message = "row " + std::to_string(k) + " has no support but rhs != 0";
      return p;
    }
  }
  std::vector<std::vector<S>> sv_rows;
  for (int k : candidates) {
    std::vector<S> v;
    for (int b = 0; b < nb; ++b) {
      Mat<S> acc = Mat<S>::Zero(p.dims[b], p.dims[b]);
      bool any = false;
      for (const auto& t : rows[k]) {
        if (t.block != b) continue;
        any = true;
        if (t.rank_one) {
          acc += t.weight * t.u * t.u.transpose();
        } else {
          acc += t.A;
        }
      }
      if (!any) acc.setZero();
      svec_append<S>(acc, S(1) / scale[k], v);
    }
    sv_rows.push_back(std::move(v));
  }
  const int mc = static_cast<int>(candidates.size());
  const int N = mc ? static_cast<int>(sv_rows[0].size()) : 0;
  Mat<S> At(N, mc);
  for (int j = 0; j < mc; ++j) {
    for (int i = 0; i < N; ++i) At(i, j) = sv_rows[j][i];
  }
  std::vector<int> keep;
  if (mc > 0) {
    Eigen::ColPivHouseholderQR<Mat<S>> qr(At);
    qr.setThreshold(S(1e-11));
    const int rank = static_cast<int>(qr.rank());
    const auto& perm = qr.colsPermutation().indices();
    std::vector<int> kept_cols, dropped_cols;
    for (int j = 0; j < mc; ++j) (j < rank ? kept_cols : dropped_cols).push_back(perm(j));
    std::sort(kept_cols.begin(), kept_cols.end());
    if (!dropped_cols.empty()) {
      Mat<S> K(N, rank);
      Vec<S> bk(rank);
      for (int j = 0; j < rank; ++j) {
        K.col(j) = At.col(kept_cols[j]);
        bk(j) = raw_b(candidates[kept_cols[j]]) / scale[candidates[kept_cols[j]]];
      }
      Eigen::ColPivHouseholderQR<Mat<S>> kq(K);
      for (int j : dropped_cols) {
        const int k = candidates[j];
        const Vec<S> c = kq.solve(At.col(j));
        const S pred = c.dot(bk);
        const S actual = raw_b(k) / scale[k];
        if (abs(pred - actual) > S(1e-8) * (S(1) + abs(actual))) {
          p.inconsistent = true;
          p.message = "row " + std::to_string(k) +
                      " is a combination of other rows with a different rhs";
          return p;
        }
      }
    }
    for (int j : kept_cols) keep.push_back(candidates[j]);
    p.dropped_rows = static_cast<int>(dropped_cols.size());
  }

  p.b.resize(static_cast<int>(keep.size()));
  for (size_t i = 0; i < keep.size(); ++i) {
    const int k = keep[i];
    for (auto& t : rows[k]) {
      if (t.rank_one) {
        t.weight /= scale[k];
      } else {
        t.A /= scale[k];
      }
    }
    p.rows.push_back(std::move(rows[k]));
    p.row_origin.push_back(k);
    p.b(static_cast<int>(i)) = raw_b(k) / scale[k];
    p.residual_factor.push_back(scale[k] / std::max(raw_norm[k], S(1e-300)));
  }

  S cnorm = 0;
  p.C.resize(nb);
  for (int b = 0; b < nb; ++b) {
    const Mat<S>& Sb = p.congruence[b];
    p.C[b] = Sb.transpose() * C0[b] * Sb;
    cnorm += p.C[b].squaredNorm();
  }
  cnorm = sqrt(cnorm);
  p.objective_scale = cnorm > 0 ? cnorm : S(1);
  for (auto& c : p.C) c /= p.objective_scale;
  return p;
}

template <class S>
Vec<S> apply_rows(const Problem<S>& p, const std::vector<Mat<S>>& X) {
  Vec<S> out(p.m());
  for (int k = 0; k < p.m(); ++k) {
    S s = 0;
    for (const auto& t : p.rows[k]) {
      const Mat<S>& Xb = X[t.block];
      if (t.rank_one) {
        s += t.weight * t.u.dot(Xb * t.u);
      } else {
        s += (t.A.array() * Xb.array()).sum();
      }
    }
    out(k) = s;
  }
  return out;
}

template <class S>
std::vector<Mat<S>> apply_adjoint(const Problem<S>& p, const Vec<S>& y) {
  std::vector<Mat<S>> out;
  for (int d : p.dims) out.push_back(Mat<S>::Zero(d, d));
  for (int k = 0; k < p.m(); ++k) {
    for (const auto& t : p.rows[k]) {
      if (t.rank_one) {
        out[t.block].noalias() += (y(k) * t.weight) * t.u * t.u.transpose();
      } else {
        out[t.block] += y(k) * t.A;
      }
    }
  }
  return out;
}

template <class S>
S inner(const std::vector<Mat<S>>& A, const std::vector<Mat<S>>& B) {
  S s = 0;
  for (size_t b = 0; b < A.size(); ++b) s += (A[b].array() * B[b].array()).sum();
  return s;
}

template <class S>
std::vector<SymMatrix> expand_primal(const Problem<S>& p,
                                     const std::vector<Mat<S>>& X) {
  std::vector<SymMatrix> out;
  for (size_t b = 0; b < X.size(); ++b) {
    const Mat<S>& Sb = p.congruence[b];
    const int n = static_cast<int>(Sb.rows());
    SymMatrix m(n);
    if (Sb.cols() > 0) {
      const Mat<S> full = Sb * X[b] * Sb.transpose();
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
          m.set(i, j, Real(static_cast<long double>(S(0.5) * (full(i, j) + full(j, i)))));
        }
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

template <class S>
S row_residual(const Problem<S>& p, const Vec<S>& rp) {
  S worst = 0;
  for (int k = 0; k < p.m(); ++k) {
    worst = std::max(worst, abs(rp(k)) * p.residual_factor[k]);
  }
  return worst;
}

#define SDPGAME_INSTANTIATE(S)                                                    \
  template Problem<S> build_problem<S>(const SdpInstance&, S);                   \
  template Vec<S> apply_rows<S>(const Problem<S>&, const std::vector<Mat<S>>&); \
  template std::vector<Mat<S>> apply_adjoint<S>(const Problem<S>&, const Vec<S>&); \
  template S inner<S>(const std::vector<Mat<S>>&, const std::vector<Mat<S>>&);  \
  template std::vector<SymMatrix> expand_primal<S>(const Problem<S>&,           \
                                                   const std::vector<Mat<S>>&); \
  template S row_residual<S>(const Problem<S>&, const Vec<S>&);

SDPGAME_INSTANTIATE(double)
SDPGAME_INSTANTIATE(long double)
SDPGAME_INSTANTIATE(Quad)

#undef SDPGAME_INSTANTIATE

}  // namespace sdpgame::detail
