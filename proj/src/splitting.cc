#include <cmath>
#include <limits>

#include "problem.h"

namespace sdpgame::detail {

namespace {
template <class S>
Mat<S> project_psd(const Mat<S>& A) {
  if (A.size() == 0) return A;
  Eigen::SelfAdjointEigenSolver<Mat<S>> es(S(0.5) * (A + A.transpose()));
  const Vec<S> lam = es.eigenvalues().cwiseMax(S(0));
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

template <class S>
S term_pair(const Term<S>& a, const Term<S>& b) {
  if (a.rank_one && b.rank_one) {
    const S d = a.u.dot(b.u);
    return a.weight * b.weight * d * d;
  }
  if (a.rank_one) return a.weight * a.u.dot(b.A * a.u);
  if (b.rank_one) return b.weight * b.u.dot(a.A * b.u);
  return (a.A.array() * b.A.array()).sum();
}
}  // namespace

template <class S>
MethodOutput<S> splitting_method(const Problem<S>& p, const SolverSettings& s,
                                 S internal_tol) {
  MethodOutput<S> out;
  const int nb = static_cast<int>(p.dims.size());
  const int m = p.m();

  Mat<S> G = Mat<S>::Zero(m, m);
  for (int k = 0; k < m; ++k) {
    for (int l = k; l < m; ++l) {
      S v = 0;
      for (const auto& a : p.rows[k]) {
        for (const auto& b : p.rows[l]) {
          if (a.block == b.block) v += term_pair(a, b);
        }
      }
      G(k, l) = G(l, k) = v;
    }
  }
  Eigen::LLT<Mat<S>> gram(G);
  if (m > 0 && gram.info() != Eigen::Success) {
    out.status = SolveStatus::kNumericFailure;
    out.message = "row Gram matrix is singular (redundant pivots)";
    for (int d : p.dims) out.X.push_back(Mat<S>::Zero(d, d));
    return out;
  }

  std::vector<Mat<S>> X(nb), Y(nb), U(nb);
  for (int b = 0; b < nb; ++b) {
    X[b] = Y[b] = U[b] = Mat<S>::Zero(p.dims[b], p.dims[b]);
  }
  S rho = static_cast<S>(s.rho);
  const S tol = static_cast<S>(s.tol_eq);
  S best = std::numeric_limits<S>::infinity();
  std::vector<Mat<S>> bestY = Y;

  for (int it = 0;; ++it) {
    out.iterations = it;
    const Vec<S> rp = p.b - apply_rows(p, Y);
    const S pres = row_residual(p, rp);
    if (pres < best) {
      best = pres;
      bestY = Y;
    }
    if (it % 50 == 0) out.checkpoints.push_back({it, static_cast<double>(best)});
    if (it >= s.max_iterations) {
      out.status = SolveStatus::kMaxIterations;
      out.message = "iteration limit";
      break;
    }

    std::vector<Mat<S>> V(nb);
    for (int b = 0; b < nb; ++b) V[b] = Y[b] - U[b] - p.C[b] / rho;
    const Vec<S> corr = m > 0 ? Vec<S>(gram.solve(apply_rows(p, V) - p.b)) : Vec<S>();
    const auto AT = m > 0 ? apply_adjoint(p, corr) : V;
    S prim = 0, dual = 0, ynorm = 0;
    for (int b = 0; b < nb; ++b) {
      X[b] = m > 0 ? Mat<S>(V[b] - AT[b]) : V[b];
      const Mat<S> Yold = Y[b];
      Y[b] = project_psd<S>(X[b] + U[b]);
      U[b] += X[b] - Y[b];
      prim += (X[b] - Y[b]).squaredNorm();
      dual += (Y[b] - Yold).squaredNorm();
      ynorm += Y[b].squaredNorm();
    }
    prim = sqrt(prim) / (S(1) + sqrt(ynorm));
    dual = rho * sqrt(dual) / (S(1) + sqrt(ynorm));
    if (!isfinite(static_cast<double>(prim + dual))) {
      out.status = SolveStatus::kNumericFailure;
      out.message = "non-finite iterate";
      break;
    }
    if (pres <= internal_tol && prim <= tol && dual <= tol && it > 0) {
      out.converged = true;
      out.status = SolveStatus::kConverged;
      break;
    }
    if (it % 50 == 49) {
      if (prim > 10 * dual) {
        rho *= 2;
        for (auto& u : U) u /= S(2);
      } else if (dual > 10 * prim) {
        rho /= 2;
        for (auto& u : U) u *= S(2);
      }
    }
  }
  out.X = out.converged ? Y : bestY;
  out.pobj = inner(p.C, out.X);
  out.dobj = out.pobj;
  out.checkpoints.push_back({out.iterations, static_cast<double>(best)});
  if (out.message.empty()) out.message = "splitting method (no dual bound)";
  return out;
}

template MethodOutput<double> splitting_method<double>(const Problem<double>&,
                                                       const SolverSettings&, double);
template MethodOutput<long double> splitting_method<long double>(
    const Problem<long double>&, const SolverSettings&, long double);
template MethodOutput<Quad> splitting_method<Quad>(const Problem<Quad>&, const SolverSettings&,
                                                   Quad);

}  // namespace sdpgame::detail
