// Infeasible primal-dual interior point method with the HKM search direction
// and Mehrotra predictor-corrector steps.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "problem.h"
#include "sdpgame/solver.h"

namespace sdpgame {

namespace detail {

namespace {

template <class S>
struct BlockIndex {
  // Rank-one terms: row ids, weights, stacked vectors.
  std::vector<int> r1_rows;
  Vec<S> r1_w;
  Mat<S> U;
  // Dense terms.
  std::vector<int> d_rows;
  std::vector<const Mat<S>*> d_mats;
};

template <class S>
std::vector<BlockIndex<S>> index_blocks(const Problem<S>& p) {
  std::vector<BlockIndex<S>> out(p.dims.size());
  std::vector<std::vector<const Term<S>*>> r1(p.dims.size());
  for (int k = 0; k < p.m(); ++k) {
    for (const auto& t : p.rows[k]) {
      if (t.rank_one) {
        out[t.block].r1_rows.push_back(k);
        r1[t.block].push_back(&t);
      } else {
        out[t.block].d_rows.push_back(k);
        out[t.block].d_mats.push_back(&t.A);
      }
    }
  }
  for (size_t b = 0; b < out.size(); ++b) {
    const int cnt = static_cast<int>(r1[b].size());
    out[b].r1_w.resize(cnt);
    out[b].U.resize(p.dims[b], cnt);
    for (int j = 0; j < cnt; ++j) {
      out[b].r1_w(j) = r1[b][j]->weight;
      out[b].U.col(j) = r1[b][j]->u;
    }
  }
  return out;
}

// M_kl = sum_b Tr(A_kb X_b A_lb Zi_b).
template <class S>
Mat<S> schur(const Problem<S>& p, const std::vector<BlockIndex<S>>& idx,
             const std::vector<Mat<S>>& X, const std::vector<Mat<S>>& Zi) {
  Mat<S> M = Mat<S>::Zero(p.m(), p.m());
  for (size_t b = 0; b < idx.size(); ++b) {
    const auto& bi = idx[b];
    if (p.dims[b] == 0) continue;
    const int c1 = static_cast<int>(bi.r1_rows.size());
    Mat<S> XU, ZU;
    if (c1 > 0) {
      XU = X[b] * bi.U;
      ZU = Zi[b] * bi.U;
      const Mat<S> GX = bi.U.transpose() * XU;
      const Mat<S> GZ = bi.U.transpose() * ZU;
      for (int i = 0; i < c1; ++i) {
        for (int j = 0; j < c1; ++j) {
          M(bi.r1_rows[i], bi.r1_rows[j]) +=
              bi.r1_w(i) * bi.r1_w(j) * GX(i, j) * GZ(i, j);
        }
      }
    }
    for (size_t a = 0; a < bi.d_rows.size(); ++a) {
      const int k = bi.d_rows[a];
      const Mat<S> Q = X[b] * (*bi.d_mats[a]) * Zi[b];
      if (c1 > 0) {
        const Mat<S> QU = Q * bi.U;
        for (int j = 0; j < c1; ++j) {
          const S v = bi.r1_w(j) * bi.U.col(j).dot(QU.col(j));
          M(k, bi.r1_rows[j]) += v;
          M(bi.r1_rows[j], k) += v;
        }
      }
      for (size_t c = 0; c < bi.d_rows.size(); ++c) {
        M(k, bi.d_rows[c]) += (bi.d_mats[c]->array() * Q.array()).sum();
      }
    }
  }
  return S(0.5) * (M + M.transpose());
}

template <class S>
S max_step(const std::vector<Mat<S>>& X, const std::vector<Mat<S>>& dX) {
  S alpha = std::numeric_limits<S>::infinity();
  for (size_t b = 0; b < X.size(); ++b) {
    if (X[b].size() == 0) continue;
    Eigen::LLT<Mat<S>> llt(X[b]);
    if (llt.info() != Eigen::Success) return S(0);
    Mat<S> T = llt.matrixL().solve(dX[b]);
    T = llt.matrixL().solve(T.transpose()).transpose();
    Eigen::SelfAdjointEigenSolver<Mat<S>> es(S(0.5) * (T + T.transpose()),
                                             Eigen::EigenvaluesOnly);
    const S lo = es.eigenvalues()(0);
    if (lo < 0) alpha = std::min(alpha, -S(1) / lo);
  }
  return alpha;
}

template <class S>
std::vector<Mat<S>> axpy(const std::vector<Mat<S>>& X, S a,
                         const std::vector<Mat<S>>& D) {
  std::vector<Mat<S>> out = X;
  for (size_t b = 0; b < X.size(); ++b) out[b] += a * D[b];
  return out;
}

template <class S>
S frob(const std::vector<Mat<S>>& X) {
  S s = 0;
  for (const auto& m : X) s += m.squaredNorm();
  return sqrt(s);
}

// A feasible iterate whose gap is within this factor of tol_gap is accepted
// when the method stops making progress.
constexpr double kStalledGapFactor = 100;

template <class S>
MethodOutput<S> interior_point(const Problem<S>& p, const SolverSettings& s,
                               S internal_tol) {
  MethodOutput<S> out;
  const int nb = static_cast<int>(p.dims.size());
  const int n = p.total_dim();
  const auto idx = index_blocks(p);

  std::vector<Mat<S>> X(nb), Z(nb);
  for (int b = 0; b < nb; ++b) {
    const S scale = std::max(S(1), sqrt(static_cast<S>(p.dims[b])));
    X[b] = scale * Mat<S>::Identity(p.dims[b], p.dims[b]);
    Z[b] = scale * Mat<S>::Identity(p.dims[b], p.dims[b]);
  }
  Vec<S> y = Vec<S>::Zero(p.m());

  const S cnorm = frob(p.C);
  const S tol_gap = static_cast<S>(s.tol_gap);
  const S tol_d = static_cast<S>(s.tol_eq);

  S best_merit = std::numeric_limits<S>::infinity();
  S best_eq = std::numeric_limits<S>::infinity();
  std::vector<Mat<S>> bestX = X;
  S best_p = 0, best_d = 0;
  int stall = 0;
  // Best primal-dual feasible iterate by gap, used when progress stops short
  // of tol_gap.
  S feas_gap = std::numeric_limits<S>::infinity();
  std::vector<Mat<S>> feasX;
  S feas_p = 0, feas_d = 0;
  S merit_mark = std::numeric_limits<S>::infinity();
  int merit_it = 0;

  for (int it = 0;; ++it) {
    const Vec<S> rp = p.b - apply_rows(p, X);
    const auto ATy = apply_adjoint(p, y);
    std::vector<Mat<S>> Rd(nb);
    for (int b = 0; b < nb; ++b) Rd[b] = p.C[b] - ATy[b] - Z[b];
    const S pobj = inner(p.C, X);
    const S dobj = p.b.dot(y);
    const S mu = n > 0 ? inner(X, Z) / n : S(0);
    const S pres = row_residual(p, rp);
    const S dres = frob(Rd) / (S(1) + cnorm);
    const S gap = abs(pobj - dobj) / (S(1) + abs(pobj) + abs(dobj));

    if (!isfinite(static_cast<double>(pobj)) ||
        !isfinite(static_cast<double>(dobj))) {
      out.status = SolveStatus::kNumericFailure;
      out.message = "non-finite iterate";
      break;
    }
    const S merit = std::max({pres / internal_tol, dres / tol_d, gap / tol_gap});
    if (merit < best_merit) {
      best_merit = merit;
      bestX = X;
      best_p = pobj;
      best_d = dobj;
    }
    best_eq = std::min(best_eq, pres);
    if (pres <= internal_tol && dres <= tol_d && gap < feas_gap) {
      feas_gap = gap;
      feasX = X;
      feas_p = pobj;
      feas_d = dobj;
    }
    if (best_merit < S(0.9) * merit_mark) {
      merit_mark = best_merit;
      merit_it = it;
    } else if (it - merit_it >= 40) {
      out.status = SolveStatus::kNumericFailure;
      out.message = "progress stalled";
      break;
    }
    if (it % 5 == 0) out.checkpoints.push_back({it, static_cast<double>(best_eq)});
    out.iterations = it;

    if (pres <= internal_tol && dres <= tol_d && gap <= tol_gap) {
      out.converged = true;
      out.status = SolveStatus::kConverged;
      break;
    }
    // Farkas-type certificates: b.y -> +inf with A^T y + Z bounded means the
    // primal is infeasible; <C, X> -> -inf with A(X) bounded means unbounded.
    if (dobj > 0 && frob(axpy(ATy, S(1), Z)) < S(1e-8) * dobj) {
      out.status = SolveStatus::kInfeasible;
      out.message = "primal infeasible (dual ray)";
      break;
    }
    if (pobj < 0 && (p.b - rp).norm() < S(1e-8) * (-pobj)) {
      out.status = SolveStatus::kInfeasible;
      out.message = "dual infeasible (primal ray)";
      break;
    }
    if (frob(X) > S(1e25) || frob(Z) > S(1e25) || y.norm() > S(1e25)) {
      out.status = SolveStatus::kNumericFailure;
      out.message = "iterates diverged";
      break;
    }
    if (it >= s.max_iterations) {
      out.status = SolveStatus::kMaxIterations;
      out.message = "iteration limit";
      break;
    }

    std::vector<Mat<S>> Zi(nb);
    bool ok = true;
    for (int b = 0; b < nb; ++b) {
      Eigen::LLT<Mat<S>> llt(Z[b]);
      if (llt.info() != Eigen::Success) ok = false;
      Zi[b] = llt.solve(Mat<S>::Identity(p.dims[b], p.dims[b]));
      Zi[b] = S(0.5) * (Zi[b] + Zi[b].transpose());
    }
    if (!ok) {
      out.status = SolveStatus::kNumericFailure;
      out.message = "dual slack lost definiteness";
      break;
    }
    Mat<S> M = schur(p, idx, X, Zi);
    Eigen::LLT<Mat<S>> mchol(M);
    if (mchol.info() != Eigen::Success) {
      const S ridge = M.diagonal().cwiseAbs().maxCoeff() * S(1e-15);
      M.diagonal().array() += ridge;
      mchol.compute(M);
    }
    Eigen::LDLT<Mat<S>> mldlt;
    const bool use_ldlt = mchol.info() != Eigen::Success;
    if (use_ldlt) {
      mldlt.compute(M);
      if (mldlt.info() != Eigen::Success) {
        out.status = SolveStatus::kNumericFailure;
        out.message = "Schur complement factorization failed";
        break;
      }
    }
    auto solveM = [&](const Vec<S>& r) -> Vec<S> {
      return use_ldlt ? Vec<S>(mldlt.solve(r)) : Vec<S>(mchol.solve(r));
    };

    std::vector<Mat<S>> XRdZi(nb);
    for (int b = 0; b < nb; ++b) XRdZi[b] = X[b] * Rd[b] * Zi[b];
    const Vec<S> base_rhs = rp + apply_rows(p, XRdZi);

    // G = sigma mu Zi - X - corr Zi; direction from M dy = rhs - A(G)... with
    // the convention dX = G - X dZ Zi.
    auto direction = [&](S sigma_mu, const std::vector<Mat<S>>* corr,
                         std::vector<Mat<S>>& dX, Vec<S>& dy,
                         std::vector<Mat<S>>& dZ) {
      std::vector<Mat<S>> G(nb);
      for (int b = 0; b < nb; ++b) {
        G[b] = sigma_mu * Zi[b] - X[b];
        if (corr) G[b] -= (*corr)[b] * Zi[b];
      }
      // A(dX) = A(G) + A(X A^T(dy) Zi) - A(X Rd Zi) must equal rp.
      dy = solveM(base_rhs - apply_rows(p, G));
      const auto ATdy = apply_adjoint(p, dy);
      dX.resize(nb);
      dZ.resize(nb);
      for (int b = 0; b < nb; ++b) {
        dZ[b] = Rd[b] - ATdy[b];
        Mat<S> t = G[b] - X[b] * dZ[b] * Zi[b];
        dX[b] = S(0.5) * (t + t.transpose());
      }
    };

    std::vector<Mat<S>> dXa, dZa, dX, dZ;
    Vec<S> dya, dy;
    direction(S(0), nullptr, dXa, dya, dZa);
    const S ap_a = std::min(S(1), max_step(X, dXa));
    const S ad_a = std::min(S(1), max_step(Z, dZa));
    const S mu_aff = n > 0 ? inner(axpy(X, ap_a, dXa), axpy(Z, ad_a, dZa)) / n : S(0);
    S sigma = mu > 0 ? pow(mu_aff / mu, S(3)) : S(0);
    sigma = std::clamp(sigma, S(0), S(1));

    std::vector<Mat<S>> corr(nb);
    for (int b = 0; b < nb; ++b) corr[b] = dXa[b] * dZa[b];
    direction(sigma * mu, &corr, dX, dy, dZ);

    const S ap = max_step(X, dX);
    const S ad = max_step(Z, dZ);
    const S gamma = S(0.9) + S(0.09) * std::min(ap_a, ad_a);
    S step_p = std::min(S(1), gamma * ap);
    S step_d = std::min(S(1), gamma * ad);
    // Back off if rounding pushed the new iterate out of the cone.
    auto definite = [&](const std::vector<Mat<S>>& A) {
      for (const auto& m : A) {
        if (m.size() && Eigen::LLT<Mat<S>>(m).info() != Eigen::Success) return false;
      }
      return true;
    };
    std::vector<Mat<S>> Xn = axpy(X, step_p, dX), Zn = axpy(Z, step_d, dZ);
    for (int tries = 0; tries < 20 && !definite(Xn); ++tries) {
      step_p *= S(0.8);
      Xn = axpy(X, step_p, dX);
    }
    for (int tries = 0; tries < 20 && !definite(Zn); ++tries) {
      step_d *= S(0.8);
      Zn = axpy(Z, step_d, dZ);
    }
    for (int b = 0; b < nb; ++b) {
      X[b] = S(0.5) * (Xn[b] + Xn[b].transpose());
      Z[b] = S(0.5) * (Zn[b] + Zn[b].transpose());
    }
    y += step_d * dy;

    stall = (std::max(step_p, step_d) < S(1e-7)) ? stall + 1 : 0;
    if (stall >= 5) {
      out.status = SolveStatus::kNumericFailure;
      out.message = "step lengths collapsed";
      break;
    }
  }
  if (out.status != SolveStatus::kConverged && !feasX.empty() &&
      feas_gap <= S(kStalledGapFactor) * tol_gap) {
    out.converged = true;
    out.status = SolveStatus::kConverged;
    char buf[64];
    std::snprintf(buf, sizeof buf, "accepted at relative gap %.2e", static_cast<double>(feas_gap));
    out.message = buf;
    X = std::move(feasX);
    out.pobj = feas_p;
    out.dobj = feas_d;
  } else if (out.status != SolveStatus::kConverged) {
    X = bestX;
    out.pobj = best_p;
    out.dobj = best_d;
  } else {
    out.pobj = inner(p.C, X);
    out.dobj = p.b.dot(y);
  }
  out.X = std::move(X);
  out.checkpoints.push_back({out.iterations, static_cast<double>(best_eq)});
  return out;
}

template <class S>
SolverResult solve_with(const SdpInstance& inst, const SolverSettings& s) {
  const auto t0 = std::chrono::steady_clock::now();
  SolverResult res;
  const S rank_tol = std::is_same_v<S, double> ? S(1e-11) : S(1e-14);
  Problem<S> p = build_problem<S>(inst, rank_tol);
  auto finish = [&]() {
    res.wall_time = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    return res;
  };
  if (p.inconsistent) {
    res.status = SolveStatus::kInfeasible;
    res.message = p.message;
    for (const auto& blk : inst.blocks) res.primal_blocks.emplace_back(blk.dim);
    const auto rep = verify_certificate(inst, res);
    res.equality_residual = rep.equality_residual;
    res.psd_residual = rep.psd_residual;
    return finish();
  }

  S internal_tol = static_cast<S>(s.tol_eq) * S(0.1);
  MethodOutput<S> run;
  for (int attempt = 0; attempt < 3; ++attempt) {
    run = s.method == SolverMethod::kInteriorPoint
              ? interior_point(p, s, internal_tol)
              : splitting_method(p, s, internal_tol);
    res.primal_blocks = expand_primal(p, run.X);
    const auto rep = verify_certificate(inst, res);
    res.equality_residual = rep.equality_residual;
    res.psd_residual = rep.psd_residual;
    if (!run.converged) break;
    if (rep.equality_residual <= s.tol_eq && rep.psd_residual >= -s.tol_psd) break;
    internal_tol *= S(0.01);
    run.converged = false;
    run.status = SolveStatus::kMaxIterations;
    run.message = "verification residual above tolerance";
  }
  res.status = run.status;
  res.message = run.message;
  if (p.dropped_rows > 0) {
    res.message += (res.message.empty() ? "" : "; ") + std::to_string(p.dropped_rows) +
                   " dependent rows removed";
  }
  res.iterations = run.iterations;
  res.checkpoints = run.checkpoints;
  res.objective_value = Real(static_cast<long double>(run.pobj)) *
                        Real(static_cast<long double>(p.objective_scale));
  res.dual_objective = Real(static_cast<long double>(run.dobj)) *
                       Real(static_cast<long double>(p.objective_scale));
  res.relative_gap = static_cast<double>(
      abs(run.pobj - run.dobj) /
      (S(1) + abs(run.pobj) + abs(run.dobj)));
  if (res.status == SolveStatus::kConverged &&
      (res.equality_residual > s.tol_eq || res.psd_residual < -s.tol_psd)) {
    res.status = SolveStatus::kMaxIterations;
  }
  return finish();
}

}  // namespace
}  // namespace detail

SolverResult solve_embedded(const SdpInstance& inst, double tol_eq,
                            double tol_psd, int max_iterations) {
  SolverSettings s;
  s.tol_eq = tol_eq;
  s.tol_psd = tol_psd;
  s.max_iterations = max_iterations;
  return solve_embedded(inst, s);
}

SolverResult solve_embedded(const SdpInstance& inst,
                            const SolverSettings& settings) {
  if (!(settings.tol_eq > 0) || !(settings.tol_psd > 0) || settings.max_iterations < 0) {
    throw std::invalid_argument("solver tolerances must be positive");
  }
  if (settings.extended_precision) {
    SolverResult res = detail::solve_with<long double>(inst, settings);
    const bool unresolved =
        res.status == SolveStatus::kMaxIterations || res.status == SolveStatus::kNumericFailure;
    if (unresolved && settings.quad_fallback && settings.method == SolverMethod::kInteriorPoint &&
        settings.max_iterations > 0) {
      SolverResult quad = detail::solve_with<detail::Quad>(inst, settings);
      quad.wall_time += res.wall_time;
      quad.iterations += res.iterations;
      quad.message = "quad precision retry after '" + res.message + "'" +
                     (quad.message.empty() ? "" : ": " + quad.message);
      return quad;
    }
    return res;
  }
  return detail::solve_with<double>(inst, settings);
}

}  // namespace sdpgame
