#pragma once

// Preprocessed form of an SdpInstance shared by the embedded methods: every
// block is restricted to the span its data can see and mapped by a
// congruence X = S X' S^T that makes the row data isotropic, rows are scaled
// to unit norm, and linearly dependent rows are removed.

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/float128.hpp>

#include "sdpgame/sdp.h"
#include "sdpgame/solver.h"

namespace Eigen {
template <>
struct NumTraits<boost::multiprecision::float128>
    : GenericNumTraits<boost::multiprecision::float128> {
  using Real = boost::multiprecision::float128;
  using NonInteger = Real;
  using Literal = Real;
  using Nested = Real;
  enum { IsComplex = 0, IsInteger = 0, IsSigned = 1, RequireInitialization = 1,
         ReadCost = 2, AddCost = 8, MulCost = 16 };
  static Real dummy_precision() { return Real(1e-28); }
};
}  // namespace Eigen

namespace sdpgame::detail {

// Quadruple precision retry for solves that stall in long double.
using Quad = boost::multiprecision::float128;

// Unqualified math calls resolve to std for builtin types and by argument
// dependent lookup for Quad.
using std::abs;
using std::isfinite;
using std::pow;
using std::sqrt;

template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

template <class S>
struct Term {
  int block = 0;
  bool rank_one = false;
  S weight = 0;
  Vec<S> u;
  Mat<S> A;
};

template <class S>
struct Problem {
  std::vector<int> dims;
  std::vector<Mat<S>> congruence;  // original dim x reduced dim
  std::vector<std::vector<Term<S>>> rows;
  std::vector<int> row_origin;
  // Original row-normalized violation = internal violation * factor.
  std::vector<S> residual_factor;
  Vec<S> b;
  std::vector<Mat<S>> C;
  S objective_scale = 1;
  int dropped_rows = 0;
  bool inconsistent = false;
  std::string message;

  int m() const { return static_cast<int>(rows.size()); }
  int total_dim() const {
    int n = 0;
    for (int d : dims) n += d;
    return n;
  }
};

template <class S>
Problem<S> build_problem(const SdpInstance& inst, S rank_tol);

template <class S>
Vec<S> apply_rows(const Problem<S>& p, const std::vector<Mat<S>>& X);

template <class S>
std::vector<Mat<S>> apply_adjoint(const Problem<S>& p, const Vec<S>& y);

template <class S>
S inner(const std::vector<Mat<S>>& A, const std::vector<Mat<S>>& B);

// Maps reduced blocks back to the instance's block sizes.
template <class S>
std::vector<SymMatrix> expand_primal(const Problem<S>& p,
                                     const std::vector<Mat<S>>& X);

// Max over kept rows of the row-normalized violation.
template <class S>
S row_residual(const Problem<S>& p, const Vec<S>& rp);

template <class S>
struct MethodOutput {
  std::vector<Mat<S>> X;
  S pobj = 0, dobj = 0;
  int iterations = 0;
  bool converged = false;
  SolveStatus status = SolveStatus::kMaxIterations;
  std::string message;
  std::vector<Checkpoint> checkpoints;
};

// Alternating projections with an objective splitting (ADMM).
template <class S>
MethodOutput<S> splitting_method(const Problem<S>& p, const SolverSettings& s,
                                 S internal_tol);

}  // namespace sdpgame::detail
