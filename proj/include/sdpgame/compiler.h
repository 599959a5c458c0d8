#pragma once

#include <memory>
#include <string>
#include <vector>

#include "sdpgame/sdp.h"

namespace sdpgame {

// One matrix per monomial: m_i(pivot) u u^T, u the evaluations of
// basis(d - deg m_i) at the pivot. Throws std::invalid_argument naming the
// monomial if its degree exceeds d.
std::vector<SymMatrix> build_constraint_blocks(const Sentence& s, int d,
                                               const PivotPoint& pivot,
                                               const GeometricParams& params);

// Origin evaluation: the constraint construction at (0, 0, 0).
std::vector<SymMatrix> build_objective_blocks(const Sentence& s, int d,
                                              const GeometricParams& params);

// Completes an instance whose sentence blocks and pivot rows are filled:
// adds any auxiliary blocks and rows, the objective and the normalization.
class CertificateBuilder {
 public:
  virtual ~CertificateBuilder() = default;
  virtual std::string name() const = 0;
  virtual void complete(SdpInstance& inst) const = 0;
};

// Objective from build_objective_blocks and normalization on the first
// block's origin evaluation. Reproduces the bare pivot SDP; because every
// row matrix is PSD it is degenerate for bound purposes (see README).
class OriginCertificate : public CertificateBuilder {
 public:
  std::string name() const override { return "origin"; }
  void complete(SdpInstance& inst) const override;
};

// Radial auxiliary function f(x) = p(|x|^2) exp(-pi |x|^2) with transform
// q(|xi|^2) exp(-pi |xi|^2). The sentence blocks certify -p <= 0 on the
// admissible region through the pivot identities
//   sum_i m_i(pivot) u^T X_i u + (p(h) + p(v)) / 2 = 0,
// SOS blocks make q >= 0 on [0, inf) and -p >= 0 on [R^2, inf), q(0) = 1 and
// the objective is p(0).
class RadialCertificate : public CertificateBuilder {
 public:
  std::string name() const override { return "radial"; }
  void complete(SdpInstance& inst) const override;
};

std::shared_ptr<const CertificateBuilder> default_builder();
std::shared_ptr<const CertificateBuilder> builder_by_name(const std::string& name);

struct CompileOptions {
  PivotOptions pivots;
  std::shared_ptr<const CertificateBuilder> builder;  // null: default
};

SdpInstance assemble_sdp(const Sentence& s, const GeometricParams& params,
                         int n, int d, int K, uint64_t seed,
                         const CompileOptions& options = {});

struct BoundReport {
  Real objective_value = 0;
  Real bound = 0;
  int n = 0;
  Real scaling_constant = 0;
};

// Volume of the n-dimensional ball of the given radius.
Real ball_volume(int n, const Real& radius);

// bound = scaling * objective * r^n; scaling defaults to the volume of the
// radius-1/2 ball.
BoundReport compute_bound(const Real& objective_value,
                          const GeometricParams& params, int n);
BoundReport compute_bound(const Real& objective_value,
                          const GeometricParams& params, int n,
                          const Real& scaling_constant);

// SDPA sparse text. Row 0 holds the negated objective so that SDPA's
// maximization of F0.Y matches our minimization; rows 1..m are the
// homogeneous rows then the normalization row.
std::string emit_sdpa(const SdpInstance& inst, int digits = 40);

}  // namespace sdpgame
