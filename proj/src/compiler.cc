#include "sdpgame/compiler.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "sdpgame/radial.h"

namespace sdpgame {

void SymMatrix::add(int i, int j, const Real& x) {
  a_[idx(i, j)] += x;
  if (i != j) a_[idx(j, i)] += x;
}

bool SymMatrix::is_zero() const {
  for (const auto& x : a_) {
    if (x != 0) return false;
  }
  return true;
}

Real SymMatrix::frobenius_norm() const {
  Real s = 0;
  for (const auto& x : a_) s += x * x;
  return boost::multiprecision::sqrt(s);
}

SymMatrix SymMatrix::outer(const std::vector<Real>& u, const Real& weight) {
  const int n = static_cast<int>(u.size());
  SymMatrix m(n);
  for (int i = 0; i < n; ++i) {
    const Real wi = weight * u[i];
    for (int j = i; j < n; ++j) m.set(i, j, wi * u[j]);
  }
  return m;
}

SymMatrix BlockTerm::dense() const {
  return rank_one ? SymMatrix::outer(factor, weight) : dense_matrix;
}

int BlockTerm::dim() const {
  return rank_one ? static_cast<int>(factor.size()) : dense_matrix.dim();
}

Real BlockTerm::inner(const SymMatrix& X) const {
  Real s = 0;
  const int n = dim();
  if (X.dim() != n) throw std::invalid_argument("block dimension mismatch");
  if (rank_one) {
    for (int i = 0; i < n; ++i) {
      Real row = 0;
      for (int j = 0; j < n; ++j) row += X(i, j) * factor[j];
      s += factor[i] * row;
    }
    return weight * s;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) s += X(i, j) * dense_matrix(i, j);
  }
  return s;
}

std::string block_role_name(BlockRole r) {
  switch (r) {
    case BlockRole::kSentence: return "sentence";
    case BlockRole::kFourier: return "fourier";
    case BlockRole::kFourierShifted: return "fourier_shifted";
    case BlockRole::kTail: return "tail";
    case BlockRole::kTailShifted: return "tail_shifted";
  }
  return "?";
}

void SdpInstance::validate() const {
  auto check_row = [&](const ConstraintRow& row) {
    for (const auto& t : row.terms) {
      if (t.block < 0 || t.block >= num_blocks()) {
        throw std::invalid_argument("row references a missing block");
      }
      if (t.dim() != blocks[t.block].dim) {
        throw std::invalid_argument("row term dimension mismatch in block " +
                                    std::to_string(t.block));
      }
    }
  };
  for (const auto& row : rows) check_row(row);
  check_row(normalization);
  if (objective.size() != blocks.size()) {
    throw std::invalid_argument("objective block count mismatch");
  }
  for (size_t b = 0; b < blocks.size(); ++b) {
    if (objective[b].dim() != 0 && objective[b].dim() != blocks[b].dim) {
      throw std::invalid_argument("objective dimension mismatch in block " +
                                  std::to_string(b));
    }
  }
}

namespace {
void check_degrees(const Sentence& s, int d) {
  if (d < 0) throw std::invalid_argument("degree must be nonnegative");
  if (s.monomials.empty()) throw std::invalid_argument("empty sentence");
  for (const auto& m : s.monomials) {
    if (m.degree() > d) {
      throw std::invalid_argument("monomial " + render_monomial(m) +
                                  " has degree " + std::to_string(m.degree()) +
                                  " > " + std::to_string(d));
    }
  }
}

std::vector<SymMatrix> blocks_at(const Sentence& s, int d, const Point3& x,
                                 const GeometricParams& params) {
  check_degrees(s, d);
  const auto base = evaluate_base(params, x);
  const auto full = basis_values(basis_enumerate(d), x);
  std::vector<SymMatrix> out;
  for (const auto& m : s.monomials) {
    std::vector<Real> u(full.begin(), full.begin() + basis_size(d - m.degree()));
    out.push_back(SymMatrix::outer(u, evaluate_monomial(m, base)));
  }
  return out;
}
}  // namespace

std::vector<SymMatrix> build_constraint_blocks(const Sentence& s, int d,
                                               const PivotPoint& pivot,
                                               const GeometricParams& params) {
  return blocks_at(s, d, pivot.point(), params);
}

std::vector<SymMatrix> build_objective_blocks(const Sentence& s, int d,
                                              const GeometricParams& params) {
  return blocks_at(s, d, make_point(0, 0, 0), params);
}

void OriginCertificate::complete(SdpInstance& inst) const {
  auto c = build_objective_blocks(inst.sentence, inst.meta.d, inst.meta.params);
  inst.objective.assign(inst.blocks.size(), SymMatrix());
  for (size_t i = 0; i < c.size(); ++i) {
    if (!c[i].is_zero()) inst.objective[i] = c[i];
  }
  inst.normalization = ConstraintRow{RowKind::kNormalization, {}, Real(1)};
  if (!c.empty() && !c[0].is_zero()) {
    BlockTerm t;
    t.block = 0;
    t.dense_matrix = c[0];
    inst.normalization.terms.push_back(std::move(t));
  }
}

namespace {
BlockTerm dense_term(int block, SymMatrix m) {
  BlockTerm t;
  t.block = block;
  t.dense_matrix = std::move(m);
  return t;
}

// Entry (a, b) = mean of p_ab at the scaled points.
SymMatrix evaluate_table(const std::vector<std::vector<radial::UniPoly>>& p,
                         const std::vector<Real>& ys) {
  const int n = static_cast<int>(p.size());
  SymMatrix m(n);
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      Real s = 0;
      for (const auto& y : ys) s += radial::horner(p[a][b], y);
      m.set(a, b, s / static_cast<int>(ys.size()));
    }
  }
  return m;
}

SymMatrix hankel_powers(int dim, const Real& z, int shift) {
  SymMatrix m(dim);
  for (int a = 0; a < dim; ++a) {
    for (int b = a; b < dim; ++b) {
      m.set(a, b, boost::multiprecision::pow(z, a + b + shift));
    }
  }
  return m;
}
}  // namespace

void RadialCertificate::complete(SdpInstance& inst) const {
  const int d = inst.meta.d;
  const radial::Tables& tab = radial::tables(inst.meta.n, d);
  const Real two_pi = 2 * real_pi();

  const int f0 = inst.num_blocks();
  inst.blocks.push_back({d + 1, BlockRole::kFourier, -1});
  int f1 = -1;
  if (d >= 1) {
    f1 = inst.num_blocks();
    inst.blocks.push_back({d, BlockRole::kFourierShifted, -1});
  }
  const int t0 = inst.num_blocks();
  inst.blocks.push_back({d + 1, BlockRole::kTail, -1});
  int t1 = -1;
  if (d >= 1) {
    t1 = inst.num_blocks();
    inst.blocks.push_back({d, BlockRole::kTailShifted, -1});
  }

  for (size_t k = 0; k < inst.pivots.size(); ++k) {
    const PivotPoint& pv = inst.pivots[k];
    const std::vector<Real> ys = {two_pi * Real(pv.h), two_pi * Real(pv.v)};
    auto& row = inst.rows[k];
    row.terms.push_back(dense_term(f0, evaluate_table(tab.p0, ys)));
    if (f1 >= 0) row.terms.push_back(dense_term(f1, evaluate_table(tab.p1, ys)));
  }

  // Tail identity -p(t) = tau0(z) + z tau1(z), z = t / R^2 - 1, enforced at
  // 2d + 1 Chebyshev nodes of z in [0, 1]; both sides have degree <= 2d.
  const Real R2 = Real(inst.meta.params.R) * Real(inst.meta.params.R);
  std::vector<double> zs;
  const int nodes = 2 * d + 1;
  for (int j = 0; j < nodes; ++j) {
    zs.push_back(0.5 - 0.5 * std::cos((2.0 * j + 1.0) * M_PI / (2.0 * nodes)));
  }
  for (double zd : zs) {
    const Real z(zd);
    const std::vector<Real> ys = {two_pi * R2 * (1 + z)};
    ConstraintRow row{RowKind::kTail, {}, Real(0)};
    row.terms.push_back(dense_term(f0, evaluate_table(tab.p0, ys)));
    if (f1 >= 0) row.terms.push_back(dense_term(f1, evaluate_table(tab.p1, ys)));
    row.terms.push_back(dense_term(t0, hankel_powers(d + 1, z, 0)));
    if (t1 >= 0) row.terms.push_back(dense_term(t1, hankel_powers(d, z, 1)));
    inst.rows.push_back(std::move(row));
  }

  inst.objective.assign(inst.blocks.size(), SymMatrix());
  const std::vector<Real> origin = {Real(0)};
  inst.objective[f0] = evaluate_table(tab.p0, origin);
  if (f1 >= 0) inst.objective[f1] = evaluate_table(tab.p1, origin);

  inst.normalization = ConstraintRow{RowKind::kNormalization, {}, Real(1)};
  BlockTerm nt;
  nt.block = f0;
  nt.rank_one = true;
  nt.weight = 1;
  nt.factor = tab.e_at_zero;
  inst.normalization.terms.push_back(std::move(nt));
}

std::shared_ptr<const CertificateBuilder> default_builder() {
  static const auto b = std::make_shared<RadialCertificate>();
  return b;
}

std::shared_ptr<const CertificateBuilder> builder_by_name(const std::string& name) {
  if (name == "radial") return default_builder();
  if (name == "origin") return std::make_shared<OriginCertificate>();
  throw std::invalid_argument("unknown certificate builder '" + name + "'");
}

SdpInstance assemble_sdp(const Sentence& s, const GeometricParams& params,
                         int n, int d, int K, uint64_t seed,
                         const CompileOptions& options) {
  params.validate();
  if (n < 1) throw std::invalid_argument("dimension must be >= 1");
  if (K < 1) throw std::invalid_argument("pivot count must be >= 1");
  check_degrees(s, d);

  SdpInstance inst;
  inst.sentence = s;
  inst.meta.n = n;
  inst.meta.d = d;
  inst.meta.params = params;
  inst.meta.sentence = render(s);
  inst.meta.K = K;
  inst.meta.seed = seed;
  inst.meta.precision_bits = precision_bits();

  for (size_t i = 0; i < s.monomials.size(); ++i) {
    inst.blocks.push_back({static_cast<int>(basis_size(d - s.monomials[i].degree())),
                           BlockRole::kSentence, static_cast<int>(i)});
  }

  inst.pivots = generate_pivots(params, K, seed, options.pivots);
  const auto basis = basis_enumerate(d);
  for (const auto& pv : inst.pivots) {
    const Point3 x = pv.point();
    const auto base = evaluate_base(params, x);
    const auto full = basis_values(basis, x);
    ConstraintRow row{RowKind::kPivot, {}, Real(0)};
    for (size_t i = 0; i < s.monomials.size(); ++i) {
      const Real m = evaluate_monomial(s.monomials[i], base);
      if (m == 0) continue;
      BlockTerm t;
      t.block = static_cast<int>(i);
      t.rank_one = true;
      t.weight = m;
      t.factor.assign(full.begin(), full.begin() + inst.blocks[i].dim);
      row.terms.push_back(std::move(t));
    }
    inst.rows.push_back(std::move(row));
    if (pv.on_diagonal()) ++inst.meta.diagonal_pivots;
  }
  inst.meta.diagonal_exact = inst.meta.diagonal_pivots >= 2 * d + 1;

  const auto builder = options.builder ? options.builder : default_builder();
  inst.meta.builder = builder->name();
  builder->complete(inst);
  inst.validate();
  return inst;
}

Real ball_volume(int n, const Real& radius) {
  const Real half_n = Real(n) / 2;
  return boost::multiprecision::pow(real_pi(), half_n) /
         boost::math::tgamma(half_n + 1) * boost::multiprecision::pow(radius, n);
}

BoundReport compute_bound(const Real& objective_value,
                          const GeometricParams& params, int n) {
  return compute_bound(objective_value, params, n, ball_volume(n, Real(1) / 2));
}

BoundReport compute_bound(const Real& objective_value,
                          const GeometricParams& params, int n,
                          const Real& scaling_constant) {
  BoundReport b;
  b.objective_value = objective_value;
  b.n = n;
  b.scaling_constant = scaling_constant;
  b.bound = scaling_constant * objective_value *
            boost::multiprecision::pow(Real(params.r), n);
  return b;
}

}  // namespace sdpgame
