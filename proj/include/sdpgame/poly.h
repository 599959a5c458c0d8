#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "sdpgame/real.h"

namespace sdpgame {

struct GeometricParams {
  double r = 1.0;
  double R = 2.0;

  // Throws std::invalid_argument unless 0 < r < R.
  void validate() const;
};

// Exponents of (h, v, w).
using Exponent = std::array<int, 3>;

struct Point3 {
  Real h, v, w;
};

Point3 make_point(double h, double v, double w);

// Sparse polynomial in (h, v, w). Zero coefficients are never stored.
class Polynomial {
 public:
  using TermMap = std::map<Exponent, Real>;

  Polynomial() = default;
  static Polynomial constant(const Real& c);
  static Polynomial monomial(const Exponent& e, const Real& c);
  static Polynomial h();
  static Polynomial v();
  static Polynomial w();

  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;
  bool symmetric12() const;
  Real coefficient(const Exponent& e) const;

  // Adds c to the coefficient at e, pruning the entry if it cancels.
  void add_term(const Exponent& e, const Real& c);

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial scaled(const Real& c) const;
  Polynomial pow(int k) const;

  Real evaluate(const Point3& x) const;
  Real evaluate(const Real& h, const Real& v, const Real& w) const;

  bool operator==(const Polynomial& o) const { return terms_ == o.terms_; }

  std::string to_string(int digits = 6) const;

 private:
  TermMap terms_;
};

enum class RingOp { kAdd, kMul };
Polynomial ring_combine(RingOp op, const Polynomial& p, const Polynomial& q);

struct DegreeSymmetry {
  int degree;
  bool symmetric12;
};
DegreeSymmetry degree_and_symmetry(const Polynomial& p);

constexpr int kNumBase = 7;
constexpr std::array<int, kNumBase> kBaseDegrees = {2, 1, 2, 1, 2, 1, 0};

// P1..P7 with r^2, R^2 substituted. Throws std::invalid_argument for an index
// outside 1..7.
Polynomial make_base_polynomial(int index, const GeometricParams& params);

// All seven base polynomials evaluated at a point; entry k-1 holds P_k.
std::array<Real, kNumBase> evaluate_base(const GeometricParams& params,
                                         const Point3& x);

struct BasisElement {
  int a = 0;  // power of w
  int b = 0;  // power of hv
  int c = 0;  // power of (h + v)

  int grade() const { return a + 2 * b + c; }
  bool operator==(const BasisElement&) const = default;
};

// Elements with a + 2b + c <= d, grade ascending and, inside a grade,
// (a, b, c) descending lexicographically. basis(d1) is a prefix of basis(d2).
std::vector<BasisElement> basis_enumerate(int d);
size_t basis_size(int d);

Polynomial basis_to_poly(const BasisElement& e);

// Evaluations of every basis element at one point, in basis order.
std::vector<Real> basis_values(const std::vector<BasisElement>& basis,
                               const Point3& x);

}  // namespace sdpgame
