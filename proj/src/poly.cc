#include "sdpgame/poly.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sdpgame {

void GeometricParams::validate() const {
  if (!(std::isfinite(r) && std::isfinite(R) && r > 0 && r < R)) {
    std::ostringstream os;
    os << "geometric parameters need 0 < r < R (got r=" << r << ", R=" << R
       << ")";
    throw std::invalid_argument(os.str());
  }
}

Point3 make_point(double h, double v, double w) {
  return Point3{Real(h), Real(v), Real(w)};
}

Polynomial Polynomial::constant(const Real& c) {
  return monomial({0, 0, 0}, c);
}

Polynomial Polynomial::monomial(const Exponent& e, const Real& c) {
  Polynomial p;
  p.add_term(e, c);
  return p;
}

Polynomial Polynomial::h() { return monomial({1, 0, 0}, Real(1)); }
Polynomial Polynomial::v() { return monomial({0, 1, 0}, Real(1)); }
Polynomial Polynomial::w() { return monomial({0, 0, 1}, Real(1)); }

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e[0] + e[1] + e[2]);
  return d;
}

bool Polynomial::symmetric12() const {
  for (const auto& [e, c] : terms_) {
    auto it = terms_.find(Exponent{e[1], e[0], e[2]});
    if (it == terms_.end() || it->second != c) return false;
  }
  return true;
}

Real Polynomial::coefficient(const Exponent& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Real(0) : it->second;
}

void Polynomial::add_term(const Exponent& e, const Real& c) {
  if (e[0] < 0 || e[1] < 0 || e[2] < 0) {
    throw std::invalid_argument("negative exponent");
  }
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial out = *this;
  for (const auto& [e, c] : o.terms_) out.add_term(e, c);
  return out;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  Polynomial out = *this;
  for (const auto& [e, c] : o.terms_) out.add_term(e, -c);
  return out;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Polynomial out;
  for (const auto& [e1, c1] : terms_) {
    for (const auto& [e2, c2] : o.terms_) {
      out.add_term({e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2]}, c1 * c2);
    }
  }
  return out;
}

Polynomial Polynomial::scaled(const Real& c) const {
  Polynomial out;
  if (c == 0) return out;
  for (const auto& [e, x] : terms_) out.add_term(e, x * c);
  return out;
}

Polynomial Polynomial::pow(int k) const {
  if (k < 0) throw std::invalid_argument("negative polynomial power");
  Polynomial out = constant(Real(1));
  Polynomial base = *this;
  while (k > 0) {
    if (k & 1) out = out * base;
    k >>= 1;
    if (k) base = base * base;
  }
  return out;
}

Real Polynomial::evaluate(const Point3& x) const {
  return evaluate(x.h, x.v, x.w);
}

Real Polynomial::evaluate(const Real& h, const Real& v, const Real& w) const {
  Real sum = 0;
  for (const auto& [e, c] : terms_) {
    Real t = c;
    if (e[0]) t *= boost::multiprecision::pow(h, e[0]);
    if (e[1]) t *= boost::multiprecision::pow(v, e[1]);
    if (e[2]) t *= boost::multiprecision::pow(w, e[2]);
    sum += t;
  }
  return sum;
}

std::string Polynomial::to_string(int digits) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << format_real(c, digits);
    const char* names[3] = {"h", "v", "w"};
    for (int i = 0; i < 3; ++i) {
      if (e[i] == 1) os << "*" << names[i];
      if (e[i] > 1) os << "*" << names[i] << "^" << e[i];
    }
  }
  return os.str();
}

Polynomial ring_combine(RingOp op, const Polynomial& p, const Polynomial& q) {
  return op == RingOp::kAdd ? p + q : p * q;
}

DegreeSymmetry degree_and_symmetry(const Polynomial& p) {
  return {p.degree(), p.symmetric12()};
}

Polynomial make_base_polynomial(int index, const GeometricParams& params) {
  const Real r2 = Real(params.r) * Real(params.r);
  const Real R2 = Real(params.R) * Real(params.R);
  const Polynomial h = Polynomial::h(), v = Polynomial::v(),
                   w = Polynomial::w();
  auto c = [](const Real& x) { return Polynomial::constant(x); };
  switch (index) {
    case 1:
      return (h - c(r2)) * (v - c(r2));
    case 2:
      return h + v - c(2 * r2);
    case 3:
      return h * v - w * w;
    case 4:
      return h + v - w.scaled(2) - c(r2);
    case 5:
      return (c(R2) - h) * (c(R2) - v);
    case 6:
      return c(2 * R2) - h - v;
    case 7:
      return c(1);
    default:
      throw std::invalid_argument("base polynomial index must be in 1..7, got " +
                                  std::to_string(index));
  }
}

std::array<Real, kNumBase> evaluate_base(const GeometricParams& params,
                                         const Point3& x) {
  const Real r2 = Real(params.r) * Real(params.r);
  const Real R2 = Real(params.R) * Real(params.R);
  return {(x.h - r2) * (x.v - r2), x.h + x.v - 2 * r2,
          x.h * x.v - x.w * x.w,   x.h + x.v - 2 * x.w - r2,
          (R2 - x.h) * (R2 - x.v), 2 * R2 - x.h - x.v,
          Real(1)};
}

std::vector<BasisElement> basis_enumerate(int d) {
  if (d < 0) {
    throw std::invalid_argument("basis degree must be nonnegative, got " +
                                std::to_string(d));
  }
  std::vector<BasisElement> out;
  for (int g = 0; g <= d; ++g) {
    for (int a = g; a >= 0; --a) {
      for (int b = (g - a) / 2; b >= 0; --b) {
        out.push_back({a, b, g - a - 2 * b});
      }
    }
  }
  return out;
}

size_t basis_size(int d) {
  if (d < 0) return 0;
  size_t n = 0;
  for (int g = 0; g <= d; ++g) {
    for (int a = 0; a <= g; ++a) n += (g - a) / 2 + 1;
  }
  return n;
}

Polynomial basis_to_poly(const BasisElement& e) {
  const Polynomial h = Polynomial::h(), v = Polynomial::v(),
                   w = Polynomial::w();
  return w.pow(e.a) * (h * v).pow(e.b) * (h + v).pow(e.c);
}

std::vector<Real> basis_values(const std::vector<BasisElement>& basis,
                               const Point3& x) {
  const Real hv = x.h * x.v;
  const Real s = x.h + x.v;
  std::vector<Real> out;
  out.reserve(basis.size());
  for (const auto& e : basis) {
    Real t = 1;
    if (e.a) t *= boost::multiprecision::pow(x.w, e.a);
    if (e.b) t *= boost::multiprecision::pow(hv, e.b);
    if (e.c) t *= boost::multiprecision::pow(s, e.c);
    out.push_back(t);
  }
  return out;
}

}  // namespace sdpgame
