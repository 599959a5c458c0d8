#include "sdpgame/radial.h"

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace sdpgame::radial {

Real horner(const UniPoly& p, const Real& y) {
  Real acc = 0;
  for (size_t k = p.size(); k-- > 0;) acc = acc * y + p[k];
  return acc;
}

UniPoly multiply(const UniPoly& a, const UniPoly& b) {
  if (a.empty() || b.empty()) return {};
  UniPoly out(a.size() + b.size() - 1, Real(0));
  for (size_t i = 0; i < a.size(); ++i) {
    for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

namespace {
// binomial(m + z, m) for real z, as a product.
Real rising_binomial(int m, const Real& z) {
  Real out = 1;
  for (int j = 1; j <= m; ++j) out *= (z + j) / j;
  return out;
}
}  // namespace

UniPoly laguerre(int k, const Real& a) {
  // coefficient i: (-1)^i binomial(k + a, k - i) / i!
  UniPoly out(k + 1);
  Real fact = 1;
  for (int i = 0; i <= k; ++i) {
    if (i) fact *= i;
    Real c = rising_binomial(k - i, a + i) / fact;
    out[i] = (i % 2) ? -c : c;
  }
  return out;
}

UniPoly laguerre_normalized(int k, const Real& a) {
  UniPoly out = laguerre(k, a);
  const Real s = boost::multiprecision::sqrt(rising_binomial(k, a));
  for (auto& c : out) c /= s;
  return out;
}

namespace {
// T(x^k) = k! sum_j binomial(k + a, k - j) L_j^(a)(y), a = n/2 - 1. Follows
// from L_j^(a)(2 pi |x|^2) exp(-pi |x|^2) being a Fourier eigenfunction with
// eigenvalue (-1)^j.
UniPoly transform_power(int k, const Real& a) {
  UniPoly out(k + 1, Real(0));
  Real kfact = 1;
  for (int i = 2; i <= k; ++i) kfact *= i;
  for (int j = 0; j <= k; ++j) {
    const Real c = kfact * rising_binomial(k - j, a + j);
    const UniPoly lj = laguerre(j, a);
    for (int i = 0; i <= j; ++i) out[i] += c * lj[i];
  }
  return out;
}
}  // namespace

UniPoly transform(const UniPoly& q, int n) {
  if (n < 1) throw std::invalid_argument("dimension must be >= 1");
  const Real a = Real(n) / 2 - 1;
  UniPoly out(q.size(), Real(0));
  for (size_t k = 0; k < q.size(); ++k) {
    if (q[k] == 0) continue;
    const UniPoly tk = transform_power(static_cast<int>(k), a);
    for (size_t i = 0; i < tk.size(); ++i) out[i] += q[k] * tk[i];
  }
  return out;
}

const Tables& tables(int n, int d) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, unsigned>, std::unique_ptr<Tables>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_tuple(n, d, precision_bits());
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;

  auto t = std::make_unique<Tables>();
  t->n = n;
  t->d = d;
  const Real a = Real(n) / 2 - 1;
  std::vector<UniPoly> e, g;
  for (int k = 0; k <= d; ++k) e.push_back(laguerre_normalized(k, a));
  for (int k = 0; k < d; ++k) g.push_back(laguerre_normalized(k, a + 1));
  t->p0.assign(d + 1, std::vector<UniPoly>(d + 1));
  for (int i = 0; i <= d; ++i) {
    t->e_at_zero.push_back(e[i][0]);
    for (int j = i; j <= d; ++j) {
      t->p0[i][j] = transform(multiply(e[i], e[j]), n);
      t->p0[j][i] = t->p0[i][j];
    }
  }
  t->p1.assign(d, std::vector<UniPoly>(d));
  const UniPoly x = {Real(0), Real(1)};
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      t->p1[i][j] = transform(multiply(x, multiply(g[i], g[j])), n);
      t->p1[j][i] = t->p1[i][j];
    }
  }
  return *cache.emplace(key, std::move(t)).first->second;
}

}  // namespace sdpgame::radial
