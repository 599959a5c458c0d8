#pragma once

#include <vector>

#include "sdpgame/real.h"

// Radial Fourier pairs of the form p(|x|^2) exp(-pi |x|^2) in R^n. Both sides
// are encoded by polynomials in the scaled variable 2*pi*|x|^2.
namespace sdpgame::radial {

using UniPoly = std::vector<Real>;  // coefficient k multiplies y^k

Real horner(const UniPoly& p, const Real& y);
UniPoly multiply(const UniPoly& a, const UniPoly& b);

// Generalized Laguerre polynomial L_k^(a).
UniPoly laguerre(int k, const Real& a);
// L_k^(a) divided by sqrt(binomial(k + a, k)).
UniPoly laguerre_normalized(int k, const Real& a);

// Given the transform side q (in x = 2*pi*|xi|^2), returns the polynomial p
// (in y = 2*pi*|x|^2) with F[q exp(-pi|.|^2)] = p exp(-pi|.|^2) in R^n.
UniPoly transform(const UniPoly& q, int n);

// Data for the radial certificate blocks at dimension n and degree d. The
// transform side is q = sum Y0_ab e_a e_b + x sum Y1_ab g_a g_b with
// e_a = laguerre_normalized(a, n/2 - 1), g_a = laguerre_normalized(a, n/2).
struct Tables {
  int n = 0, d = 0;
  std::vector<std::vector<UniPoly>> p0;  // (d+1) x (d+1), transformed e_a e_b
  std::vector<std::vector<UniPoly>> p1;  // d x d, transformed x g_a g_b
  std::vector<Real> e_at_zero;           // e_a(0)
};

// Cached per (n, d, working precision).
const Tables& tables(int n, int d);

}  // namespace sdpgame::radial
