#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "sdpgame/poly.h"
#include "test_util.h"

using namespace sdpgame;

namespace {
Real at(const Polynomial& p, double h, double v, double w) {
  return p.evaluate(make_point(h, v, w));
}

Polynomial random_poly(std::mt19937_64& rng, int terms, int maxdeg) {
  std::uniform_int_distribution<int> e(0, maxdeg);
  std::uniform_int_distribution<int> c(-9, 9);
  Polynomial p;
  for (int i = 0; i < terms; ++i) p.add_term({e(rng), e(rng), e(rng)}, Real(c(rng)) / 4);
  return p;
}
}  // namespace

TEST_CASE("base polynomial values") {
  const GeometricParams g{1.0, 2.0};
  CHECK(make_base_polynomial(7, g) == Polynomial::constant(Real(1)));
  CHECK(at(make_base_polynomial(1, g), 1, 5, 0) == 0);
  const auto& o = testutil::oracle();
  CHECK(at(make_base_polynomial(3, g), 2, 3, 1) == o["P3_at_2_3_1"].get<double>());
  CHECK(at(make_base_polynomial(5, g), 3, 1, 0) == o["P5_R2_at_3_1_0"].get<double>());
  CHECK(at(make_base_polynomial(2, g), 1, 1, 7.5) == 0);
  CHECK_THROWS_AS(make_base_polynomial(0, g), std::invalid_argument);
  CHECK_THROWS_AS(make_base_polynomial(8, g), std::invalid_argument);
}

TEST_CASE("base polynomial degrees and symmetry") {
  const auto& o = testutil::oracle();
  for (double r : {0.5, 1.0, 1.3}) {
    const GeometricParams g{r, r + 0.7};
    for (int i = 1; i <= 7; ++i) {
      const auto ds = degree_and_symmetry(make_base_polynomial(i, g));
      CHECK(ds.degree == o["base_degrees"][i - 1].get<int>());
      CHECK(ds.degree == kBaseDegrees[i - 1]);
      CHECK(ds.symmetric12);
    }
  }
  const auto hv = Polynomial::h() - Polynomial::v();
  CHECK(degree_and_symmetry(hv).degree == 1);
  CHECK_FALSE(degree_and_symmetry(hv).symmetric12);
}

TEST_CASE("ring operations") {
  const GeometricParams g{1.0, 2.0};
  const auto p3 = make_base_polynomial(3, g), p7 = make_base_polynomial(7, g);
  CHECK(ring_combine(RingOp::kMul, p7, p3) == p3);
  CHECK(ring_combine(RingOp::kAdd, p3, p3.scaled(Real(-1))).is_zero());

  const auto sq = ring_combine(RingOp::kMul, make_base_polynomial(2, g), make_base_polynomial(2, g));
  const auto& expected = testutil::oracle()["P2_squared_r1"];
  CHECK(sq.terms().size() == expected.size());
  for (const auto& term : expected) {
    Exponent e{term[0][0].get<int>(), term[0][1].get<int>(), term[0][2].get<int>()};
    CHECK(sq.coefficient(e) == term[1].get<double>());
  }
  for (const auto& [e, c] : sq.terms()) CHECK(c != 0);
}

TEST_CASE("ring properties on random inputs") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = random_poly(rng, 5, 3), q = random_poly(rng, 4, 3), s = random_poly(rng, 3, 2);
    CHECK(p + q == q + p);
    CHECK(p * q == q * p);
    CHECK((p + q) + s == p + (q + s));
    CHECK((p * q) * s == p * (q * s));
  }
  std::uniform_real_distribution<double> u(-2, 2);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto p = random_poly(rng, 4, 3), q = random_poly(rng, 4, 3);
    const Point3 x = make_point(u(rng), u(rng), u(rng));
    const Real lhs = (p * q).evaluate(x);
    const Real rhs = p.evaluate(x) * q.evaluate(x);
    CHECK(abs(lhs - rhs) <= Real("1e-60") * (1 + abs(rhs)));
  }
}

TEST_CASE("basis enumeration") {
  CHECK(basis_enumerate(0) == std::vector<BasisElement>{{0, 0, 0}});
  const auto& o = testutil::oracle();
  const auto b2 = basis_enumerate(2);
  REQUIRE(b2.size() == o["basis_order_2"].size());
  for (size_t i = 0; i < b2.size(); ++i) {
    CHECK(b2[i].a == o["basis_order_2"][i][0].get<int>());
    CHECK(b2[i].b == o["basis_order_2"][i][1].get<int>());
    CHECK(b2[i].c == o["basis_order_2"][i][2].get<int>());
  }
  for (int d = 0; d <= 12; ++d) {
    CHECK(basis_enumerate(d).size() == o["basis_counts"][d].get<size_t>());
    CHECK(basis_size(d) == o["basis_counts"][d].get<size_t>());
  }
  CHECK(basis_enumerate(5).size() == 34);
  for (int d1 = 0; d1 < 8; ++d1) {
    for (int d2 = d1 + 1; d2 <= 8; ++d2) {
      const auto a = basis_enumerate(d1), b = basis_enumerate(d2);
      CHECK(a.size() < b.size());
      CHECK(std::equal(a.begin(), a.end(), b.begin()));
    }
  }
  CHECK_THROWS_AS(basis_enumerate(-1), std::invalid_argument);
}

TEST_CASE("basis polynomials") {
  CHECK(basis_to_poly({0, 0, 0}) == Polynomial::constant(Real(1)));
  const auto s2 = basis_to_poly({0, 0, 2});
  CHECK(s2.terms().size() == 3);
  CHECK(s2.coefficient({2, 0, 0}) == 1);
  CHECK(s2.coefficient({1, 1, 0}) == 2);
  CHECK(s2.coefficient({0, 2, 0}) == 1);
  const auto whv = basis_to_poly({1, 1, 0});
  CHECK(whv.terms().size() == 1);
  CHECK(whv.coefficient({1, 1, 1}) == 1);
  for (const auto& e : basis_enumerate(6)) CHECK(basis_to_poly(e).symmetric12());

  const auto b2 = basis_enumerate(2);
  const auto vals = basis_values(b2, make_point(2, 2, 1));
  const auto& u = testutil::oracle()["u_at_2_2_1_d2"];
  for (size_t i = 0; i < b2.size(); ++i) {
    CHECK(vals[i] == u[i].get<double>());
    CHECK(basis_to_poly(b2[i]).evaluate(make_point(2, 2, 1)) == vals[i]);
  }
}

TEST_CASE("geometric parameters") {
  CHECK_NOTHROW(GeometricParams{1, 2}.validate());
  CHECK_THROWS_AS((GeometricParams{2, 2}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((GeometricParams{0, 2}.validate()), std::invalid_argument);
}
