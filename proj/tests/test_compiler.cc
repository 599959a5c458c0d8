#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <filesystem>
#include <fstream>
#include <random>

#include "sdpgame/compiler.h"
#include "sdpgame/radial.h"
#include "sdpgame/solver.h"
#include "test_util.h"

using namespace sdpgame;

namespace {
const GeometricParams kUnit{1.0, 2.0};

Eigen::MatrixXd to_eigen(const SymMatrix& m) {
  Eigen::MatrixXd a(m.dim(), m.dim());
  for (int i = 0; i < m.dim(); ++i) {
    for (int j = 0; j < m.dim(); ++j) a(i, j) = to_double(m(i, j));
  }
  return a;
}

// Equal to the 40 significant digits written by emit_sdpa.
bool close40(const Real& a, const Real& b) {
  return abs(a - b) <= Real("1e-38") * std::max(Real(1), Real(abs(b)));
}

CompileOptions origin_options() {
  CompileOptions o;
  o.builder = builder_by_name("origin");
  return o;
}

Sentence random_sentence(std::mt19937_64& rng, int cap) {
  const auto monos = enumerate_monomials(cap);
  std::uniform_int_distribution<size_t> pick(0, monos.size() - 1);
  std::uniform_int_distribution<int> len(1, 3);
  Sentence s;
  for (int i = len(rng); i > 0; --i) s.monomials.push_back(monos[pick(rng)]);
  return canonicalize(s);
}
}  // namespace

TEST_CASE("region membership") {
  CHECK(region_membership(make_point(2, 2, 1), kUnit));
  CHECK_FALSE(region_membership(make_point(0, 0, 0), kUnit));
  for (double r : {0.5, 1.0, 1.7}) {
    const GeometricParams g{r, 2 * r};
    CHECK_FALSE(region_membership(make_point(r * r, r * r, r * r), g));
  }
  const auto& o = testutil::oracle();
  const auto vals = o["region_2_2_1_r1_R2"];
  const auto base = evaluate_base(kUnit, make_point(2, 2, 1));
  for (int i = 0; i < 6; ++i) CHECK(base[i] == vals[i].get<double>());
}

TEST_CASE("pivot generation") {
  const auto one = generate_pivots(kUnit, 1, 0);
  REQUIRE(one.size() == 1);
  CHECK(region_membership(one[0], kUnit));
  const GeometricParams g{1.3, 1.8};
  for (int K : {1, 13, 50, 200}) {
    const auto a = generate_pivots(g, K, 42);
    CHECK(a == generate_pivots(g, K, 42));
    REQUIRE(static_cast<int>(a.size()) == K);
    for (size_t i = 0; i < a.size(); ++i) {
      CHECK(region_membership(a[i], g));
      CHECK(a[i].h >= g.r * g.r - 1e-12);
      CHECK(a[i].v <= g.R * g.R + 1e-12);
      CHECK(a[i].h <= a[i].v);
      for (size_t j = 0; j < i; ++j) CHECK_FALSE(a[i] == a[j]);
    }
  }
  CHECK(generate_pivots(g, 200, 1) != generate_pivots(g, 200, 2));
  PivotOptions tight;
  tight.fill_budget = 10;
  CHECK_THROWS_AS(generate_pivots(g, 5000, 0, tight), PivotExhausted);
  try {
    generate_pivots(g, 5000, 0, tight);
  } catch (const PivotExhausted& e) {
    CHECK(e.found() > 0);
    CHECK(e.found() < 5000);
  }
}

TEST_CASE("region forces h and v into the shell") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 6);
  int inside = 0;
  for (int i = 0; i < 10000; ++i) {
    const double h = u(rng), v = u(rng), w = u(rng) - 2.5;
    if (!region_membership(make_point(h, v, w), kUnit)) continue;
    ++inside;
    CHECK(h >= 1);
    CHECK(h <= 4);
    CHECK(v >= 1);
    CHECK(v <= 4);
  }
  CHECK(inside > 0);
}

TEST_CASE("constraint blocks") {
  const Sentence c = tokenize_and_parse("P7 <EOS>");
  const auto b0 = build_constraint_blocks(c, 0, {2, 2, 1}, kUnit);
  REQUIRE(b0.size() == 1);
  CHECK(b0[0].dim() == 1);
  CHECK(b0[0](0, 0) == 1);

  const auto b2 = build_constraint_blocks(c, 2, {2, 2, 1}, kUnit);
  REQUIRE(b2[0].dim() == 7);
  const auto& o = testutil::oracle();
  const auto u = o["u_at_2_2_1_d2"];
  for (int i = 0; i < 7; ++i) {
    for (int j = 0; j < 7; ++j) CHECK(b2[0](i, j) == u[i].get<double>() * u[j].get<double>());
  }
  // P4 = h + v - 2w - r^2 vanishes at (2, 2, 1.5).
  const auto z = build_constraint_blocks(tokenize_and_parse("P4 <EOS>"), 2, {2, 2, 1.5}, kUnit);
  CHECK(z[0].is_zero());
  CHECK_THROWS_WITH_AS(build_constraint_blocks(tokenize_and_parse("P1 <*> P3 <EOS>"), 3,
                                               {2, 2, 1}, kUnit),
                       doctest::Contains("P1 <*> P3"), std::invalid_argument);
}

TEST_CASE("constraint blocks are rank one and PSD at pivots") {
  std::mt19937_64 rng(5);
  const GeometricParams g{1.2, 1.9};
  const auto pivots = generate_pivots(g, 40, 9);
  for (int trial = 0; trial < 20; ++trial) {
    const Sentence s = random_sentence(rng, 3);
    for (const auto& pv : pivots) {
      for (const auto& m : build_constraint_blocks(s, 4, pv, g)) {
        const Eigen::MatrixXd a = to_eigen(m);
        const double norm = a.norm();
        if (norm == 0) continue;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
        const auto sv = svd.singularValues();
        for (int k = 1; k < sv.size(); ++k) CHECK(sv(k) <= 1e-10 * sv(0));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
        CHECK(es.eigenvalues()(0) >= -1e-10 * norm);
      }
    }
  }
}

TEST_CASE("origin objective blocks") {
  const auto c0 = build_objective_blocks(tokenize_and_parse("P7 <EOS>"), 0, kUnit);
  CHECK(c0[0](0, 0) == 1);
  const auto c3 = build_objective_blocks(tokenize_and_parse("P3 <ES> P2 <*> P3 <EOS>"), 4, kUnit);
  CHECK(c3[0].is_zero());
  CHECK(c3[1].is_zero());
  const auto c1 = build_objective_blocks(tokenize_and_parse("P1 <EOS>"), 2, kUnit);
  const auto ref = build_objective_blocks(tokenize_and_parse("P7 <EOS>"), 0, kUnit);
  // P1(0) = 1 and only the constant basis element survives at the origin.
  REQUIRE(c1[0].dim() == 1);
  CHECK(c1[0](0, 0) == 1);
  CHECK(ref[0](0, 0) == 1);
}

TEST_CASE("instance structure") {
  const Sentence c = tokenize_and_parse("P7 <EOS>");
  const SdpInstance tri = assemble_sdp(c, kUnit, 3, 0, 1, 0, origin_options());
  CHECK(tri.num_blocks() == 1);
  CHECK(tri.blocks[0].dim == 1);
  CHECK(tri.rows.size() == 1);
  CHECK(tri.num_rows() == 2);
  CHECK(tri.normalization.rhs == 1);
  CHECK(tri.meta.builder == "origin");

  const Sentence s = tokenize_and_parse("P7 <ES> P2 <ES> P1 <ES> P1 <*> P2 <ES> P1 <*> P3 <EOS>");
  const Sentence cs = canonicalize(s);
  const SdpInstance inst = assemble_sdp(cs, {1.3, 1.8}, 8, 4, 50, 17);
  CHECK(inst.meta.n == 8);
  CHECK(inst.meta.d == 4);
  CHECK(inst.meta.K == 50);
  CHECK(inst.meta.seed == 17);
  CHECK(inst.meta.params.r == 1.3);
  CHECK(inst.meta.params.R == 1.8);
  CHECK(inst.meta.sentence == render(cs));
  CHECK(inst.meta.builder == "radial");
  CHECK(inst.pivots.size() == 50);
  int prev = 1 << 30;
  for (int i = 0; i < static_cast<int>(cs.length()); ++i) {
    CHECK(inst.blocks[i].role == BlockRole::kSentence);
    CHECK(inst.blocks[i].dim == static_cast<int>(basis_size(4 - cs.monomials[i].degree())));
    CHECK(inst.blocks[i].dim < prev);
    prev = inst.blocks[i].dim;
  }
  for (int k = 0; k < 50; ++k) CHECK(inst.rows[k].kind == RowKind::kPivot);
  CHECK_NOTHROW(inst.validate());
  CHECK_THROWS_AS(assemble_sdp(cs, {1.3, 1.8}, 8, 3, 50, 0), std::invalid_argument);
  CHECK_THROWS_AS(assemble_sdp(cs, {1.3, 1.8}, 8, 4, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(assemble_sdp(cs, {1.3, 1.8}, 0, 4, 5, 0), std::invalid_argument);
}

TEST_CASE("blocks nest across degrees") {
  const Sentence s = canonicalize(tokenize_and_parse("P7 <ES> P2 <ES> P1 <EOS>"));
  const GeometricParams g{1.3, 1.8};
  for (const auto& pv : generate_pivots(g, 10, 4)) {
    const auto lo = build_constraint_blocks(s, 2, pv, g);
    const auto hi = build_constraint_blocks(s, 4, pv, g);
    for (size_t i = 0; i < lo.size(); ++i) {
      for (int a = 0; a < lo[i].dim(); ++a) {
        for (int b = 0; b < lo[i].dim(); ++b) CHECK(lo[i](a, b) == hi[i](a, b));
      }
    }
  }
  const auto olo = build_objective_blocks(s, 2, g);
  const auto ohi = build_objective_blocks(s, 4, g);
  for (size_t i = 0; i < olo.size(); ++i) {
    for (int a = 0; a < olo[i].dim(); ++a) {
      for (int b = 0; b < olo[i].dim(); ++b) CHECK(olo[i](a, b) == ohi[i](a, b));
    }
  }
}

TEST_CASE("zero point satisfies every homogeneous row") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const Sentence s = random_sentence(rng, 2);
    for (const char* b : {"radial", "origin"}) {
      CompileOptions opt;
      opt.builder = builder_by_name(b);
      const SdpInstance inst = assemble_sdp(s, {1.25, 1.9}, 8, 2, 20, trial, opt);
      for (const auto& row : inst.rows) CHECK(row.rhs == 0);
      CHECK(inst.normalization.rhs == 1);
      SolverResult zero;
      for (const auto& blk : inst.blocks) zero.primal_blocks.emplace_back(blk.dim);
      const auto rep = verify_certificate(inst, zero);
      CHECK(rep.normalization_residual > 0);
      CHECK(rep.equality_residual == rep.normalization_residual);
    }
  }
}

TEST_CASE("bound scaling") {
  const auto& o = testutil::oracle();
  CHECK(to_double(compute_bound(Real(1), {1.0, 2.0}, 1).bound) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(compute_bound(Real(0), {1.3, 2.0}, 8).bound == 0);
  CHECK(to_double(compute_bound(Real(1), {2.0, 3.0}, 3).bound) ==
        doctest::Approx(o["bound_obj1_r2_n3"].get<double>()).epsilon(1e-14));
  const auto vols = o["ball_volume_half"];
  for (int n = 1; n <= 24; ++n) {
    CHECK(to_double(ball_volume(n, Real(0.5))) ==
          doctest::Approx(vols[std::to_string(n)].get<double>()).epsilon(1e-13));
  }
  const auto rep = compute_bound(Real(3), {1.5, 2.0}, 4, Real(2));
  CHECK(to_double(rep.bound) == doctest::Approx(2 * 3 * std::pow(1.5, 4)));
  CHECK(rep.n == 4);
  CHECK(to_double(rep.scaling_constant) == 2);
}

TEST_CASE("radial transform matches quadrature") {
  const auto& o = testutil::oracle();
  for (const auto& c : o["radial_cases"]) {
    const int n = c["n"];
    radial::UniPoly q;
    for (double x : c["q"]) q.push_back(Real(x));
    const auto p = radial::transform(q, n);
    for (size_t k = 0; k < c["radii"].size(); ++k) {
      const double rho = c["radii"][k];
      const Real y = 2 * real_pi() * Real(rho) * Real(rho);
      CHECK(to_double(radial::horner(p, y)) ==
            doctest::Approx(c["p_times_gauss_inverse"][k].get<double>()).epsilon(1e-9));
    }
  }
}

TEST_CASE("sdpa emission") {
  const SdpInstance tri =
      assemble_sdp(tokenize_and_parse("P7 <EOS>"), kUnit, 3, 0, 1, 0, origin_options());
  const std::string text = emit_sdpa(tri);
  CHECK(text == emit_sdpa(tri));
  const std::string golden = testutil::fixture_path("trivial.dat-s");
  REQUIRE(std::filesystem::exists(golden));
  CHECK(text == testutil::read_file(golden));
  const SdpInstance small = assemble_sdp(tokenize_and_parse("P7 <ES> P2 <EOS>"), {1.3, 1.8}, 8, 2, 20, 3);
  CHECK(emit_sdpa(small) == testutil::read_file(testutil::fixture_path("p7_p2_d2.dat-s")));

  const Sentence s = canonicalize(tokenize_and_parse("P7 <ES> P2 <ES> P1 <*> P6 <EOS>"));
  const SdpInstance inst = assemble_sdp(s, {1.3, 1.8}, 8, 3, 30, 2);
  const std::string big = emit_sdpa(inst);
  CHECK(big == emit_sdpa(inst));
  const SdpInstance back = read_sdpa(big);
  REQUIRE(back.num_blocks() == inst.num_blocks());
  REQUIRE(back.num_rows() == inst.num_rows());
  for (int b = 0; b < inst.num_blocks(); ++b) {
    const SymMatrix& want = inst.objective[b];
    const SymMatrix& got = back.objective[b];
    if (want.dim() == 0) {
      CHECK((got.dim() == 0 || got.is_zero()));
      continue;
    }
    REQUIRE(got.dim() == want.dim());
    for (int i = 0; i < want.dim(); ++i) {
      for (int j = 0; j < want.dim(); ++j) {
        CHECK(close40(got(i, j), want(i, j)));
      }
    }
  }
  for (int k = 0; k < inst.num_rows(); ++k) {
    CHECK(to_double(back.row(k).rhs) == to_double(inst.row(k).rhs));
    for (int b = 0; b < inst.num_blocks(); ++b) {
      SymMatrix want(inst.blocks[b].dim), got(inst.blocks[b].dim);
      for (const auto& t : inst.row(k).terms) {
        if (t.block != b) continue;
        const SymMatrix m = t.dense();
        for (int i = 0; i < m.dim(); ++i) {
          for (int j = 0; j < m.dim(); ++j) want.add(i, j, i <= j ? m(i, j) : Real(0));
        }
      }
      for (const auto& t : back.row(k).terms) {
        if (t.block != b) continue;
        const SymMatrix m = t.dense();
        for (int i = 0; i < m.dim(); ++i) {
          for (int j = 0; j < m.dim(); ++j) got.add(i, j, i <= j ? m(i, j) : Real(0));
        }
      }
      for (int i = 0; i < want.dim(); ++i) {
        for (int j = 0; j < want.dim(); ++j) {
          CHECK(close40(got(i, j), want(i, j)));
        }
      }
    }
  }
}
