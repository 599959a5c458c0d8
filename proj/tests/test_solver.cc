#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <random>

#include "sdpgame/compiler.h"
#include "sdpgame/solver.h"
#include "test_util.h"

using namespace sdpgame;

namespace {
BlockTerm dense_term(int block, std::vector<std::vector<double>> a) {
  BlockTerm t;
  t.block = block;
  t.dense_matrix = SymMatrix(static_cast<int>(a.size()));
  for (size_t i = 0; i < a.size(); ++i) {
    for (size_t j = i; j < a.size(); ++j) t.dense_matrix.set(i, j, Real(a[i][j]));
  }
  return t;
}

SymMatrix sym(std::vector<std::vector<double>> a) { return dense_term(0, a).dense_matrix; }

// One 1x1 block, no homogeneous rows, x = 1, objective x.
SdpInstance trivial_instance() {
  SdpInstance inst;
  inst.blocks.push_back({1, BlockRole::kSentence, 0});
  inst.normalization = ConstraintRow{RowKind::kNormalization, {dense_term(0, {{1}})}, Real(1)};
  inst.objective = {sym({{1}})};
  return inst;
}

// (1,-1)(1,-1)^T . X = 0 and X_11 = 1 leave only X = (1,1)(1,1)^T. The
// objective is chosen so the dual optimum is attained: C (1,1) = 2 e_1.
SdpInstance rank_one_instance() {
  SdpInstance inst;
  inst.blocks.push_back({2, BlockRole::kSentence, 0});
  BlockTerm t;
  t.block = 0;
  t.rank_one = true;
  t.weight = 1;
  t.factor = {Real(1), Real(-1)};
  inst.rows.push_back(ConstraintRow{RowKind::kPivot, {t}, Real(0)});
  inst.normalization =
      ConstraintRow{RowKind::kNormalization, {dense_term(0, {{1, 0}, {0, 0}})}, Real(1)};
  inst.objective = {sym({{3, -1}, {-1, 1}})};
  return inst;
}

SdpInstance compiled(const std::string& text, int d, double r = 1.3, double R = 1.8) {
  return assemble_sdp(canonicalize(tokenize_and_parse(text)), {r, R}, 8, d, 50, 0);
}

SolverResult parse_fixture(const std::string& name) {
  return parse_external_output(testutil::read_file(testutil::fixture_path(name)));
}
}  // namespace

TEST_CASE("status names") {
  for (auto s : {SolveStatus::kConverged, SolveStatus::kMaxIterations, SolveStatus::kInfeasible,
                 SolveStatus::kNumericFailure}) {
    CHECK(status_from_name(status_name(s)) == s);
  }
  CHECK(status_name(SolveStatus::kInfeasible) == "infeasible-detected");
  CHECK_THROWS(status_from_name("optimal"));
}

TEST_CASE("trivial instance") {
  const SdpInstance inst = trivial_instance();
  REQUIRE_NOTHROW(inst.validate());
  for (auto method : {SolverMethod::kInteriorPoint, SolverMethod::kSplitting}) {
    SolverSettings s;
    s.method = method;
    const SolverResult res = solve_embedded(inst, s);
    CHECK(res.status == SolveStatus::kConverged);
    CHECK(to_double(res.objective_value) == doctest::Approx(1).epsilon(1e-8));
    CHECK(res.equality_residual <= 1e-8);
  }
  SolverResult exact;
  exact.primal_blocks = {sym({{1}})};
  const auto rep = verify_certificate(inst, exact);
  CHECK(rep.equality_residual == 0);
  CHECK(rep.psd_residual == 1);
  CHECK(rep.objective_recomputed == 1);
}

TEST_CASE("unique rank-one solution") {
  const SdpInstance inst = rank_one_instance();
  const SolverResult res = solve_embedded(inst, SolverSettings{});
  CHECK(res.status == SolveStatus::kConverged);
  CHECK(std::abs(to_double(res.objective_value) - 2) <= 1e-6);
  REQUIRE(res.primal_blocks.size() == 1);
  CHECK(to_double(res.primal_blocks[0](0, 1)) == doctest::Approx(1).epsilon(1e-6));
  CHECK(to_double(res.primal_blocks[0](1, 1)) == doctest::Approx(1).epsilon(1e-6));

  SolverSettings split;
  split.method = SolverMethod::kSplitting;
  const SolverResult sres = solve_embedded(inst, split);
  CHECK(sres.status == SolveStatus::kConverged);
  CHECK(std::abs(to_double(sres.objective_value) - 2) <= 1e-6);
}

TEST_CASE("unique positive definite solution") {
  // X_11 = 1, X_12 = X_11 / 2, X_22 = 3 X_11; objective X_11 + 4 X_12 + X_22 = 6.
  SdpInstance inst;
  inst.blocks.push_back({2, BlockRole::kSentence, 0});
  inst.rows.push_back(ConstraintRow{RowKind::kPivot, {dense_term(0, {{-1, 1}, {1, 0}})}, Real(0)});
  inst.rows.push_back(ConstraintRow{RowKind::kPivot, {dense_term(0, {{-3, 0}, {0, 1}})}, Real(0)});
  inst.normalization =
      ConstraintRow{RowKind::kNormalization, {dense_term(0, {{1, 0}, {0, 0}})}, Real(1)};
  inst.objective = {sym({{1, 2}, {2, 1}})};
  for (auto method : {SolverMethod::kInteriorPoint, SolverMethod::kSplitting}) {
    SolverSettings s;
    s.method = method;
    const SolverResult res = solve_embedded(inst, s);
    CHECK(res.status == SolveStatus::kConverged);
    CHECK(std::abs(to_double(res.objective_value) - 6) <= 1e-6);
  }
}

TEST_CASE("iteration limit zero") {
  const SolverResult res = solve_embedded(rank_one_instance(), 1e-8, 1e-8, 0);
  CHECK(res.status == SolveStatus::kMaxIterations);
  CHECK(res.iterations == 0);
  CHECK(res.equality_residual > 0);
  CHECK(res.primal_blocks.size() == 1);
  CHECK_THROWS_AS(solve_embedded(rank_one_instance(), 0, 1e-8, 10), std::invalid_argument);
}

TEST_CASE("verification of perturbed blocks") {
  const SdpInstance inst = rank_one_instance();
  SolverResult res;
  res.primal_blocks = {sym({{1, 1}, {1, 1}})};
  auto rep = verify_certificate(inst, res);
  CHECK(rep.equality_residual == 0);
  CHECK(rep.objective_recomputed == 2);
  res.primal_blocks[0].add(0, 0, Real(1e-6));
  res.primal_blocks[0].add(1, 1, Real(1e-6));
  rep = verify_certificate(inst, res);
  // Row (1,-1)(1,-1)^T gains 2e-6 over norm 2; the normalization row gains 1e-6.
  CHECK(rep.equality_residual == doctest::Approx(1e-6).epsilon(1e-9));
  CHECK(rep.normalization_residual == doctest::Approx(1e-6).epsilon(1e-9));
  CHECK(to_double(rep.objective_recomputed) == doctest::Approx(2 + 4e-6).epsilon(1e-12));

  res.primal_blocks = {SymMatrix(3)};
  CHECK_THROWS_AS(verify_certificate(inst, res), std::invalid_argument);
  res.primal_blocks = {};
  CHECK_THROWS_AS(verify_certificate(inst, res), std::invalid_argument);
}

TEST_CASE("recomputed objective is the trace sum") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    SdpInstance inst;
    SolverResult res;
    double want = 0;
    for (int b = 0; b < 3; ++b) {
      const int n = 1 + b;
      inst.blocks.push_back({n, BlockRole::kSentence, b});
      SymMatrix C(n), X(n);
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
          C.set(i, j, Real(u(rng)));
          X.set(i, j, Real(u(rng)));
        }
      }
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) want += to_double(C(i, j)) * to_double(X(i, j));
      }
      inst.objective.push_back(C);
      res.primal_blocks.push_back(X);
    }
    inst.normalization = ConstraintRow{RowKind::kNormalization, {dense_term(0, {{1}})}, Real(1)};
    CHECK(to_double(verify_certificate(inst, res).objective_recomputed) ==
          doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("compiled instances solve and verify") {
  const SdpInstance inst = compiled("P2 <ES> P6 <ES> P2 <*> P6 <EOS>", 4);
  const SolverResult res = solve_embedded(inst);
  REQUIRE(res.status == SolveStatus::kConverged);
  const auto rep = verify_certificate(inst, res);
  CHECK(rep.equality_residual <= 1e-8);
  CHECK(rep.psd_residual >= -1e-8);
  CHECK(std::abs(to_double(rep.objective_recomputed - res.objective_value)) <= 1e-7);
  for (size_t i = 1; i < res.checkpoints.size(); ++i) {
    CHECK(res.checkpoints[i].best_equality_residual <=
          res.checkpoints[i - 1].best_equality_residual);
  }
  const auto b = compute_bound(res.objective_value, inst.meta.params, 8);
  CHECK(to_double(b.bound) >= testutil::oracle()["e8_density"].get<double>() - 1e-6);
}

TEST_CASE("solves are deterministic") {
  const SdpInstance inst = compiled("P7 <ES> P2 <ES> P1 <EOS>", 3);
  const SolverResult first = solve_embedded(inst);
  for (int i = 0; i < 5; ++i) {
    const SolverResult again = solve_embedded(inst);
    CHECK(again.status == first.status);
    CHECK(again.iterations == first.iterations);
    CHECK(again.objective_value == first.objective_value);
    CHECK(again.equality_residual == first.equality_residual);
    REQUIRE(again.primal_blocks.size() == first.primal_blocks.size());
    for (size_t b = 0; b < first.primal_blocks.size(); ++b) {
      CHECK(again.primal_blocks[b].frobenius_norm() == first.primal_blocks[b].frobenius_norm());
    }
  }
}

TEST_CASE("objective does not increase with degree") {
  for (const char* s : {"P2 <ES> P6 <ES> P2 <*> P6 <EOS>", "P7 <ES> P2 <ES> P1 <EOS>",
                        "P2 <*> P4 <ES> P6 <EOS>"}) {
    const SolverResult lo = solve_embedded(compiled(s, 2));
    const SolverResult hi = solve_embedded(compiled(s, 4));
    CAPTURE(s);
    if (lo.status != SolveStatus::kConverged || hi.status != SolveStatus::kConverged) continue;
    CHECK(to_double(hi.objective_value) <= to_double(lo.objective_value) + 2e-7);
  }
}

TEST_CASE("sdpa round trip through the reader") {
  const SdpInstance inst = rank_one_instance();
  const SdpInstance back = read_sdpa(emit_sdpa(inst));
  const SolverResult a = solve_embedded(inst);
  const SolverResult b = solve_embedded(back);
  CHECK(b.status == SolveStatus::kConverged);
  CHECK(a.status == SolveStatus::kConverged);
  CHECK(std::abs(to_double(b.objective_value - a.objective_value)) <= 1e-6);
  CHECK_THROWS_AS(read_sdpa("2\n1\n"), FormatError);
  CHECK_THROWS_AS(read_sdpa("1\n1\n2\n1\n0 1 1 3 1.0\n"), FormatError);
}

TEST_CASE("external output parsing") {
  const SolverResult opt = parse_fixture("sdpa_pdopt.out");
  CHECK(opt.status == SolveStatus::kConverged);
  CHECK(opt.objective_value == Real("7.0000000000000000000000000000012345678901"));
  CHECK(opt.dual_objective == Real("7.0000000000000000000000000000098765432109"));
  CHECK(opt.iterations == 14);
  CHECK(opt.relative_gap == doctest::Approx(3.1e-30));
  REQUIRE(opt.primal_blocks.size() == 1);
  CHECK(opt.primal_blocks[0].dim() == 2);
  CHECK(opt.primal_blocks[0](0, 1) == 1);

  CHECK(parse_fixture("sdpa_pdinf.out").status == SolveStatus::kInfeasible);
  CHECK(parse_fixture("sdpa_pdinf.out").primal_blocks.empty());
  CHECK_THROWS_AS(parse_fixture("sdpa_truncated.out"), FormatError);
  CHECK_THROWS_AS(parse_fixture("sdpa_cut.out"), FormatError);
  try {
    parse_fixture("sdpa_cut.out");
  } catch (const FormatError& e) {
    CHECK(e.line() >= 1);
  }
  for (const char* phase : {"noINFO", "pFEAS", "dFEAS", "pdFEAS"}) {
    const std::string text = std::string("phase.value = ") + phase + "\nobjValPrimal = 1\n";
    CHECK(parse_external_output(text).status == SolveStatus::kMaxIterations);
  }
  for (const char* phase : {"pINF_dFEAS", "pFEAS_dINF", "pUNBD", "dUNBD"}) {
    const std::string text = std::string("phase.value = ") + phase + "\nobjValPrimal = 1\n";
    CHECK(parse_external_output(text).status == SolveStatus::kInfeasible);
  }
}

TEST_CASE("external solver through a command") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "sdpgame_test_external";
  fs::remove_all(dir);
  ExternalSolverConfig cfg;
  cfg.work_dir = dir.string();
  cfg.command = "test -s {input} && cp " + testutil::fixture_path("sdpa_pdopt.out") + " {output}";
  const SolverResult res = solve_external(rank_one_instance(), cfg);
  CHECK(res.status == SolveStatus::kConverged);
  CHECK(res.equality_residual == 0);
  CHECK(fs::exists(dir / "instance.dat-s"));

  cfg.command = "false";
  CHECK(solve_external(rank_one_instance(), cfg).status == SolveStatus::kNumericFailure);
  cfg.command = "cp " + testutil::fixture_path("sdpa_truncated.out") + " {output}";
  CHECK(solve_external(rank_one_instance(), cfg).status == SolveStatus::kNumericFailure);
  cfg.command.clear();
  CHECK(solve_external(rank_one_instance(), cfg).status == SolveStatus::kNumericFailure);
  fs::remove_all(dir);
}
