#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "sdpgame/orchestrator.h"

using namespace sdpgame;
namespace fs = std::filesystem;

namespace {
const std::string kFixtures = SDPGAME_FIXTURES;
constexpr double kE8Density = 0.2536695079;

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (ok) return;
    if (pass) detail = what;
    pass = false;
  }
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

Eigen::MatrixXd to_eigen(const SymMatrix& m) {
  Eigen::MatrixXd a(m.dim(), m.dim());
  for (int i = 0; i < m.dim(); ++i) {
    for (int j = 0; j < m.dim(); ++j) a(i, j) = to_double(m(i, j));
  }
  return a;
}

Sentence random_sentence(std::mt19937_64& rng, int cap, int max_len) {
  const auto monos = enumerate_monomials(cap);
  std::uniform_int_distribution<size_t> pick(0, monos.size() - 1);
  std::uniform_int_distribution<int> len(1, max_len);
  Sentence s;
  for (int i = len(rng); i > 0; --i) s.monomials.push_back(monos[pick(rng)]);
  return canonicalize(s);
}

// Criterion 1: token reachability against enumeration, render/parse round trips.
void walk(std::vector<Token>& prefix, int cap, int mm, TokenOrder order,
          std::set<std::string>& reached, bool& ok) {
  const auto next = legal_next_tokens(prefix, cap, mm, order);
  if (is_complete(prefix)) {
    ok = ok && next.empty();
    reached.insert(render(reduce_sentence(sentence_from_tokens(prefix))));
    return;
  }
  if (next.empty()) ok = false;
  for (Token t : next) {
    prefix.push_back(t);
    walk(prefix, cap, mm, order, reached, ok);
    prefix.pop_back();
  }
}

Outcome grammar_oracle() {
  Outcome o;
  int suites = 0;
  for (TokenOrder order : {TokenOrder::kCanonical, TokenOrder::kFree}) {
    for (int cap = 0; cap <= 4; ++cap) {
      // Free factor order at cap 4 has too many token paths to walk.
      if (order == TokenOrder::kFree && cap > 3) continue;
      for (int mm = 1; mm <= 2; ++mm) {
        std::set<std::string> reached, expected;
        for (const auto& s : enumerate_sentences(cap, mm)) expected.insert(render(s));
        std::vector<Token> prefix;
        bool ok = true;
        walk(prefix, cap, mm, order, reached, ok);
        o.check(ok && reached == expected,
                "reachability mismatch at cap " + std::to_string(cap) + ", " +
                    std::to_string(mm) + " monomials");
        ++suites;
      }
    }
  }
  std::mt19937_64 rng(20261014);
  int failures = 0;
  for (int i = 0; i < 1000; ++i) {
    const Sentence s = random_sentence(rng, 6, 5);
    try {
      if (!(tokenize_and_parse(render(s)) == s)) ++failures;
    } catch (const ParseError&) {
      ++failures;
    }
  }
  o.check(failures == 0, std::to_string(failures) + " round-trip failures");
  if (o.pass) o.detail = std::to_string(suites) + " cap settings, 1000 round trips";
  return o;
}

// Criterion 2: basis sizes by brute force, monomial degrees against expansion.
Outcome basis_and_degree() {
  Outcome o;
  for (int d = 0; d <= 12; ++d) {
    size_t count = 0;
    for (int a = 0; a <= d; ++a) {
      for (int b = 0; 2 * b <= d; ++b) {
        for (int c = 0; c <= d; ++c) count += a + 2 * b + c <= d;
      }
    }
    o.check(basis_size(d) == count && basis_enumerate(d).size() == count,
            "basis size mismatch at d=" + std::to_string(d));
  }
  const GeometricParams g{1.2, 2.1};
  int checked = 0;
  for (const auto& m : enumerate_monomials(6)) {
    for (int pad = 0; pad <= 1; ++pad) {
      Monomial mp = m;
      mp.alpha[kNumBase - 1] += pad;
      const int symbolic = degree_and_symmetry(expand_monomial(mp, g)).degree;
      o.check(monomial_degree(mp) == symbolic, "degree mismatch for " + render_monomial(mp));
      ++checked;
    }
  }
  if (o.pass) o.detail = "d=0..12, " + std::to_string(checked) + " monomials";
  return o;
}

// Criterion 3: rank-one PSD constraint blocks and basis nesting.
Outcome sdp_structure() {
  Outcome o;
  std::mt19937_64 rng(3);
  const GeometricParams g{1.2, 1.9};
  const auto pivots = generate_pivots(g, 60, 5);
  std::uniform_int_distribution<size_t> pick(0, pivots.size() - 1);
  std::uniform_int_distribution<int> deg(0, 4);
  for (int trial = 0; trial < 50; ++trial) {
    const Sentence s = random_sentence(rng, 3, 3);
    const PivotPoint& pv = pivots[pick(rng)];
    int max_degree = 0;
    for (const auto& m : s.monomials) max_degree = std::max(max_degree, m.degree());
    const int d = std::max(max_degree, deg(rng));
    for (const auto& m : build_constraint_blocks(s, d, pv, g)) {
      const Eigen::MatrixXd a = to_eigen(m);
      const double norm = a.norm();
      if (norm == 0) continue;
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
      const auto sv = svd.singularValues();
      for (int k = 1; k < sv.size(); ++k) o.check(sv(k) <= 1e-10 * sv(0), "block rank above one");
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
      o.check(es.eigenvalues()(0) >= -1e-10 * norm, "block not PSD");
    }
  }
  auto nested = [](const std::vector<SymMatrix>& lo, const std::vector<SymMatrix>& hi) {
    if (lo.size() != hi.size()) return false;
    for (size_t i = 0; i < lo.size(); ++i) {
      if (lo[i].dim() > hi[i].dim()) return false;
      for (int a = 0; a < lo[i].dim(); ++a) {
        for (int b = 0; b < lo[i].dim(); ++b) {
          if (!(lo[i](a, b) == hi[i](a, b))) return false;
        }
      }
    }
    return true;
  };
  const GeometricParams g2{1.3, 1.8};
  for (int trial = 0; trial < 5; ++trial) {
    const Sentence s = random_sentence(rng, 2, 3);
    for (const auto& pv : generate_pivots(g2, 8, trial)) {
      for (auto [lo, hi] : {std::pair{2, 3}, {3, 4}, {2, 4}}) {
        o.check(nested(build_constraint_blocks(s, lo, pv, g2), build_constraint_blocks(s, hi, pv, g2)),
                "constraint blocks do not nest");
      }
    }
    for (auto [lo, hi] : {std::pair{2, 3}, {3, 4}, {2, 4}}) {
      o.check(nested(build_objective_blocks(s, lo, g2), build_objective_blocks(s, hi, g2)),
              "objective blocks do not nest");
    }
  }
  if (o.pass) o.detail = "50 (sentence, pivot) pairs, nesting over d in {2,3,4}";
  return o;
}

// Criterion 4: hand-built instances, verification and determinism.
BlockTerm dense_term(int block, std::vector<std::vector<double>> a) {
  BlockTerm t;
  t.block = block;
  t.dense_matrix = SymMatrix(static_cast<int>(a.size()));
  for (size_t i = 0; i < a.size(); ++i) {
    for (size_t j = i; j < a.size(); ++j) t.dense_matrix.set(i, j, Real(a[i][j]));
  }
  return t;
}

std::vector<std::pair<SdpInstance, double>> hand_instances() {
  std::vector<std::pair<SdpInstance, double>> out;
  {
    // x = 1; objective x.
    SdpInstance inst;
    inst.blocks.push_back({1, BlockRole::kSentence, 0});
    inst.normalization = ConstraintRow{RowKind::kNormalization, {dense_term(0, {{1}})}, Real(1)};
    inst.objective = {dense_term(0, {{1}}).dense_matrix};
    out.emplace_back(inst, 1.0);
  }
  {
    // Only X = (1,1)(1,1)^T is feasible.
    SdpInstance inst;
    inst.blocks.push_back({2, BlockRole::kSentence, 0});
    BlockTerm t;
    t.rank_one = true;
    t.weight = 1;
    t.factor = {Real(1), Real(-1)};
    inst.rows.push_back(ConstraintRow{RowKind::kPivot, {t}, Real(0)});
    inst.normalization =
        ConstraintRow{RowKind::kNormalization, {dense_term(0, {{1, 0}, {0, 0}})}, Real(1)};
    inst.objective = {dense_term(0, {{3, -1}, {-1, 1}}).dense_matrix};
    out.emplace_back(inst, 2.0);
  }
  {
    // X_12 = X_11 / 2, X_22 = 3 X_11, X_11 = 1 across two blocks with a
    // second 1x1 block pinned to 2.
    SdpInstance inst;
    inst.blocks.push_back({2, BlockRole::kSentence, 0});
    inst.blocks.push_back({1, BlockRole::kTail, -1});
    inst.rows.push_back(ConstraintRow{RowKind::kPivot, {dense_term(0, {{-1, 1}, {1, 0}})}, Real(0)});
    inst.rows.push_back(ConstraintRow{RowKind::kPivot, {dense_term(0, {{-3, 0}, {0, 1}})}, Real(0)});
    inst.rows.push_back(ConstraintRow{RowKind::kTail,
                                      {dense_term(0, {{-2, 0}, {0, 0}}), dense_term(1, {{1}})},
                                      Real(0)});
    inst.normalization =
        ConstraintRow{RowKind::kNormalization, {dense_term(0, {{1, 0}, {0, 0}})}, Real(1)};
    inst.objective = {dense_term(0, {{1, 2}, {2, 1}}).dense_matrix, dense_term(1, {{0.5}}).dense_matrix};
    out.emplace_back(inst, 7.0);
  }
  return out;
}

Outcome solver_suite() {
  Outcome o;
  const SolverSettings settings;
  for (const auto& [inst, expected] : hand_instances()) {
    for (auto method : {SolverMethod::kInteriorPoint, SolverMethod::kSplitting}) {
      SolverSettings s = settings;
      s.method = method;
      const SolverResult res = solve_embedded(inst, s);
      o.check(res.status == SolveStatus::kConverged, "hand instance did not converge");
      o.check(std::abs(to_double(res.objective_value) - expected) <= 1e-6,
              "hand instance objective off by " + fmt(to_double(res.objective_value) - expected));
    }
  }
  int verified = 0;
  for (const char* text : {"P2 <EOS>", "P7 <ES> P2 <EOS>", "P7 <ES> P2 <ES> P1 <EOS>"}) {
    const SdpInstance inst =
        assemble_sdp(canonicalize(tokenize_and_parse(text)), {1.3, 1.8}, 8, 2, 50, 0);
    const SolverResult res = solve_embedded(inst, settings);
    if (res.status != SolveStatus::kConverged) continue;
    const ResidualReport rep = verify_certificate(inst, res);
    o.check(std::abs(to_double(rep.objective_recomputed - res.objective_value)) <= 10 * settings.tol_eq,
            std::string("recomputed objective drifts for ") + text);
    o.check(rep.equality_residual <= 10 * settings.tol_eq, std::string("residual too large for ") + text);
    ++verified;
  }
  o.check(verified >= 2, "too few compiled instances converged");
  const SdpInstance inst =
      assemble_sdp(canonicalize(tokenize_and_parse("P7 <ES> P2 <ES> P1 <EOS>")), {1.3, 1.8}, 8, 3, 50, 0);
  const SolverResult first = solve_embedded(inst, settings);
  for (int i = 0; i < 5; ++i) {
    const SolverResult again = solve_embedded(inst, settings);
    bool same = again.status == first.status && again.iterations == first.iterations &&
                again.objective_value == first.objective_value &&
                again.primal_blocks.size() == first.primal_blocks.size();
    for (size_t b = 0; same && b < first.primal_blocks.size(); ++b) {
      const SymMatrix &x = first.primal_blocks[b], &y = again.primal_blocks[b];
      same = x.dim() == y.dim();
      for (int p = 0; same && p < x.dim(); ++p) {
        for (int q = 0; same && q < x.dim(); ++q) same = x(p, q) == y(p, q);
      }
    }
    o.check(same, "repeated solve differs");
  }
  if (o.pass) {
    o.detail = "3 hand instances x 2 methods, " + std::to_string(verified) +
               " verified certificates, 5 identical repeats";
  }
  return o;
}

// Criterion 5: objective(d=4) <= objective(d=2) on converged random sentences.
Outcome monotone_in_degree(double budget) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(5);
  const auto candidates = enumerate_sentences(2, 3);
  std::vector<size_t> order(candidates.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  const GeometricParams g{1.3, 1.8};
  int pairs = 0, tried = 0;
  double worst = -INFINITY;
  for (size_t idx : order) {
    if (pairs == 10) break;
    if (std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() > budget) break;
    const Sentence& s = candidates[idx];
    ++tried;
    const SolverResult lo = solve_embedded(assemble_sdp(s, g, 8, 2, 50, 0));
    if (lo.status != SolveStatus::kConverged) continue;
    const SolverResult hi = solve_embedded(assemble_sdp(s, g, 8, 4, 50, 0));
    if (hi.status != SolveStatus::kConverged) continue;
    const double diff = to_double(hi.objective_value - lo.objective_value);
    worst = std::max(worst, diff);
    o.check(diff <= 1e-6, "objective rose with degree for " + render(s) + " by " + fmt(diff));
    ++pairs;
  }
  o.check(pairs == 10, "only " + std::to_string(pairs) + " converged pairs in " +
                           std::to_string(tried) + " sentences");
  if (o.pass) {
    o.detail = "10 converged pairs from " + std::to_string(tried) +
               " sentences, max objective change " + fmt(worst);
  }
  return o;
}

// Criterion 6: tree search finds the exhaustive optimum on enumerable caps.
double hashed_bound(const Sentence& s, int) {
  uint64_t h = std::hash<std::string>{}(render(s));
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  return 0.1 + static_cast<double>(h % 1000003) / 1000003.0;
}

int count_terminal_paths(std::vector<Token> prefix, const SearchCaps& caps) {
  const auto next = legal_next_tokens(prefix, caps.degree_cap, caps.max_monomials, caps.order);
  if (next.empty()) return is_complete(prefix) ? 1 : 0;
  int total = 0;
  for (Token t : next) {
    prefix.push_back(t);
    total += count_terminal_paths(prefix, caps);
    prefix.pop_back();
  }
  return total;
}

Outcome mcts_oracle() {
  Outcome o;
  int settings = 0, runs = 0;
  for (int cap = 0; cap <= 4; ++cap) {
    for (int mm = 1; mm <= 3; ++mm) {
      const SearchCaps caps{cap, mm, TokenOrder::kCanonical};
      const int paths = count_terminal_paths({}, caps);
      if (paths > 200) continue;
      ++settings;
      Sentence best;
      double best_y = INFINITY;
      for (const Sentence& s : enumerate_sentences(cap, mm)) {
        const double y = hashed_bound(s, 2);
        if (y < best_y || (y == best_y && sentence_less(s, best))) {
          best_y = y;
          best = s;
        }
      }
      for (uint64_t seed = 0; seed < 10; ++seed) {
        SyntheticEvaluator eval(hashed_bound);
        SearchOptions opt;
        opt.iterations = 20 * paths;
        opt.d_search = opt.d_final = 2;
        opt.caps = caps;
        opt.seed = seed;
        const SearchOutcome out = run_search(eval, opt);
        const std::string where = "caps (" + std::to_string(cap) + "," + std::to_string(mm) +
                                  ") seed " + std::to_string(seed);
        o.check(out.best == best && out.final_eval.bound == best_y, "missed optimum at " + where);
        o.check(out.audit.empty(), "audit failed at " + where + ": " + out.audit);
        ++runs;
      }
    }
  }
  o.check(settings >= 4, "too few enumerable cap settings");
  if (o.pass) o.detail = std::to_string(settings) + " cap settings x 10 seeds, " + std::to_string(runs) + " audits";
  return o;
}

// Criterion 7: surrogate interpolation, EI sign, box safety, bowl concentration.
Outcome bo_suite() {
  Outcome o;
  const SearchBox box{1.0, 1.5, 1.6, 2.4};
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ur(box.r_min, box.r_max), uR(box.R_min, box.R_max);
  std::vector<Observation> data;
  for (int i = 0; i < 20; ++i) {
    const GeometricParams x{ur(rng), uR(rng)};
    data.push_back({x, std::sin(3 * x.r) + std::cos(2 * x.R) + 0.1 * x.r * x.R});
  }
  SurrogateOptions exact;
  exact.fit_noise = false;
  exact.noise_floor = 1e-14;
  const Surrogate s = fit_surrogate(data, box, 2, exact);
  for (const auto& ob : s.data()) {
    o.check(std::abs(s.posterior(ob.x).mu - ob.y) <= 1e-6 * s.signal_scale(), "interpolation error");
  }
  double min_ei = INFINITY;
  for (int i = 0; i < 100; ++i) {
    for (int j = 0; j < 100; ++j) {
      const GeometricParams x{box.r_min + (box.r_max - box.r_min) * i / 99.0,
                              box.R_min + (box.R_max - box.R_min) * j / 99.0};
      min_ei = std::min(min_ei, acquisition_value(s, x));
    }
  }
  o.check(min_ei >= 0, "negative EI " + fmt(min_ei));

  const SearchBox overlap{1.0, 2.0, 1.5, 2.5};
  const Surrogate so = fit_surrogate(
      std::vector<Observation>{{{1.1, 1.8}, 0.4}, {{1.6, 2.2}, 0.5}, {{1.9, 2.4}, 0.3}, {{1.3, 1.6}, 0.6}},
      overlap, 1);
  AcquisitionOptions quick;
  quick.candidates = 32;
  quick.local_starts = 1;
  int outside = 0;
  for (uint64_t seed = 0; seed < 10000; ++seed) {
    quick.kind = static_cast<AcquisitionKind>(seed % 3);
    const GeometricParams x = propose_next(seed % 2 ? so : Surrogate{}, overlap, seed, quick);
    outside += !(overlap.contains(x) && x.r < x.R);
  }
  o.check(outside == 0, std::to_string(outside) + " proposals outside the box");

  auto bowl = [](const GeometricParams& x) {
    return (x.r - 1.2) * (x.r - 1.2) + 0.5 * (x.R - 1.9) * (x.R - 1.9) + 0.3;
  };
  auto distance = [&](const GeometricParams& x) {
    const auto u = box.normalize(x), m = box.normalize({1.2, 1.9});
    return std::hypot(u[0] - m[0], u[1] - m[1]);
  };
  constexpr int kSeeds = 20;
  std::vector<double> d10(kSeeds), d100(kSeeds);
  auto campaign = [&](int seed) {
    std::vector<Observation> obs;
    for (int round = 1; round <= 100; ++round) {
      const uint64_t rs = 1000 * static_cast<uint64_t>(seed) + round;
      const Surrogate sur = obs.empty() ? Surrogate{} : fit_surrogate(obs, box, rs);
      const GeometricParams x = propose_next(sur, box, rs);
      if (round == 10) d10[seed] = distance(x);
      if (round == 100) d100[seed] = distance(x);
      obs.push_back({x, bowl(x)});
    }
  };
  const int workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), kSeeds));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int seed = w; seed < kSeeds; seed += workers) campaign(seed);
    });
  }
  for (auto& t : pool) t.join();
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
  };
  const double m10 = median(d10), m100 = median(d100);
  o.check(m100 < m10, "round-100 median distance " + fmt(m100) + " not below round-10 " + fmt(m10));
  if (o.pass) {
    o.detail = "min EI " + fmt(min_ei) + ", median distance round 10 " + fmt(m10) +
               " -> round 100 " + fmt(m100);
  }
  return o;
}

// Criterion 8: the desk campaign, checking every converged evaluation.
class RecordingEvaluator : public SentenceEvaluator {
 public:
  RecordingEvaluator(std::unique_ptr<SentenceEvaluator> inner, std::vector<double>& bounds)
      : inner_(std::move(inner)), bounds_(bounds) {}
  Evaluation evaluate(const Sentence& s, int d) override {
    Evaluation e = inner_->evaluate(s, d);
    if (e.converged) bounds_.push_back(e.bound);
    return e;
  }

 private:
  std::unique_ptr<SentenceEvaluator> inner_;
  std::vector<double>& bounds_;
};

Outcome desk_campaign() {
  Outcome o;
  CampaignConfig c;
  c.n = 8;
  c.d_search = 2;
  c.d_final = 4;
  c.K = 50;
  c.budget_rounds = 10;
  c.out_dir = (fs::temp_directory_path() / "sdpgame_acceptance_desk").string();
  fs::remove_all(c.out_dir);
  std::vector<double> bounds;
  const EvaluatorFactory base = sdp_evaluator_factory();
  const EvaluatorFactory recording = [&](const CampaignConfig& cfg, const GeometricParams& x,
                                         uint64_t seed) -> std::unique_ptr<SentenceEvaluator> {
    return std::make_unique<RecordingEvaluator>(base(cfg, x, seed), bounds);
  };
  const CampaignResult res = run_campaign(c, false, recording);
  int converged = 0;
  double lowest = INFINITY;
  for (const auto& r : res.state.rounds) {
    if (!r.converged()) continue;
    ++converged;
    lowest = std::min(lowest, r.bound);
  }
  for (double b : bounds) lowest = std::min(lowest, b);
  o.check(res.state.rounds.size() == 10, "campaign stopped early");
  o.check(converged >= 1, "no converged round");
  o.check(lowest >= kE8Density - 1e-6, "bound " + fmt(lowest) + " below the E8 density");
  if (o.pass) {
    o.detail = std::to_string(converged) + "/10 rounds converged, " + std::to_string(bounds.size()) +
               " converged solves, lowest bound " + fmt(lowest);
  }
  return o;
}

// Criterion 9: golden SDPA text, state round trips, report CSVs.
Outcome file_formats() {
  Outcome o;
  CompileOptions origin;
  origin.builder = builder_by_name("origin");
  o.check(emit_sdpa(assemble_sdp(tokenize_and_parse("P7 <EOS>"), {1.0, 2.0}, 3, 0, 1, 0, origin)) ==
              read_file(kFixtures + "/trivial.dat-s"),
          "trivial.dat-s differs");
  o.check(emit_sdpa(assemble_sdp(tokenize_and_parse("P7 <ES> P2 <EOS>"), {1.3, 1.8}, 8, 2, 20, 3)) ==
              read_file(kFixtures + "/p7_p2_d2.dat-s"),
          "p7_p2_d2.dat-s differs");

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 1);
  GameState st;
  for (int i = 1; i <= 100; ++i) {
    RoundRecord r;
    r.round = i;
    r.r = 1 + u(rng) / 3;
    r.R = 1.5 + u(rng);
    r.n = 8;
    r.d_search = 2;
    r.d_final = 4;
    r.K = 50;
    const bool ok = i % 7 != 0;
    r.status = ok ? "converged" : "numeric-failure";
    r.sentence = ok ? "P7 <ES> P2 <EOS>" : "";
    r.objective = ok ? 1 + u(rng) : NAN;
    r.bound = ok ? 0.25 + u(rng) : NAN;
    r.equality_residual = u(rng) * 1e-9;
    r.psd_residual = -u(rng) * 1e-12;
    r.relative_gap = u(rng) * 1e-8;
    r.wall_bo = u(rng);
    r.wall_search = u(rng) * 10;
    r.wall_final = u(rng);
    r.seed_bo = rng();
    r.seed_search = rng();
    r.solver_calls = static_cast<int>(rng() % 100);
    r.message = i % 3 ? "" : "note \"quoted\"\n";
    st.append(r);
  }
  const fs::path p = fs::temp_directory_path() / "sdpgame_acceptance_state.jsonl";
  persist(st, p.string());
  const GameState back = load(p.string());
  o.check(back == st, "100-round state does not round trip");
  const GameState report = load(kFixtures + "/report_state.jsonl");
  const ReferenceSet ref = load_reference_set(kFixtures + "/reference_basic.txt");
  o.check(degrees_csv({report}) == read_file(kFixtures + "/report_degrees.csv"), "degrees.csv differs");
  o.check(trace_csv(report) == read_file(kFixtures + "/report_trace.csv"), "trace.csv differs");
  o.check(novelty_csv(report, ref) == read_file(kFixtures + "/report_novelty.csv"), "novelty.csv differs");
  if (o.pass) o.detail = "2 SDPA goldens, 100-round state, 3 CSV fixtures";
  return o;
}
}  // namespace

// Optional arguments pick criteria by number.
int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  struct Criterion {
    int id;
    const char* name;
    double limit;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "grammar oracle", 10, grammar_oracle},
      {2, "basis and degree", 30, basis_and_degree},
      {3, "SDP structure", 60, sdp_structure},
      {4, "solver", 120, solver_suite},
      {5, "monotonicity in d", 120, [] { return monotone_in_degree(120); }},
      {6, "MCTS oracle", 60, mcts_oracle},
      {7, "BO", 120, bo_suite},
      {8, "desk campaign", 900, desk_campaign},
      {9, "file formats", 10, file_formats},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.limit) {
      o.detail += (o.detail.empty() ? "" : "; ") + std::string("over the runtime limit");
      o.pass = false;
    }
    failed += !o.pass;
    std::cout << "criterion " << c.id << " (" << c.name << "): " << (o.pass ? "PASS" : "FAIL")
              << "  " << o.detail << "  [" << fmt(secs) << " s, limit " << c.limit << " s]"
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
