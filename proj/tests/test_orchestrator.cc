#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "sdpgame/orchestrator.h"

using namespace sdpgame;
namespace fs = std::filesystem;

namespace {
std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("sdpgame_orch_" + name);
  fs::remove_all(dir);
  return dir;
}

double bowl(const GeometricParams& x) {
  return 0.3 + (x.r - 1.3) * (x.r - 1.3) + (x.R - 1.8) * (x.R - 1.8);
}

// Bound = bowl(r, R) plus a small sentence-dependent term; `fail_all` turns
// every evaluation into a failure.
EvaluatorFactory synthetic_factory(const bool* fail_all = nullptr) {
  return [fail_all](const CampaignConfig&, const GeometricParams& x,
                    uint64_t) -> std::unique_ptr<SentenceEvaluator> {
    return std::make_unique<SyntheticEvaluator>([x, fail_all](const Sentence& s, int d) -> double {
      if (fail_all && *fail_all) return NAN;
      if (s.monomials.empty()) return NAN;
      double extra = 0;
      for (const auto& m : s.monomials) extra += 0.01 * (m.degree() + 1);
      return bowl(x) + extra - 1e-4 * d;
    });
  };
}

CampaignConfig small_config(const fs::path& dir) {
  CampaignConfig c;
  c.d_search = 2;
  c.d_final = 4;
  c.mcts_iterations = 20;
  c.max_monomials = 2;
  c.candidates = 64;
  c.budget_rounds = 6;
  c.seed = 11;
  c.out_dir = dir.string();
  return c;
}

RoundRecord without_walls(RoundRecord r) {
  r.wall_bo = r.wall_search = r.wall_final = 0;
  return r;
}

void check_best(const GameState& st) {
  int expect = -1;
  for (size_t i = 0; i < st.rounds.size(); ++i) {
    const auto& r = st.rounds[i];
    if (!r.converged()) continue;
    if (expect < 0 || r.bound < st.rounds[expect].bound) expect = static_cast<int>(i);
  }
  CHECK(st.best == expect);
}
}  // namespace

TEST_CASE("config round trip and validation") {
  CampaignConfig c;
  c.n = 5;
  c.box.r_min = 1.05;
  c.kappa = 0.1 + 0.2;
  c.seed = 18446744073709551615ULL;
  c.acquisition = "rank";
  c.reference_set = "refs.txt";
  const CampaignConfig back = config_from_json(config_to_json(c));
  CHECK(back == c);
  CHECK(back.kappa == c.kappa);
  CHECK(back.seed == c.seed);

  try {
    config_from_json(R"({"n": 8, "pivot_count": 3})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("pivot_count") != std::string::npos);
  }
  CHECK_THROWS_AS(config_from_json(R"({"n": "eight"})"), ConfigError);
  CHECK_THROWS_AS(config_from_json("[1, 2]"), ConfigError);
  CHECK_THROWS_AS(config_from_json("{"), ConfigError);
  CHECK(config_from_json(R"({"K": 7})").K == 7);

  auto invalid = [](std::function<void(CampaignConfig&)> edit, const std::string& field) {
    CampaignConfig c;
    edit(c);
    try {
      c.validate();
      FAIL("expected ConfigError for " << field);
    } catch (const ConfigError& e) {
      CHECK_MESSAGE(std::string(e.what()).find(field) != std::string::npos, e.what());
    }
  };
  invalid([](auto& c) { c.n = 0; }, "n");
  invalid([](auto& c) { c.d_final = 2; }, "d_final");
  invalid([](auto& c) { c.K = 0; }, "K");
  invalid([](auto& c) { c.degree_cap = 9; }, "degree_cap");
  invalid([](auto& c) { c.solver = "remote"; }, "solver");
  invalid([](auto& c) { c.solver = "external"; }, "solver_cmd");
  invalid([](auto& c) { c.budget_rounds = -1; }, "budget_rounds");
  invalid([](auto& c) { c.acquisition = "best"; }, "acquisition");
  CHECK_NOTHROW(CampaignConfig{}.validate());
}

TEST_CASE("first rounds follow the initial design") {
  const fs::path dir = fresh_dir("design");
  CampaignConfig c = small_config(dir);
  const auto design = initial_design(c.box, c.initial_points, c.seed);
  GameState st;
  for (int i = 0; i < c.initial_points; ++i) {
    st = play_round(st, c, synthetic_factory());
    CHECK(st.rounds.back().round == i + 1);
    CHECK(st.rounds.back().r == design[i].r);
    CHECK(st.rounds.back().R == design[i].R);
    CHECK(st.rounds.back().converged());
    CHECK(st.rounds.back().sentence.size() > 0);
  }
  st = play_round(st, c, synthetic_factory());
  const RoundRecord& r4 = st.rounds.back();
  CHECK(r4.r < r4.R);
  CHECK(r4.r >= c.box.r_min);
  CHECK(r4.R <= c.box.R_max);
  check_best(st);
}

TEST_CASE("failed rounds are recorded and keep the best") {
  const fs::path dir = fresh_dir("failed");
  CampaignConfig c = small_config(dir);
  bool fail = false;
  GameState st;
  st = play_round(st, c, synthetic_factory(&fail));
  st = play_round(st, c, synthetic_factory(&fail));
  const int best = st.best;
  const double best_bound = st.best_round()->bound;
  fail = true;
  st = play_round(st, c, synthetic_factory(&fail));
  REQUIRE(st.rounds.size() == 3);
  CHECK(st.rounds.back().status == "search-failed");
  CHECK(std::isnan(st.rounds.back().bound));
  CHECK(!st.rounds.back().message.empty());
  CHECK(st.best == best);
  CHECK(st.best_round()->bound == best_bound);

  // A throwing factory is a failed round as well.
  st = play_round(st, c, [](const CampaignConfig&, const GeometricParams&, uint64_t)
                             -> std::unique_ptr<SentenceEvaluator> {
    throw std::runtime_error("compile exploded");
  });
  CHECK(st.rounds.back().status == "search-failed");
  CHECK(st.rounds.back().message.find("compile exploded") != std::string::npos);
  CHECK(st.best == best);
}

TEST_CASE("campaigns are deterministic and append only") {
  const fs::path d1 = fresh_dir("det1"), d2 = fresh_dir("det2");
  std::vector<std::string> prefixes;
  CampaignConfig c1 = small_config(d1);
  const auto r1 = run_campaign(c1, false, synthetic_factory(), [&](const RoundRecord&) {
    prefixes.push_back(read_file(d1 / "state.jsonl"));
  });
  const auto r2 = run_campaign(small_config(d2), false, synthetic_factory());
  CHECK(r1.rounds_played == 6);
  CHECK(r1.stop_reason == "rounds");
  REQUIRE(r1.state.rounds.size() == r2.state.rounds.size());
  for (size_t i = 0; i < r1.state.rounds.size(); ++i) {
    CHECK(without_walls(r1.state.rounds[i]) == without_walls(r2.state.rounds[i]));
  }
  // Every earlier file content is a prefix of every later one.
  for (size_t i = 1; i < prefixes.size(); ++i) {
    CHECK(prefixes[i].compare(0, prefixes[i - 1].size(), prefixes[i - 1]) == 0);
  }
  check_best(r1.state);
  const GameState loaded = load((d1 / "state.jsonl").string());
  CHECK(loaded.rounds.size() == 6);
  for (size_t i = 0; i < loaded.rounds.size(); ++i) CHECK(loaded.rounds[i] == r1.state.rounds[i]);

  // A different seed changes the design.
  CampaignConfig c3 = small_config(fresh_dir("det3"));
  c3.seed = 12;
  const auto r3 = run_campaign(c3, false, synthetic_factory());
  CHECK(r3.state.rounds[0].r != r1.state.rounds[0].r);
}

TEST_CASE("budgets, resume and reports") {
  const fs::path dir = fresh_dir("resume");
  CampaignConfig c = small_config(dir);
  c.budget_rounds = 0;
  const auto empty = run_campaign(c, false, synthetic_factory());
  CHECK(empty.state.rounds.empty());
  CHECK(empty.state.best == -1);
  CHECK(read_file(dir / "trace.csv") == "round,r,R,bound,converged\n");
  CHECK(read_file(dir / "summary.json").find("\"best_round\": null") != std::string::npos);
  CHECK(fs::exists(dir / "config.json"));
  CHECK(load_config((dir / "config.json").string()) == c);

  c.budget_rounds = 3;
  const auto first = run_campaign(c, false, synthetic_factory());
  CHECK(first.state.rounds.size() == 3);
  CHECK_THROWS_AS(run_campaign(c, false, synthetic_factory()), ConfigError);

  c.budget_rounds = 5;
  const auto resumed = run_campaign(c, true, synthetic_factory());
  CHECK(resumed.rounds_played == 2);
  REQUIRE(resumed.state.rounds.size() == 5);
  CHECK(resumed.state.rounds[3].round == 4);
  for (int i = 0; i < 3; ++i) CHECK(resumed.state.rounds[i] == first.state.rounds[i]);

  // Resumed and uninterrupted campaigns agree.
  CampaignConfig straight = c;
  straight.out_dir = fresh_dir("straight").string();
  const auto whole = run_campaign(straight, false, synthetic_factory());
  for (int i = 0; i < 5; ++i) {
    CHECK(without_walls(whole.state.rounds[i]) == without_walls(resumed.state.rounds[i]));
  }

  // Report best equals the minimum over converged rounds.
  check_best(resumed.state);
  const RoundRecord* best = resumed.state.best_round();
  REQUIRE(best != nullptr);
  const std::string summary = read_file(dir / "summary.json");
  CHECK(summary.find("\"best_round\": " + std::to_string(best->round)) != std::string::npos);
  CHECK(summary.find("\"best_sentence\": \"" + best->sentence + "\"") != std::string::npos);
  for (const char* f : {"novelty.csv", "degrees.csv", "trace.csv"}) CHECK(fs::exists(dir / f));

  // A torn final line (crash mid-append) loses only that round.
  {
    std::ofstream out(dir / "state.jsonl", std::ios::app);
    out << "{\"version\":1,\"round\":6,\"r\":1.2";
  }
  c.budget_rounds = 6;
  const auto healed = run_campaign(c, true, synthetic_factory());
  CHECK(healed.rounds_played == 1);
  CHECK(healed.state.rounds.size() == 6);
  CHECK(load((dir / "state.jsonl").string()).rounds.size() == 6);

  // Corruption before the tail halts.
  {
    std::ofstream out(dir / "state.jsonl", std::ios::trunc);
    out << "garbage\n";
  }
  CHECK_THROWS_AS(run_campaign(c, true, synthetic_factory()), CampaignHalted);

  // Wall-clock budget.
  CampaignConfig timed = small_config(fresh_dir("timed"));
  timed.budget_rounds = 1000;
  timed.budget_seconds = 1e-9;
  const auto stopped = run_campaign(timed, false, synthetic_factory());
  CHECK(stopped.stop_reason == "seconds");
  CHECK(stopped.state.rounds.size() <= 1);
}

TEST_CASE("unwritable output directory halts") {
  const fs::path dir = fresh_dir("blocked");
  { std::ofstream(dir.string()) << "a file"; }
  CampaignConfig c = small_config(dir / "sub");
  CHECK_THROWS_AS(run_campaign(c, false, synthetic_factory()), CampaignHalted);
  fs::remove(dir);
}

TEST_CASE("one embedded SDP round") {
  const fs::path dir = fresh_dir("sdp");
  CampaignConfig c = small_config(dir);
  c.box = SearchBox{1.25, 1.35, 1.75, 1.85};
  c.d_final = 2;
  c.mcts_iterations = 8;
  c.initial_points = 1;
  c.budget_rounds = 1;
  const auto res = run_campaign(c);
  REQUIRE(res.state.rounds.size() == 1);
  const RoundRecord& r = res.state.rounds[0];
  INFO(r.status << " " << r.message);
  CHECK(r.solver_calls > 0);
  REQUIRE(r.converged());
  CHECK(r.bound >= 0.2536695079 - 1e-6);
  CHECK(r.equality_residual <= 10 * c.tol_eq);
  CHECK(r.psd_residual >= -10 * c.tol_psd);
}
