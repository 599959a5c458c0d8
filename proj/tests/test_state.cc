#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "sdpgame/state.h"

using namespace sdpgame;
namespace fs = std::filesystem;

namespace {
fs::path scratch_dir() {
  const fs::path d = fs::temp_directory_path() / "sdpgame_test_state";
  fs::create_directories(d);
  return d;
}

RoundRecord random_record(std::mt19937_64& rng, int round) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RoundRecord r;
  r.round = round;
  r.r = 1.0 + 0.5 * u(rng);
  r.R = r.r + 0.01 + u(rng);
  r.n = 8;
  r.d_search = 2;
  r.d_final = 4;
  r.K = 50;
  const bool ok = u(rng) < 0.7;
  r.status = ok ? "converged" : (u(rng) < 0.5 ? "numeric-failure" : "search-failed");
  r.sentence = ok ? "P2 <ES> P6 <ES> P2 <*> P6 <EOS>" : "";
  r.objective = ok ? 2 + u(rng) : NAN;
  r.bound = ok ? 0.25 + u(rng) * std::exp(-20 * u(rng)) : NAN;
  r.equality_residual = 1e-9 * u(rng);
  r.psd_residual = -1e-12 * u(rng);
  r.relative_gap = 1e-8 * u(rng);
  r.wall_bo = u(rng);
  r.wall_search = 10 * u(rng);
  r.wall_final = u(rng) / 3;
  r.seed_bo = rng();
  r.seed_search = rng();
  r.solver_calls = static_cast<int>(rng() % 100);
  r.message = ok ? "" : "progress stalled; \"quoted\"\ttab";
  return r;
}

GameState random_state(uint64_t seed, int rounds) {
  std::mt19937_64 rng(seed);
  GameState s;
  for (int i = 1; i <= rounds; ++i) s.append(random_record(rng, i));
  return s;
}

bool bits_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace

TEST_CASE("persist and load a 100-round state") {
  const GameState s = random_state(1, 100);
  const fs::path p = scratch_dir() / "hundred.jsonl";
  persist(s, p.string());
  const GameState back = load(p.string());
  REQUIRE(back.rounds.size() == 100);
  CHECK(back == s);
  for (size_t i = 0; i < s.rounds.size(); ++i) {
    const auto &a = s.rounds[i], &b = back.rounds[i];
    CHECK(bits_equal(a.r, b.r));
    CHECK(bits_equal(a.R, b.R));
    CHECK(bits_equal(a.wall_search, b.wall_search));
    CHECK(a.seed_bo == b.seed_bo);
    if (a.converged()) CHECK(bits_equal(a.bound, b.bound));
    else CHECK(std::isnan(b.bound));
  }
  // Saving what was loaded reproduces the same bytes.
  const fs::path q = scratch_dir() / "hundred2.jsonl";
  persist(back, q.string());
  CHECK(read_file(p) == read_file(q));
}

TEST_CASE("best tracking matches an exhaustive recheck") {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    GameState s;
    for (int i = 1; i <= 30; ++i) {
      s.append(random_record(rng, i));
      CHECK(s.best == recompute_best(s.rounds));
    }
  }
  GameState empty;
  CHECK(empty.best_round() == nullptr);
  RoundRecord failed;
  failed.round = 1;
  failed.status = "numeric-failure";
  failed.bound = NAN;
  empty.append(failed);
  CHECK(empty.best == -1);
  RoundRecord good = failed;
  good.round = 2;
  good.status = "converged";
  good.bound = 0.3;
  empty.append(good);
  CHECK(empty.best == 1);
  RoundRecord tie = good;
  tie.round = 3;
  empty.append(tie);
  CHECK(empty.best == 1);
}

TEST_CASE("round indices must be contiguous") {
  GameState s;
  RoundRecord r;
  r.round = 2;
  CHECK_THROWS_AS(s.append(r), std::invalid_argument);
  const fs::path p = scratch_dir() / "gap.jsonl";
  r.round = 1;
  RoundRecord r3 = r;
  r3.round = 3;
  {
    std::ofstream out(p);
    out << record_to_line(r) << '\n' << record_to_line(r3) << '\n';
  }
  try {
    load(p.string());
    FAIL("expected StateFormatError");
  } catch (const StateFormatError& e) {
    CHECK(e.field() == "round");
    CHECK(e.line() == 2);
  }
}

TEST_CASE("schema violations name the field") {
  std::mt19937_64 rng(3);
  const std::string good = record_to_line(random_record(rng, 1));
  auto expect_field = [](const std::string& line, const std::string& field) {
    try {
      record_from_line(line, 7);
      FAIL("expected StateFormatError for " << field);
    } catch (const StateFormatError& e) {
      CHECK(e.field() == field);
      CHECK(e.line() == 7);
      CHECK(std::string(e.what()).find(field) != std::string::npos);
    }
  };
  std::string extra = good;
  extra.insert(1, "\"surprise\":1,");
  expect_field(extra, "surprise");
  std::string missing = good;
  const auto pos = missing.find("\"K\":");
  missing.erase(pos, missing.find(',', pos) - pos + 1);
  expect_field(missing, "K");
  std::string version = good;
  version.replace(version.find("\"version\":1"), 11, "\"version\":2");
  expect_field(version, "version");
  std::string wrong_type = good;
  wrong_type.replace(wrong_type.find("\"round\":1"), 9, "\"round\":\"one\"");
  expect_field(wrong_type, "round");
  CHECK_THROWS_AS(record_from_line("{not json", 1), StateFormatError);
  CHECK_THROWS_AS(load((scratch_dir() / "does_not_exist.jsonl").string()), std::runtime_error);
}

TEST_CASE("appending keeps earlier lines byte-stable") {
  const fs::path p = scratch_dir() / "append.jsonl";
  fs::remove(p);
  std::mt19937_64 rng(5);
  std::string previous;
  GameState s;
  for (int i = 1; i <= 10; ++i) {
    const RoundRecord rec = random_record(rng, i);
    append_record(p.string(), rec);
    s.append(rec);
    const std::string now = read_file(p);
    CHECK(now.compare(0, previous.size(), previous) == 0);
    previous = now;
  }
  CHECK(load(p.string()) == s);
  // A torn final line (crash mid-write) is reported, earlier rounds intact.
  {
    std::ofstream out(p, std::ios::app);
    out << "{\"version\":1,\"round\":11";
  }
  CHECK_THROWS_AS(load(p.string()), StateFormatError);
  CHECK(load(p.string(), true) == s);
}

TEST_CASE("non-finite values load as NaN") {
  RoundRecord r;
  r.round = 1;
  r.bound = INFINITY;
  r.objective = NAN;
  const RoundRecord back = record_from_line(record_to_line(r));
  CHECK(std::isnan(back.bound));
  CHECK(std::isnan(back.objective));
  CHECK(record_to_line(r).find("\"bound\":null") != std::string::npos);
}
