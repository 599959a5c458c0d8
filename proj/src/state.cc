#include "sdpgame/state.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <unistd.h>

#include "json.hpp"

namespace sdpgame {

using nlohmann::json;

namespace {
bool same(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

const std::vector<std::string>& field_names() {
  static const std::vector<std::string> names{
      "version", "round", "r", "R", "sentence", "n", "d_search", "d_final", "K",
      "objective", "bound", "status", "equality_residual", "psd_residual", "relative_gap",
      "wall_bo", "wall_search", "wall_final", "seed_bo", "seed_search", "solver_calls",
      "message"};
  return names;
}

struct Reader {
  const json& j;
  int line;

  const json& at(const std::string& f) const {
    auto it = j.find(f);
    if (it == j.end()) throw StateFormatError("missing field '" + f + "'", line, f);
    return *it;
  }
  [[noreturn]] void bad(const std::string& f, const std::string& want) const {
    throw StateFormatError("field '" + f + "' must be " + want, line, f);
  }
  double real(const std::string& f) const {
    const json& v = at(f);
    if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
    if (!v.is_number()) bad(f, "a number or null");
    return v.get<double>();
  }
  int integer(const std::string& f) const {
    const json& v = at(f);
    if (!v.is_number_integer()) bad(f, "an integer");
    return v.get<int>();
  }
  uint64_t unsigned_integer(const std::string& f) const {
    const json& v = at(f);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<int64_t>() >= 0)) {
      bad(f, "a nonnegative integer");
    }
    return v.get<uint64_t>();
  }
  std::string text(const std::string& f) const {
    const json& v = at(f);
    if (!v.is_string()) bad(f, "a string");
    return v.get<std::string>();
  }
};
}  // namespace

bool RoundRecord::operator==(const RoundRecord& o) const {
  return round == o.round && same(r, o.r) && same(R, o.R) && sentence == o.sentence &&
         n == o.n && d_search == o.d_search && d_final == o.d_final && K == o.K &&
         same(objective, o.objective) && same(bound, o.bound) && status == o.status &&
         same(equality_residual, o.equality_residual) && same(psd_residual, o.psd_residual) &&
         same(relative_gap, o.relative_gap) && same(wall_bo, o.wall_bo) &&
         same(wall_search, o.wall_search) && same(wall_final, o.wall_final) &&
         seed_bo == o.seed_bo && seed_search == o.seed_search &&
         solver_calls == o.solver_calls && message == o.message;
}

void GameState::append(const RoundRecord& record) {
  if (record.round != next_round()) {
    throw std::invalid_argument("round " + std::to_string(record.round) +
                                " appended where round " + std::to_string(next_round()) +
                                " was expected");
  }
  rounds.push_back(record);
  if (record.converged() && std::isfinite(record.bound) &&
      (best < 0 || record.bound < rounds[best].bound)) {
    best = static_cast<int>(rounds.size()) - 1;
  }
}

int recompute_best(const std::vector<RoundRecord>& rounds) {
  int best = -1;
  for (size_t i = 0; i < rounds.size(); ++i) {
    const auto& r = rounds[i];
    if (!r.converged() || !std::isfinite(r.bound)) continue;
    if (best < 0 || r.bound < rounds[best].bound) best = static_cast<int>(i);
  }
  return best;
}

StateFormatError::StateFormatError(const std::string& what, int line, std::string field)
    : std::runtime_error("state line " + std::to_string(line) + ": " + what),
      line_(line),
      field_(std::move(field)) {}

std::string record_to_line(const RoundRecord& rec) {
  json j = json::object();
  j["version"] = kStateFormatVersion;
  j["round"] = rec.round;
  j["r"] = number(rec.r);
  j["R"] = number(rec.R);
  j["sentence"] = rec.sentence;
  j["n"] = rec.n;
  j["d_search"] = rec.d_search;
  j["d_final"] = rec.d_final;
  j["K"] = rec.K;
  j["objective"] = number(rec.objective);
  j["bound"] = number(rec.bound);
  j["status"] = rec.status;
  j["equality_residual"] = number(rec.equality_residual);
  j["psd_residual"] = number(rec.psd_residual);
  j["relative_gap"] = number(rec.relative_gap);
  j["wall_bo"] = number(rec.wall_bo);
  j["wall_search"] = number(rec.wall_search);
  j["wall_final"] = number(rec.wall_final);
  j["seed_bo"] = rec.seed_bo;
  j["seed_search"] = rec.seed_search;
  j["solver_calls"] = rec.solver_calls;
  j["message"] = rec.message;
  return j.dump();
}

RoundRecord record_from_line(const std::string& line, int line_number) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw StateFormatError(std::string("not valid JSON: ") + e.what(), line_number, "");
  }
  if (!j.is_object()) throw StateFormatError("record is not an object", line_number, "");
  const auto& names = field_names();
  const std::set<std::string> known(names.begin(), names.end());
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) {
      throw StateFormatError("unknown field '" + key + "'", line_number, key);
    }
  }
  const Reader rd{j, line_number};
  const int version = rd.integer("version");
  if (version != kStateFormatVersion) {
    throw StateFormatError("format version " + std::to_string(version) + " is not supported (expected " +
                               std::to_string(kStateFormatVersion) + ")",
                           line_number, "version");
  }
  RoundRecord rec;
  rec.round = rd.integer("round");
  rec.r = rd.real("r");
  rec.R = rd.real("R");
  rec.sentence = rd.text("sentence");
  rec.n = rd.integer("n");
  rec.d_search = rd.integer("d_search");
  rec.d_final = rd.integer("d_final");
  rec.K = rd.integer("K");
  rec.objective = rd.real("objective");
  rec.bound = rd.real("bound");
  rec.status = rd.text("status");
  rec.equality_residual = rd.real("equality_residual");
  rec.psd_residual = rd.real("psd_residual");
  rec.relative_gap = rd.real("relative_gap");
  rec.wall_bo = rd.real("wall_bo");
  rec.wall_search = rd.real("wall_search");
  rec.wall_final = rd.real("wall_final");
  rec.seed_bo = rd.unsigned_integer("seed_bo");
  rec.seed_search = rd.unsigned_integer("seed_search");
  rec.solver_calls = rd.integer("solver_calls");
  rec.message = rd.text("message");
  return rec;
}

void persist(const GameState& state, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write state file " + tmp);
    for (const auto& rec : state.rounds) out << record_to_line(rec) << '\n';
    out.flush();
    if (!out) throw std::runtime_error("write failed for state file " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("cannot replace state file " + path + ": " + ec.message());
}

void append_record(const std::string& path, const RoundRecord& rec) {
  std::FILE* f = std::fopen(path.c_str(), "a");
  if (f == nullptr) throw std::runtime_error("cannot open state file " + path);
  const std::string line = record_to_line(rec) + "\n";
  const bool ok = std::fwrite(line.data(), 1, line.size(), f) == line.size() &&
                  std::fflush(f) == 0 && ::fsync(fileno(f)) == 0;
  std::fclose(f);
  if (!ok) throw std::runtime_error("write failed for state file " + path);
}

GameState load(const std::string& path, bool drop_torn_tail) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read state file " + path);
  GameState st;
  std::string line;
  int number_of_line = 0;
  while (std::getline(in, line)) {
    ++number_of_line;
    if (line.empty()) continue;
    const bool torn = in.eof();
    RoundRecord rec;
    try {
      rec = record_from_line(line, number_of_line);
    } catch (const StateFormatError&) {
      if (torn && drop_torn_tail) break;
      throw;
    }
    if (rec.round != st.next_round()) {
      throw StateFormatError("round " + std::to_string(rec.round) + " out of sequence (expected " +
                                 std::to_string(st.next_round()) + ")",
                             number_of_line, "round");
    }
    st.append(rec);
  }
  return st;
}

}  // namespace sdpgame
