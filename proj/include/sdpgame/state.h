#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdpgame {

constexpr int kStateFormatVersion = 1;

struct RoundRecord {
  int round = 0;
  double r = 0, R = 0;
  std::string sentence;  // canonical rendering, empty when search failed
  int n = 0;
  int d_search = 0, d_final = 0;
  int K = 0;
  double objective = 0;
  double bound = 0;  // NaN unless converged
  std::string status;  // solver status name, or "search-failed"
  double equality_residual = 0;
  double psd_residual = 0;
  double relative_gap = 0;
  double wall_bo = 0, wall_search = 0, wall_final = 0;
  uint64_t seed_bo = 0, seed_search = 0;
  int solver_calls = 0;
  std::string message;

  bool converged() const { return status == "converged"; }
  bool operator==(const RoundRecord& o) const;
};

struct GameState {
  std::vector<RoundRecord> rounds;
  int best = -1;  // index into rounds of the smallest converged bound

  bool empty() const { return rounds.empty(); }
  int next_round() const { return static_cast<int>(rounds.size()) + 1; }
  // Requires record.round == next_round(); updates best.
  void append(const RoundRecord& record);
  const RoundRecord* best_round() const { return best < 0 ? nullptr : &rounds[best]; }
  bool operator==(const GameState& o) const = default;
};

// Argmin over converged bounds, earliest round on ties; -1 when none.
int recompute_best(const std::vector<RoundRecord>& rounds);

class StateFormatError : public std::runtime_error {
 public:
  StateFormatError(const std::string& what, int line, std::string field);
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

// One JSON object per line. Doubles are written in shortest round-trip form;
// non-finite values become null and load back as NaN.
std::string record_to_line(const RoundRecord& rec);
RoundRecord record_from_line(const std::string& line, int line_number = 1);

// Rewrites the whole file through a temporary and a rename.
void persist(const GameState& state, const std::string& path);
// Appends one line and flushes it to disk.
void append_record(const std::string& path, const RoundRecord& rec);
// Missing file: throws std::runtime_error. Bad content: StateFormatError.
// With drop_torn_tail, an unparseable last line that lacks its newline (a
// write cut short by a crash) is skipped instead.
GameState load(const std::string& path, bool drop_torn_tail = false);

}  // namespace sdpgame
