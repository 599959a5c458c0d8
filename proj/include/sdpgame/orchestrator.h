#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>

#include "sdpgame/bo.h"
#include "sdpgame/diagnostics.h"
#include "sdpgame/mcts.h"
#include "sdpgame/state.h"

namespace sdpgame {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Unrecoverable I/O during a campaign; the state on disk holds every
// completed round.
class CampaignHalted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CampaignConfig {
  int n = 8;
  SearchBox box;
  int d_search = 4;
  int d_final = 6;
  int K = 50;
  std::string builder = "radial";

  // Tree search.
  int mcts_iterations = 60;
  int degree_cap = 0;  // 0: d_search
  int max_monomials = 3;
  std::string token_order = "canonical";
  double c_explore = 1.4142135623730951;
  int rollouts = 1;
  double eos_bias = 2.0;
  int top_k = 3;
  int mcts_restarts = 1;

  // Surrogate and acquisition.
  int initial_points = 3;
  std::string acquisition = "ei";
  double kappa = 2.0;
  int candidates = 512;
  bool input_warp = true;
  bool output_warp = true;

  // Solver.
  std::string solver = "embedded";
  std::string solver_cmd;
  std::string method = "ipm";
  double tol_eq = 1e-8;
  double tol_psd = 1e-8;
  double tol_gap = 1e-7;
  int max_iterations = 50000;

  uint64_t seed = 0;
  int budget_rounds = 10;     // total rounds in the state
  double budget_seconds = 0;  // 0: unlimited
  std::string out_dir = "campaign";
  std::string reference_set;  // empty: no reference monomials

  // Throws ConfigError naming the offending field.
  void validate() const;
  int effective_degree_cap() const { return degree_cap > 0 ? degree_cap : d_search; }
  bool operator==(const CampaignConfig&) const;
};

// JSON mirror of every field. Unknown keys and wrong types throw ConfigError;
// missing keys keep their defaults.
std::string config_to_json(const CampaignConfig& c);
CampaignConfig config_from_json(const std::string& text, const CampaignConfig& base = {});
CampaignConfig load_config(const std::string& path);

SearchOptions search_options(const CampaignConfig& c, uint64_t seed);
SolverChoice solver_choice(const CampaignConfig& c);

// Builds the evaluator for one proposed (r, R).
using EvaluatorFactory = std::function<std::unique_ptr<SentenceEvaluator>(
    const CampaignConfig&, const GeometricParams&, uint64_t seed)>;
EvaluatorFactory sdp_evaluator_factory();

// Seeds for the surrogate fit and the tree search of a round.
uint64_t round_seed(uint64_t campaign_seed, int round, int stream);

// Proposes (r, R), searches, and appends the round; stage failures become a
// failed record. Converged rounds are the only surrogate observations.
GameState play_round(GameState state, const CampaignConfig& config,
                     const EvaluatorFactory& factory = sdp_evaluator_factory());

struct CampaignResult {
  GameState state;
  int rounds_played = 0;
  std::string stop_reason;  // "rounds", "seconds"
};

// Plays until the round or wall-clock budget is reached, appending each round
// to out_dir/state.jsonl, then writes the reports. With resume the existing
// state is loaded first; without it an existing non-empty state is a
// ConfigError.
CampaignResult run_campaign(const CampaignConfig& config, bool resume = false,
                            const EvaluatorFactory& factory = sdp_evaluator_factory(),
                            const std::function<void(const RoundRecord&)>& on_round = {});

}  // namespace sdpgame
