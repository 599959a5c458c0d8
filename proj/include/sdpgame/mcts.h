#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdpgame/compiler.h"
#include "sdpgame/grammar.h"
#include "sdpgame/solver.h"

namespace sdpgame {

struct Evaluation {
  bool converged = false;
  double bound = 0;
  double objective = 0;
  SolveStatus status = SolveStatus::kNumericFailure;
  std::string message;
  double wall_time = 0;
  // Solver output without primal blocks, for SDP evaluators.
  SolverResult result;
  ResidualReport residuals;
};

// Scores a reduced sentence at a certificate degree.
class SentenceEvaluator {
 public:
  virtual ~SentenceEvaluator() = default;
  virtual Evaluation evaluate(const Sentence& s, int d) = 0;
};

struct SolverChoice {
  bool external = false;
  SolverSettings settings;
  ExternalSolverConfig external_config;
};

// Compiles at fixed (params, n, K, seed), solves and verifies. A solve counts
// as converged only when the solver says so and the recomputed residuals stay
// within 10 tol_eq and tol_psd.
class SdpEvaluator : public SentenceEvaluator {
 public:
  SdpEvaluator(GeometricParams params, int n, int K, uint64_t seed,
               SolverChoice solver = {}, CompileOptions compile = {});
  Evaluation evaluate(const Sentence& s, int d) override;

 private:
  GeometricParams params_;
  int n_, K_;
  uint64_t seed_;
  SolverChoice solver_;
  CompileOptions compile_;
};

// Fixed-reward evaluator: bound = fn(sentence, d), always converged unless fn
// returns NaN.
class SyntheticEvaluator : public SentenceEvaluator {
 public:
  explicit SyntheticEvaluator(std::function<double(const Sentence&, int)> fn);
  Evaluation evaluate(const Sentence& s, int d) override;
  int calls() const { return calls_; }

 private:
  std::function<double(const Sentence&, int)> fn_;
  int calls_ = 0;
};

// 1 / (1 + max(bound, 0)) for converged evaluations, 0 otherwise.
double squash_reward(const Evaluation& e);

// Evaluations keyed by canonical rendering and degree.
class RewardCache {
 public:
  bool enabled = true;
  const Evaluation* find(const Sentence& s, int d) const;
  void store(const Sentence& s, int d, const Evaluation& e);
  size_t size() const { return entries_.size(); }
  int hits() const { return hits_; }
  int misses() const { return misses_; }
  // Evaluates through the cache, counting hits and misses.
  Evaluation lookup_or_evaluate(const Sentence& s, int d, SentenceEvaluator& eval);
  const std::map<std::string, Evaluation>& entries() const { return entries_; }

 private:
  std::map<std::string, Evaluation> entries_;
  int hits_ = 0, misses_ = 0;
};

struct SearchCaps {
  int degree_cap = 4;
  int max_monomials = 3;
  TokenOrder order = TokenOrder::kCanonical;
};

struct SearchNode {
  std::vector<Token> state;
  int visits = 0;
  double value_sum = 0;
  // Rewards backpropagated from rollouts that started at this node.
  int local_evaluations = 0;
  std::map<Token, std::unique_ptr<SearchNode>> children;
  std::vector<Token> untried;  // legal tokens without a child yet
  bool terminal = false;

  bool fully_expanded() const { return untried.empty(); }
};

std::unique_ptr<SearchNode> make_node(std::vector<Token> state, const SearchCaps& caps);

// UCB descent from the root. Unvisited children win; ties go to the earlier
// token. Stops at a node with untried tokens or at a leaf.
std::vector<SearchNode*> select_path(SearchNode& root, double c_explore);

// Adds one child for a token drawn uniformly from the untried ones. Throws
// std::invalid_argument when the node is terminal or fully expanded.
SearchNode& expand_node(SearchNode& node, const SearchCaps& caps, std::mt19937_64& rng);

struct RolloutOptions {
  int d_search = 4;
  int rollouts = 1;
  // Weight of EOS relative to other legal tokens during completion.
  double eos_bias = 2.0;
};

struct RolloutTrace {
  double reward = 0;
  std::vector<Sentence> sentences;  // reduced, one per completed rollout
  std::vector<Evaluation> evaluations;
};

// Completes the node's prefix uniformly at random and averages the squashed
// rewards. A terminal node is evaluated once.
RolloutTrace simulate_rollout(const SearchNode& node, const SearchCaps& caps,
                              const RolloutOptions& options, RewardCache& cache,
                              SentenceEvaluator& eval, std::mt19937_64& rng);

void backpropagate(const std::vector<SearchNode*>& path, double reward);

// Every node satisfies N = sum of child N + local evaluations and every state
// is a legal prefix. Returns the first violation, or an empty string.
std::string audit_tree(const SearchNode& root, const SearchCaps& caps);

// One line per node: state hash, N, W.
void dump_tree(const SearchNode& root, std::ostream& out);

struct SearchOptions {
  int iterations = 200;
  int d_search = 4;
  int d_final = 6;
  SearchCaps caps;
  double c_explore = 1.4142135623730951;
  RolloutOptions rollout;
  int top_k = 3;
  uint64_t seed = 0;
  bool use_cache = true;
  // Optional starting prefix for the root.
  std::vector<Token> root_prefix;
};

struct Finalist {
  Sentence sentence;
  Evaluation search_eval;
  Evaluation final_eval;
};

struct SearchOutcome {
  Sentence best;
  Evaluation final_eval;
  std::vector<Finalist> finalists;
  std::vector<std::string> log;
  int solver_calls = 0;
  int cache_hits = 0;
  int distinct_sentences = 0;
  std::string audit;  // empty when the final tree audit passed
};

class SearchFailed : public std::runtime_error {
 public:
  SearchFailed(const std::string& what, std::vector<std::string> log);
  const std::vector<std::string>& log() const { return log_; }

 private:
  std::vector<std::string> log_;
};

// Tree search at d_search, then the top_k converged sentences (by search
// bound, ties by sentence order) are re-evaluated at d_final; if none of them
// converges the next-ranked ones are tried. Throws SearchFailed when no
// sentence converges at d_final.
SearchOutcome run_search(SentenceEvaluator& eval, const SearchOptions& options);

SearchOutcome run_search(const GeometricParams& params, int n, int K,
                         const SearchOptions& options, const SolverChoice& solver = {},
                         const CompileOptions& compile = {});

}  // namespace sdpgame
