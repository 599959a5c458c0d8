#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>

#include "sdpgame/mcts.h"

namespace sdpgame {

SearchFailed::SearchFailed(const std::string& what, std::vector<std::string> log)
    : std::runtime_error(what), log_(std::move(log)) {}

std::unique_ptr<SearchNode> make_node(std::vector<Token> state, const SearchCaps& caps) {
  auto node = std::make_unique<SearchNode>();
  node->untried = legal_next_tokens(state, caps.degree_cap, caps.max_monomials, caps.order);
  // A prefix without successors is either complete or a dead end; both end
  // the descent.
  node->terminal = node->untried.empty();
  node->state = std::move(state);
  return node;
}

std::vector<SearchNode*> select_path(SearchNode& root, double c_explore) {
  std::vector<SearchNode*> path{&root};
  SearchNode* node = &root;
  while (!node->terminal && node->fully_expanded() && !node->children.empty()) {
    const double log_n = std::log(std::max(node->visits, 1));
    SearchNode* best = nullptr;
    double best_score = -std::numeric_limits<double>::infinity();
    for (auto& [token, child] : node->children) {
      const double score =
          child->visits == 0
              ? std::numeric_limits<double>::infinity()
              : child->value_sum / child->visits + c_explore * std::sqrt(log_n / child->visits);
      if (best == nullptr || score > best_score) {
        best = child.get();
        best_score = score;
      }
    }
    node = best;
    path.push_back(node);
  }
  return path;
}

SearchNode& expand_node(SearchNode& node, const SearchCaps& caps, std::mt19937_64& rng) {
  if (node.terminal || node.untried.empty()) {
    throw std::invalid_argument("expand_node: node has no untried tokens");
  }
  std::uniform_int_distribution<size_t> pick(0, node.untried.size() - 1);
  const size_t i = pick(rng);
  const Token t = node.untried[i];
  node.untried.erase(node.untried.begin() + static_cast<std::ptrdiff_t>(i));
  std::vector<Token> state = node.state;
  state.push_back(t);
  auto& slot = node.children[t];
  slot = make_node(std::move(state), caps);
  return *slot;
}

namespace {
std::vector<Token> complete_prefix(std::vector<Token> prefix, const SearchCaps& caps,
                                   double eos_bias, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  while (true) {
    const auto next = legal_next_tokens(prefix, caps.degree_cap, caps.max_monomials, caps.order);
    if (next.empty()) return prefix;
    double total = 0;
    for (Token t : next) total += t == Token::EOS ? eos_bias : 1.0;
    double u = unif(rng) * total;
    Token chosen = next.back();
    for (Token t : next) {
      u -= t == Token::EOS ? eos_bias : 1.0;
      if (u < 0) {
        chosen = t;
        break;
      }
    }
    prefix.push_back(chosen);
  }
}
}  // namespace

RolloutTrace simulate_rollout(const SearchNode& node, const SearchCaps& caps,
                              const RolloutOptions& options, RewardCache& cache,
                              SentenceEvaluator& eval, std::mt19937_64& rng) {
  if (options.rollouts < 1) throw std::invalid_argument("simulate_rollout: rollouts must be >= 1");
  RolloutTrace trace;
  const int count = node.terminal ? 1 : options.rollouts;
  double sum = 0;
  for (int i = 0; i < count; ++i) {
    const std::vector<Token> tokens =
        node.terminal ? node.state : complete_prefix(node.state, caps, options.eos_bias, rng);
    if (!is_complete(tokens)) continue;  // dead end: penalty reward
    const Sentence s = reduce_sentence(sentence_from_tokens(tokens));
    Evaluation e = cache.lookup_or_evaluate(s, options.d_search, eval);
    sum += squash_reward(e);
    trace.sentences.push_back(s);
    trace.evaluations.push_back(std::move(e));
  }
  trace.reward = sum / count;
  return trace;
}

void backpropagate(const std::vector<SearchNode*>& path, double reward) {
  for (SearchNode* n : path) {
    n->visits += 1;
    n->value_sum += reward;
  }
}

std::string audit_tree(const SearchNode& root, const SearchCaps& caps) {
  std::string problem;
  std::function<void(const SearchNode&)> walk = [&](const SearchNode& n) {
    if (!problem.empty()) return;
    int child_visits = 0;
    std::vector<Token> legal;
    try {
      legal = legal_next_tokens(n.state, caps.degree_cap, caps.max_monomials, caps.order);
    } catch (const std::exception& e) {
      problem = "illegal state " + render_tokens(n.state) + ": " + e.what();
      return;
    }
    for (const auto& [t, child] : n.children) {
      if (std::find(legal.begin(), legal.end(), t) == legal.end()) {
        problem = "child token " + token_text(t) + " not legal after " + render_tokens(n.state);
        return;
      }
      child_visits += child->visits;
    }
    if (n.visits != child_visits + n.local_evaluations) {
      problem = "count mismatch at " + render_tokens(n.state) + ": N=" + std::to_string(n.visits) +
                " children=" + std::to_string(child_visits) +
                " local=" + std::to_string(n.local_evaluations);
      return;
    }
    for (const auto& [t, child] : n.children) walk(*child);
  };
  walk(root);
  return problem;
}

void dump_tree(const SearchNode& root, std::ostream& out) {
  std::function<void(const SearchNode&)> walk = [&](const SearchNode& n) {
    std::ostringstream h;
    h << std::hex << std::hash<std::string>{}(render_tokens(n.state));
    out << h.str() << ' ' << n.visits << ' ' << n.value_sum << '\n';
    for (const auto& [t, child] : n.children) walk(*child);
  };
  walk(root);
}

SearchOutcome run_search(SentenceEvaluator& eval, const SearchOptions& options) {
  if (options.iterations < 1) throw std::invalid_argument("run_search: iterations must be >= 1");
  if (options.d_search > options.d_final) {
    throw std::invalid_argument("run_search: d_search must not exceed d_final");
  }
  if (options.top_k < 1) throw std::invalid_argument("run_search: top_k must be >= 1");

  std::mt19937_64 rng(options.seed);
  RewardCache cache;
  cache.enabled = options.use_cache;
  RolloutOptions rollout = options.rollout;
  rollout.d_search = options.d_search;
  SearchOutcome out;

  auto root = make_node(options.root_prefix, options.caps);
  // Every sentence scored at d_search, by canonical rendering.
  std::map<std::string, std::pair<Sentence, Evaluation>> seen;
  for (int it = 0; it < options.iterations; ++it) {
    auto path = select_path(*root, options.c_explore);
    SearchNode* leaf = path.back();
    if (!leaf->terminal && !leaf->fully_expanded()) {
      path.push_back(&expand_node(*leaf, options.caps, rng));
    }
    const RolloutTrace trace = simulate_rollout(*path.back(), options.caps, rollout, cache, eval, rng);
    path.back()->local_evaluations += 1;
    backpropagate(path, trace.reward);
    for (size_t i = 0; i < trace.sentences.size(); ++i) {
      const std::string key = render(trace.sentences[i]);
      if (seen.count(key)) continue;
      const Evaluation& e =
          seen.emplace(key, std::make_pair(trace.sentences[i], trace.evaluations[i]))
              .first->second.second;
      std::ostringstream line;
      line << "iteration " << it + 1 << ": " << key << " d=" << options.d_search << " "
           << status_name(e.status);
      if (e.converged) line << " bound=" << e.bound;
      if (!e.message.empty()) line << " (" << e.message << ")";
      out.log.push_back(line.str());
    }
  }
  out.audit = audit_tree(*root, options.caps);

  std::vector<const std::pair<Sentence, Evaluation>*> ranked;
  for (const auto& [key, entry] : seen) {
    if (entry.second.converged) ranked.push_back(&entry);
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](auto* a, auto* b) {
    if (a->second.bound != b->second.bound) return a->second.bound < b->second.bound;
    return sentence_less(a->first, b->first);
  });
  out.distinct_sentences = static_cast<int>(seen.size());

  int converged_finalists = 0;
  for (size_t i = 0; i < ranked.size(); ++i) {
    if (static_cast<int>(i) >= options.top_k && converged_finalists > 0) break;
    Finalist f{ranked[i]->first, ranked[i]->second, {}};
    f.final_eval = cache.lookup_or_evaluate(f.sentence, options.d_final, eval);
    std::ostringstream line;
    line << "final: " << render(f.sentence) << " d=" << options.d_final << " "
         << status_name(f.final_eval.status);
    if (f.final_eval.converged) line << " bound=" << f.final_eval.bound;
    if (!f.final_eval.message.empty()) line << " (" << f.final_eval.message << ")";
    out.log.push_back(line.str());
    if (f.final_eval.converged) {
      ++converged_finalists;
      const bool better =
          converged_finalists == 1 ||
          f.final_eval.bound < out.final_eval.bound ||
          (f.final_eval.bound == out.final_eval.bound && sentence_less(f.sentence, out.best));
      if (better) {
        out.best = f.sentence;
        out.final_eval = f.final_eval;
      }
    }
    out.finalists.push_back(std::move(f));
  }
  out.solver_calls = cache.misses();
  out.cache_hits = cache.hits();
  if (converged_finalists == 0) {
    throw SearchFailed(ranked.empty() ? "no sentence converged at the search degree"
                                      : "no finalist converged at the final degree",
                       out.log);
  }
  return out;
}

SearchOutcome run_search(const GeometricParams& params, int n, int K,
                         const SearchOptions& options, const SolverChoice& solver,
                         const CompileOptions& compile) {
  SdpEvaluator eval(params, n, K, options.seed, solver, compile);
  return run_search(eval, options);
}

}  // namespace sdpgame
