#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "sdpgame/orchestrator.h"

namespace sdpgame {

namespace {
using nlohmann::ordered_json;

// Calls f(name, field) for every configuration field in file order.
template <class Config, class F>
void visit_fields(Config& c, F&& f) {
  f("n", c.n);
  f("r_min", c.box.r_min);
  f("r_max", c.box.r_max);
  f("R_min", c.box.R_min);
  f("R_max", c.box.R_max);
  f("d_search", c.d_search);
  f("d_final", c.d_final);
  f("K", c.K);
  f("builder", c.builder);
  f("mcts_iterations", c.mcts_iterations);
  f("degree_cap", c.degree_cap);
  f("max_monomials", c.max_monomials);
  f("token_order", c.token_order);
  f("c_explore", c.c_explore);
  f("rollouts", c.rollouts);
  f("eos_bias", c.eos_bias);
  f("top_k", c.top_k);
  f("mcts_restarts", c.mcts_restarts);
  f("initial_points", c.initial_points);
  f("acquisition", c.acquisition);
  f("kappa", c.kappa);
  f("candidates", c.candidates);
  f("input_warp", c.input_warp);
  f("output_warp", c.output_warp);
  f("solver", c.solver);
  f("solver_cmd", c.solver_cmd);
  f("method", c.method);
  f("tol_eq", c.tol_eq);
  f("tol_psd", c.tol_psd);
  f("tol_gap", c.tol_gap);
  f("max_iterations", c.max_iterations);
  f("seed", c.seed);
  f("budget_rounds", c.budget_rounds);
  f("budget_seconds", c.budget_seconds);
  f("out_dir", c.out_dir);
  f("reference_set", c.reference_set);
}

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw ConfigError("config field '" + field + "' " + why);
}

void require(bool ok, const std::string& field, const std::string& why) {
  if (!ok) fail(field, why);
}

struct Reader {
  const ordered_json& j;

  void operator()(const char* name, int& v) const {
    auto it = j.find(name);
    if (it == j.end()) return;
    if (!it->is_number_integer()) fail(name, "must be an integer");
    v = it->get<int>();
  }
  void operator()(const char* name, uint64_t& v) const {
    auto it = j.find(name);
    if (it == j.end()) return;
    if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<int64_t>() >= 0)) {
      fail(name, "must be a nonnegative integer");
    }
    v = it->get<uint64_t>();
  }
  void operator()(const char* name, double& v) const {
    auto it = j.find(name);
    if (it == j.end()) return;
    if (!it->is_number()) fail(name, "must be a number");
    v = it->get<double>();
  }
  void operator()(const char* name, bool& v) const {
    auto it = j.find(name);
    if (it == j.end()) return;
    if (!it->is_boolean()) fail(name, "must be true or false");
    v = it->get<bool>();
  }
  void operator()(const char* name, std::string& v) const {
    auto it = j.find(name);
    if (it == j.end()) return;
    if (!it->is_string()) fail(name, "must be a string");
    v = it->get<std::string>();
  }
};
}  // namespace

void CampaignConfig::validate() const {
  require(n >= 1 && n <= 64, "n", "must be in 1..64");
  require(box.r_min > 0, "r_min", "must be positive");
  try {
    box.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config search box: ") + e.what());
  }
  require(d_search >= 0 && d_search <= 12, "d_search", "must be in 0..12");
  require(d_final >= d_search && d_final <= 12, "d_final", "must be in d_search..12");
  require(K >= 1 && K <= 100000, "K", "must be in 1..100000");
  require(builder == "radial" || builder == "origin", "builder", "must be radial or origin");
  require(mcts_iterations >= 1, "mcts_iterations", "must be >= 1");
  require(degree_cap >= 0 && degree_cap <= d_search, "degree_cap",
          "must be in 0..d_search (0 selects d_search)");
  require(max_monomials >= 1 && max_monomials <= 8, "max_monomials", "must be in 1..8");
  require(token_order == "canonical" || token_order == "free", "token_order",
          "must be canonical or free");
  require(std::isfinite(c_explore) && c_explore >= 0, "c_explore", "must be >= 0");
  require(rollouts >= 1, "rollouts", "must be >= 1");
  require(std::isfinite(eos_bias) && eos_bias > 0, "eos_bias", "must be positive");
  require(top_k >= 1, "top_k", "must be >= 1");
  require(mcts_restarts >= 1, "mcts_restarts", "must be >= 1");
  require(initial_points >= 1, "initial_points", "must be >= 1");
  try {
    acquisition_from_name(acquisition);
  } catch (const std::invalid_argument& e) {
    fail("acquisition", e.what());
  }
  require(std::isfinite(kappa) && kappa >= 0, "kappa", "must be >= 0");
  require(candidates >= 1, "candidates", "must be >= 1");
  require(solver == "embedded" || solver == "external", "solver", "must be embedded or external");
  if (solver == "external") {
    require(solver_cmd.find("{input}") != std::string::npos &&
                solver_cmd.find("{output}") != std::string::npos,
            "solver_cmd", "must contain {input} and {output} for the external solver");
  }
  require(method == "ipm" || method == "splitting", "method", "must be ipm or splitting");
  require(tol_eq > 0, "tol_eq", "must be positive");
  require(tol_psd > 0, "tol_psd", "must be positive");
  require(tol_gap > 0, "tol_gap", "must be positive");
  require(max_iterations >= 1, "max_iterations", "must be >= 1");
  require(budget_rounds >= 0, "budget_rounds", "must be >= 0");
  require(std::isfinite(budget_seconds) && budget_seconds >= 0, "budget_seconds", "must be >= 0");
  require(!out_dir.empty(), "out_dir", "must not be empty");
}

bool CampaignConfig::operator==(const CampaignConfig& o) const {
  return config_to_json(*this) == config_to_json(o);
}

std::string config_to_json(const CampaignConfig& c) {
  ordered_json j = ordered_json::object();
  visit_fields(c, [&](const char* name, const auto& v) { j[name] = v; });
  return j.dump(2) + "\n";
}

CampaignConfig config_from_json(const std::string& text, const CampaignConfig& base) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  std::set<std::string> known;
  CampaignConfig probe;
  visit_fields(probe, [&](const char* name, auto&) { known.insert(name); });
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ConfigError("unknown config field '" + key + "'");
  }
  CampaignConfig c = base;
  visit_fields(c, Reader{j});
  return c;
}

CampaignConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

SearchOptions search_options(const CampaignConfig& c, uint64_t seed) {
  SearchOptions o;
  o.iterations = c.mcts_iterations;
  o.d_search = c.d_search;
  o.d_final = c.d_final;
  o.caps.degree_cap = c.effective_degree_cap();
  o.caps.max_monomials = c.max_monomials;
  o.caps.order = c.token_order == "free" ? TokenOrder::kFree : TokenOrder::kCanonical;
  o.c_explore = c.c_explore;
  o.rollout.d_search = c.d_search;
  o.rollout.rollouts = c.rollouts;
  o.rollout.eos_bias = c.eos_bias;
  o.top_k = c.top_k;
  o.seed = seed;
  return o;
}

SolverChoice solver_choice(const CampaignConfig& c) {
  SolverChoice s;
  s.external = c.solver == "external";
  s.settings.tol_eq = c.tol_eq;
  s.settings.tol_psd = c.tol_psd;
  s.settings.tol_gap = c.tol_gap;
  s.settings.max_iterations = c.max_iterations;
  s.settings.method = c.method == "splitting" ? SolverMethod::kSplitting : SolverMethod::kInteriorPoint;
  s.external_config.command = c.solver_cmd;
  s.external_config.work_dir = c.out_dir + "/external";
  return s;
}

}  // namespace sdpgame
