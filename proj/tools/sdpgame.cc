#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sdpgame/orchestrator.h"

using namespace sdpgame;
namespace fs = std::filesystem;

namespace {
enum Exit { kOk = 0, kInvalidConfig = 2, kHalted = 3, kSearchFailed = 4 };

struct Flags {
  std::string config;
  std::optional<int> dim, d_search, d_final, pivots, budget_rounds, iterations;
  std::optional<double> r, R, budget_seconds;
  std::optional<uint64_t> seed;
  std::optional<std::string> solver, solver_cmd, builder, reference;
  std::string out;
  bool resume = false;
  std::string sentence, input;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "JSON config file; flags override its values");
  app->add_option("--dim", f.dim, "dimension n");
  app->add_option("--pivots", f.pivots, "pivot count K");
  app->add_option("--seed", f.seed, "seed");
  app->add_option("--solver", f.solver, "embedded or external");
  app->add_option("--solver-cmd", f.solver_cmd, "external command with {input} and {output}");
  app->add_option("--builder", f.builder, "certificate builder (radial or origin)");
}

void add_point(CLI::App* app, Flags& f) {
  app->add_option("--r", f.r, "inner radius r");
  app->add_option("--R", f.R, "outer radius R");
}

void add_degrees(CLI::App* app, Flags& f) {
  app->add_option("--degree-search", f.d_search, "certificate degree during search");
  app->add_option("--degree-final", f.d_final, "certificate degree of the final solve");
}

CampaignConfig resolve_config(const Flags& f) {
  std::string config_path = f.config;
  // A resumed campaign keeps the settings it was started with.
  if (config_path.empty() && f.resume) {
    const fs::path saved = fs::path(f.out.empty() ? CampaignConfig{}.out_dir : f.out) / "config.json";
    if (fs::exists(saved)) config_path = saved.string();
  }
  CampaignConfig c = config_path.empty() ? CampaignConfig{} : load_config(config_path);
  if (f.dim) c.n = *f.dim;
  if (f.d_search) c.d_search = *f.d_search;
  if (f.d_final) c.d_final = *f.d_final;
  if (f.pivots) c.K = *f.pivots;
  if (f.budget_rounds) c.budget_rounds = *f.budget_rounds;
  if (f.budget_seconds) c.budget_seconds = *f.budget_seconds;
  if (f.iterations) c.mcts_iterations = *f.iterations;
  if (f.seed) c.seed = *f.seed;
  if (f.solver) c.solver = *f.solver;
  if (f.solver_cmd) c.solver_cmd = *f.solver_cmd;
  if (f.builder) c.builder = *f.builder;
  if (f.reference) c.reference_set = *f.reference;
  if (!f.out.empty()) c.out_dir = f.out;
  // A single degree flag drags the other default along.
  if (c.d_final < c.d_search && f.d_search && !f.d_final) c.d_final = c.d_search;
  if (c.d_final < c.d_search && f.d_final && !f.d_search) c.d_search = c.d_final;
  if (c.degree_cap > c.d_search) c.degree_cap = 0;
  c.validate();
  return c;
}

GeometricParams resolve_point(const Flags& f) {
  if (!f.r || !f.R) throw ConfigError("--r and --R are required");
  GeometricParams x{*f.r, *f.R};
  try {
    x.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return x;
}

CompileOptions compile_options(const CampaignConfig& c) {
  CompileOptions o;
  o.builder = builder_by_name(c.builder);
  return o;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::trunc);
  out << text;
  out.close();
  if (!out) throw CampaignHalted("cannot write " + path);
}

std::string read_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CampaignHalted("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::ordered_json number(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json evaluation_json(const Evaluation& e) {
  nlohmann::ordered_json j;
  j["status"] = status_name(e.status);
  j["converged"] = e.converged;
  j["objective"] = number(e.objective);
  j["bound"] = number(e.bound);
  j["equality_residual"] = number(e.residuals.equality_residual);
  j["psd_residual"] = number(e.residuals.psd_residual);
  j["relative_gap"] = number(e.result.relative_gap);
  j["iterations"] = e.result.iterations;
  j["wall_time"] = e.wall_time;
  j["message"] = e.message;
  return j;
}

int run_compile(const Flags& f) {
  const CampaignConfig c = resolve_config(f);
  const GeometricParams x = resolve_point(f);
  const Sentence s = tokenize_and_parse(f.sentence);
  const SdpInstance inst = assemble_sdp(s, x, c.n, c.d_final, c.K, c.seed, compile_options(c));
  write_output(f.out, emit_sdpa(inst));
  std::cerr << "blocks " << inst.num_blocks() << ", rows " << inst.num_rows() << "\n";
  return kOk;
}

int run_solve(const Flags& f) {
  const CampaignConfig c = resolve_config(f);
  const SdpInstance inst = read_sdpa(read_input(f.input));
  const SolverChoice choice = solver_choice(c);
  SolverResult res;
  if (choice.external) {
    ExternalSolverConfig ext = choice.external_config;
    ext.work_dir = (fs::temp_directory_path() / "sdpgame_solve").string();
    res = solve_external(inst, ext);
  } else {
    res = solve_embedded(inst, choice.settings);
  }
  nlohmann::ordered_json j;
  j["status"] = status_name(res.status);
  j["objective"] = number(static_cast<double>(res.objective_value));
  j["dual_objective"] = number(static_cast<double>(res.dual_objective));
  j["equality_residual"] = number(res.equality_residual);
  j["psd_residual"] = number(res.psd_residual);
  j["relative_gap"] = number(res.relative_gap);
  j["iterations"] = res.iterations;
  j["wall_time"] = res.wall_time;
  j["message"] = res.message;
  if (!res.primal_blocks.empty()) {
    const ResidualReport rep = verify_certificate(inst, res);
    j["verified_equality_residual"] = number(rep.equality_residual);
    j["verified_psd_residual"] = number(rep.psd_residual);
    j["verified_objective"] = number(static_cast<double>(rep.objective_recomputed));
    if (f.r && f.R && f.dim) {
      const GeometricParams x = resolve_point(f);
      j["bound"] = number(static_cast<double>(compute_bound(rep.objective_recomputed, x, *f.dim).bound));
    }
  }
  write_output(f.out, j.dump(2) + "\n");
  return res.status == SolveStatus::kConverged ? kOk : kSearchFailed;
}

int run_search_command(const Flags& f) {
  const CampaignConfig c = resolve_config(f);
  const GeometricParams x = resolve_point(f);
  try {
    const SearchOutcome out = run_search(x, c.n, c.K, search_options(c, c.seed), solver_choice(c),
                                         compile_options(c));
    nlohmann::ordered_json j;
    j["r"] = x.r;
    j["R"] = x.R;
    j["sentence"] = render(out.best);
    j["final"] = evaluation_json(out.final_eval);
    j["solver_calls"] = out.solver_calls;
    j["cache_hits"] = out.cache_hits;
    j["distinct_sentences"] = out.distinct_sentences;
    nlohmann::ordered_json fin = nlohmann::ordered_json::array();
    for (const auto& fl : out.finalists) {
      fin.push_back({{"sentence", render(fl.sentence)},
                     {"search_bound", number(fl.search_eval.bound)},
                     {"final_status", status_name(fl.final_eval.status)},
                     {"final_bound", number(fl.final_eval.bound)}});
    }
    j["finalists"] = fin;
    write_output(f.out, j.dump(2) + "\n");
    return kOk;
  } catch (const SearchFailed& e) {
    std::cerr << "search failed: " << e.what() << "\n";
    for (const auto& line : e.log()) std::cerr << "  " << line << "\n";
    return kSearchFailed;
  }
}

int run_campaign_command(const Flags& f) {
  const CampaignConfig c = resolve_config(f);
  const CampaignResult res =
      run_campaign(c, f.resume, sdp_evaluator_factory(), [](const RoundRecord& r) {
        std::cerr << "round " << r.round << "  r=" << r.r << " R=" << r.R << "  " << r.status;
        if (r.converged()) std::cerr << "  bound=" << r.bound << "  " << r.sentence;
        std::cerr << "\n";
      });
  std::cerr << "stopped on " << res.stop_reason << " budget after " << res.rounds_played
            << " new rounds\n";
  write_output("", read_input((fs::path(c.out_dir) / "summary.json").string()));
  return kOk;
}

int run_report(const Flags& f) {
  const GameState st = load(f.input);
  ReferenceSet ref;
  if (f.reference) {
    try {
      ref = load_reference_set(*f.reference);
    } catch (const ParseError& e) {
      throw ConfigError(std::string("reference set: ") + e.what());
    }
  }
  const std::string dir = f.out.empty() ? fs::path(f.input).parent_path().string() : f.out;
  write_reports(st, ref, dir.empty() ? "." : dir);
  std::cout << summary_json(st, ref);
  return kOk;
}
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sphere packing bound search: sentence compiler, SDP solver, tree search and campaigns"};
  app.require_subcommand(1);
  Flags f;

  auto* compile = app.add_subcommand("compile", "compile a sentence to SDPA sparse text");
  add_common(compile, f);
  add_point(compile, f);
  compile->add_option("--degree-final,--degree", f.d_final, "certificate degree");
  compile->add_option("--sentence", f.sentence, "sentence text, e.g. \"P2 <ES> P1 <EOS>\"")->required();
  compile->add_option("--out", f.out, "output .dat-s file (default stdout)");

  auto* solve = app.add_subcommand("solve", "solve an SDPA instance file");
  add_common(solve, f);
  add_point(solve, f);
  solve->add_option("input", f.input, "SDPA .dat-s file")->required();
  solve->add_option("--out", f.out, "result JSON file (default stdout)");

  auto* search = app.add_subcommand("search", "tree search for the best sentence at a fixed (r, R)");
  add_common(search, f);
  add_point(search, f);
  add_degrees(search, f);
  search->add_option("--iterations", f.iterations, "tree search iterations");
  search->add_option("--out", f.out, "result JSON file (default stdout)");

  auto* campaign = app.add_subcommand("campaign", "play rounds of surrogate proposal and tree search");
  add_common(campaign, f);
  add_degrees(campaign, f);
  campaign->add_option("--iterations", f.iterations, "tree search iterations per round");
  campaign->add_option("--budget-rounds", f.budget_rounds, "total rounds in the state");
  campaign->add_option("--budget-seconds", f.budget_seconds, "wall-clock budget (0: none)");
  campaign->add_option("--reference", f.reference, "reference monomial list for novelty");
  campaign->add_option("--out", f.out, "output directory");
  campaign->add_flag("--resume", f.resume, "continue an existing state");

  auto* report = app.add_subcommand("report", "write diagnostics for a state file");
  report->add_option("input", f.input, "state.jsonl")->required();
  report->add_option("--reference", f.reference, "reference monomial list for novelty");
  report->add_option("--out", f.out, "output directory (default: next to the state file)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalidConfig;
  }

  try {
    if (*compile) return run_compile(f);
    if (*solve) return run_solve(f);
    if (*search) return run_search_command(f);
    if (*campaign) return run_campaign_command(f);
    if (*report) return run_report(f);
  } catch (const ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return kInvalidConfig;
  } catch (const ParseError& e) {
    std::cerr << "invalid sentence: " << e.what() << "\n";
    return kInvalidConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kInvalidConfig;
  } catch (const SearchFailed& e) {
    std::cerr << "search failed: " << e.what() << "\n";
    return kSearchFailed;
  } catch (const std::exception& e) {
    std::cerr << "halted: " << e.what() << "\n";
    return kHalted;
  }
  return kOk;
}
