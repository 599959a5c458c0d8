#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "sdpgame/orchestrator.h"

namespace sdpgame {

namespace fs = std::filesystem;

namespace {
double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void append_note(std::string& msg, const std::string& note) {
  if (note.empty()) return;
  msg += (msg.empty() ? "" : "; ") + note;
}

SurrogateOptions surrogate_options(const CampaignConfig& c) {
  SurrogateOptions o;
  o.input_warp = c.input_warp;
  o.output_warp = c.output_warp;
  return o;
}

AcquisitionOptions acquisition_options(const CampaignConfig& c) {
  AcquisitionOptions o;
  o.kind = acquisition_from_name(c.acquisition);
  o.kappa = c.kappa;
  o.candidates = c.candidates;
  return o;
}
}  // namespace

uint64_t round_seed(uint64_t campaign_seed, int round, int stream) {
  return splitmix64(splitmix64(campaign_seed) ^ (static_cast<uint64_t>(round) << 8) ^
                    static_cast<uint64_t>(stream));
}

EvaluatorFactory sdp_evaluator_factory() {
  return [](const CampaignConfig& c, const GeometricParams& x,
            uint64_t seed) -> std::unique_ptr<SentenceEvaluator> {
    CompileOptions compile;
    compile.builder = builder_by_name(c.builder);
    return std::make_unique<SdpEvaluator>(x, c.n, c.K, seed, solver_choice(c), compile);
  };
}

GameState play_round(GameState state, const CampaignConfig& config,
                     const EvaluatorFactory& factory) {
  config.validate();
  RoundRecord rec;
  rec.round = state.next_round();
  rec.n = config.n;
  rec.d_search = config.d_search;
  rec.d_final = config.d_final;
  rec.K = config.K;
  rec.seed_bo = round_seed(config.seed, rec.round, 1);
  rec.seed_search = round_seed(config.seed, rec.round, 2);
  rec.objective = rec.bound = NAN;

  // Stage 1: geometric parameters.
  const auto t_bo = std::chrono::steady_clock::now();
  std::vector<Observation> observations;
  for (const auto& r : state.rounds) {
    if (r.converged() && std::isfinite(r.bound)) observations.push_back({{r.r, r.R}, r.bound});
  }
  GeometricParams x;
  std::string notes;
  bool proposed = false;
  if (rec.round > config.initial_points && !observations.empty()) {
    try {
      const Surrogate s = fit_surrogate(observations, config.box, rec.seed_bo,
                                        surrogate_options(config));
      for (const auto& w : s.warnings()) append_note(notes, w);
      x = propose_next(s, config.box, rec.seed_bo, acquisition_options(config));
      proposed = true;
    } catch (const std::exception& e) {
      append_note(notes, std::string("surrogate unavailable, using the initial design: ") +
                             e.what());
    }
  }
  if (!proposed) x = initial_design(config.box, rec.round, config.seed)[rec.round - 1];
  rec.r = x.r;
  rec.R = x.R;
  rec.wall_bo = seconds_since(t_bo);

  // Stage 2: sentence search and finalist solve.
  const auto t_search = std::chrono::steady_clock::now();
  try {
    auto eval = factory(config, x, rec.seed_search);
    SearchOutcome best;
    bool have = false;
    std::string failure;
    for (int k = 0; k < config.mcts_restarts; ++k) {
      try {
        SearchOutcome out = run_search(*eval, search_options(config, rec.seed_search + k));
        rec.solver_calls += out.solver_calls;
        const bool better = !have || out.final_eval.bound < best.final_eval.bound ||
                            (out.final_eval.bound == best.final_eval.bound &&
                             sentence_less(out.best, best.best));
        if (better) {
          best = std::move(out);
          have = true;
        }
      } catch (const SearchFailed& e) {
        failure = e.what();
        if (!e.log().empty()) failure += " (last: " + e.log().back() + ")";
      }
    }
    if (have) {
      const Evaluation& f = best.final_eval;
      rec.sentence = render(best.best);
      rec.status = status_name(f.status);
      rec.objective = f.objective;
      rec.bound = f.bound;
      rec.equality_residual = f.residuals.equality_residual;
      rec.psd_residual = f.residuals.psd_residual;
      rec.relative_gap = f.result.relative_gap;
      rec.wall_final = f.wall_time;
      append_note(notes, f.message);
      if (!best.audit.empty()) append_note(notes, "tree audit: " + best.audit);
    } else {
      rec.status = "search-failed";
      append_note(notes, failure);
    }
  } catch (const std::exception& e) {
    rec.status = "search-failed";
    append_note(notes, e.what());
  }
  rec.wall_search = seconds_since(t_search);
  rec.message = notes;
  state.append(rec);
  return state;
}

CampaignResult run_campaign(const CampaignConfig& config, bool resume,
                            const EvaluatorFactory& factory,
                            const std::function<void(const RoundRecord&)>& on_round) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path dir(config.out_dir);
  const fs::path state_path = dir / "state.jsonl";
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw CampaignHalted("cannot create output directory " + dir.string() + ": " + ec.message());

  ReferenceSet ref;
  if (!config.reference_set.empty()) {
    try {
      ref = load_reference_set(config.reference_set);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("reference_set: ") + e.what());
    }
  }

  CampaignResult result;
  const bool existing = fs::exists(state_path) && fs::file_size(state_path) > 0;
  if (existing && !resume) {
    throw ConfigError("state file " + state_path.string() +
                      " already exists; resume it or choose another output directory");
  }
  try {
    if (existing) {
      result.state = load(state_path.string(), true);
      persist(result.state, state_path.string());
    } else {
      persist(GameState{}, state_path.string());
    }
    std::ofstream cfg(dir / "config.json", std::ios::trunc);
    cfg << config_to_json(config);
    if (!cfg) throw std::runtime_error("cannot write " + (dir / "config.json").string());
  } catch (const StateFormatError& e) {
    throw CampaignHalted(std::string("cannot resume: ") + e.what());
  } catch (const std::runtime_error& e) {
    throw CampaignHalted(e.what());
  }

  result.stop_reason = "rounds";
  while (static_cast<int>(result.state.rounds.size()) < config.budget_rounds) {
    if (config.budget_seconds > 0 && seconds_since(t0) >= config.budget_seconds) {
      result.stop_reason = "seconds";
      break;
    }
    result.state = play_round(std::move(result.state), config, factory);
    try {
      append_record(state_path.string(), result.state.rounds.back());
    } catch (const std::runtime_error& e) {
      throw CampaignHalted(e.what());
    }
    ++result.rounds_played;
    if (on_round) on_round(result.state.rounds.back());
  }
  try {
    write_reports(result.state, ref, dir.string());
  } catch (const std::runtime_error& e) {
    throw CampaignHalted(e.what());
  }
  return result;
}

}  // namespace sdpgame
