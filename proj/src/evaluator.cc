#include <chrono>
#include <cmath>

#include "sdpgame/mcts.h"

namespace sdpgame {

namespace {
double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string cache_key(const Sentence& s, int d) { return render(s) + "|" + std::to_string(d); }
}  // namespace

SdpEvaluator::SdpEvaluator(GeometricParams params, int n, int K, uint64_t seed,
                           SolverChoice solver, CompileOptions compile)
    : params_(params), n_(n), K_(K), seed_(seed), solver_(std::move(solver)),
      compile_(std::move(compile)) {
  params_.validate();
}

Evaluation SdpEvaluator::evaluate(const Sentence& s, int d) {
  const auto t0 = std::chrono::steady_clock::now();
  Evaluation e;
  try {
    const SdpInstance inst = assemble_sdp(s, params_, n_, d, K_, seed_, compile_);
    SolverResult res = solver_.external ? solve_external(inst, solver_.external_config)
                                        : solve_embedded(inst, solver_.settings);
    e.status = res.status;
    e.message = res.message;
    if (res.status == SolveStatus::kConverged) {
      e.residuals = verify_certificate(inst, res);
      const double tol_eq = solver_.settings.tol_eq, tol_psd = solver_.settings.tol_psd;
      if (e.residuals.equality_residual <= 10 * tol_eq &&
          e.residuals.psd_residual >= -10 * tol_psd) {
        e.converged = true;
        e.objective = to_double(e.residuals.objective_recomputed);
        e.bound = to_double(compute_bound(e.residuals.objective_recomputed, params_, n_).bound);
      } else {
        e.status = SolveStatus::kNumericFailure;
        e.message = "certificate verification failed: equality residual " +
                    std::to_string(e.residuals.equality_residual) + ", psd residual " +
                    std::to_string(e.residuals.psd_residual);
      }
    }
    // Blocks are large and only needed for verification.
    res.primal_blocks.clear();
    e.result = std::move(res);
  } catch (const std::exception& ex) {
    e.converged = false;
    e.status = SolveStatus::kNumericFailure;
    e.message = ex.what();
  }
  e.wall_time = seconds_since(t0);
  return e;
}

SyntheticEvaluator::SyntheticEvaluator(std::function<double(const Sentence&, int)> fn)
    : fn_(std::move(fn)) {}

Evaluation SyntheticEvaluator::evaluate(const Sentence& s, int d) {
  ++calls_;
  Evaluation e;
  const double b = fn_(s, d);
  if (std::isnan(b)) {
    e.status = SolveStatus::kNumericFailure;
    e.message = "synthetic failure";
    return e;
  }
  e.converged = true;
  e.status = SolveStatus::kConverged;
  e.bound = e.objective = b;
  return e;
}

double squash_reward(const Evaluation& e) {
  if (!e.converged || !std::isfinite(e.bound)) return 0.0;
  return 1.0 / (1.0 + std::max(e.bound, 0.0));
}

const Evaluation* RewardCache::find(const Sentence& s, int d) const {
  auto it = entries_.find(cache_key(s, d));
  return it == entries_.end() ? nullptr : &it->second;
}

void RewardCache::store(const Sentence& s, int d, const Evaluation& e) {
  entries_[cache_key(s, d)] = e;
}

Evaluation RewardCache::lookup_or_evaluate(const Sentence& s, int d, SentenceEvaluator& eval) {
  if (enabled) {
    if (const Evaluation* hit = find(s, d)) {
      ++hits_;
      return *hit;
    }
  }
  ++misses_;
  Evaluation e = eval.evaluate(s, d);
  if (enabled) store(s, d, e);
  return e;
}

}  // namespace sdpgame
