#pragma once

#include <string>
#include <vector>

#include "sdpgame/sdp.h"

namespace sdpgame {

enum class SolveStatus { kConverged, kMaxIterations, kInfeasible, kNumericFailure };

// "converged", "max_iterations", "infeasible-detected", "numeric-failure".
std::string status_name(SolveStatus s);
SolveStatus status_from_name(const std::string& s);

struct Checkpoint {
  int iteration = 0;
  double best_equality_residual = 0;
};

struct SolverResult {
  SolveStatus status = SolveStatus::kNumericFailure;
  Real objective_value = 0;
  Real dual_objective = 0;
  std::vector<SymMatrix> primal_blocks;
  // Max over rows of |A_k . X - b_k| / ||A_k||_F.
  double equality_residual = 0;
  // Smallest eigenvalue over all primal blocks.
  double psd_residual = 0;
  double relative_gap = 0;
  int iterations = 0;
  double wall_time = 0;
  std::string message;
  std::vector<Checkpoint> checkpoints;
};

enum class SolverMethod { kInteriorPoint, kSplitting };

struct SolverSettings {
  double tol_eq = 1e-8;
  double tol_psd = 1e-8;
  int max_iterations = 50000;
  SolverMethod method = SolverMethod::kInteriorPoint;
  // Relative duality gap required for convergence.
  double tol_gap = 1e-7;
  // Interior point arithmetic: long double when true, double otherwise.
  bool extended_precision = true;
  // Re-solve in quadruple precision when the long double interior point run
  // ends without a verdict.
  bool quad_fallback = true;
  // Splitting penalty; adapted during the run.
  double rho = 1.0;
};

SolverResult solve_embedded(const SdpInstance& inst, double tol_eq,
                            double tol_psd, int max_iterations);
SolverResult solve_embedded(const SdpInstance& inst,
                            const SolverSettings& settings = {});

struct ResidualReport {
  double equality_residual = 0;
  double psd_residual = 0;
  Real objective_recomputed = 0;
  // Row-normalized violation of the normalization row alone.
  double normalization_residual = 0;
};

// Recomputes every row product, eigenvalue floor and the objective from the
// primal blocks in working precision. Throws std::invalid_argument when the
// blocks do not match the instance.
ResidualReport verify_certificate(const SdpInstance& inst,
                                  const SolverResult& res);

// Parses an SDPA-family result file. Only phase pdOPT maps to converged.
// Throws FormatError on unparseable or truncated text.
SolverResult parse_external_output(const std::string& text);

class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, int line);
  int line() const { return line_; }

 private:
  int line_;
};

// Reads SDPA sparse text into an instance with dense row terms. Row 0 is
// interpreted as the negated objective, matching emit_sdpa.
SdpInstance read_sdpa(const std::string& text);

struct ExternalSolverConfig {
  // Shell command with {input} and {output} placeholders.
  std::string command;
  std::string work_dir = ".";
  std::string stem = "instance";
  int digits = 40;
};

// Emits the instance, runs the command and parses its result file. Any
// failure to run or parse becomes a numeric-failure result.
SolverResult solve_external(const SdpInstance& inst,
                            const ExternalSolverConfig& config);

}  // namespace sdpgame
