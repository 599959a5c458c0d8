#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sdpgame/poly.h"

namespace sdpgame {

struct SearchBox {
  double r_min = 1.0, r_max = 1.5;
  double R_min = 1.5, R_max = 2.5;

  // Throws std::invalid_argument when a range is empty or no point of the
  // box has r < R.
  void validate() const;
  bool contains(const GeometricParams& x) const;
  // Maps into and out of the unit square.
  std::array<double, 2> normalize(const GeometricParams& x) const;
  GeometricParams denormalize(const std::array<double, 2>& u) const;
};

struct Observation {
  GeometricParams x;
  double y = 0;  // best bound seen at x
};

// Hyperparameters in natural units. Inputs live on the unit square; outputs
// are standardized before the output warp.
struct GpHyper {
  std::array<double, 2> lengthscale{0.3, 0.3};
  double signal_variance = 1.0;
  double noise_variance = 1e-10;
  // Kumaraswamy input warp 1 - (1 - u^a)^b per dimension.
  std::array<double, 2> warp_a{1.0, 1.0};
  std::array<double, 2> warp_b{1.0, 1.0};
  // Yeo-Johnson output warp; 1 is the identity.
  double lambda = 1.0;
};

struct SurrogateOptions {
  bool input_warp = true;
  bool output_warp = true;
  bool fit_noise = true;
  // Latent noise variance floor; certified bounds still carry solver error.
  double noise_floor = 1e-8;
  int restarts = 4;
  int max_evaluations = 300;
};

struct Prediction {
  double mu = 0;
  double sigma = 0;
};

class Surrogate {
 public:
  Surrogate() = default;

  bool empty() const { return data_.empty(); }
  const std::vector<Observation>& data() const { return data_; }
  const SearchBox& box() const { return box_; }
  const GpHyper& hyper() const { return hyper_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  double best_y() const;
  double log_marginal_likelihood() const { return lml_; }

  // Throws std::invalid_argument outside the box.
  Prediction posterior(const GeometricParams& x) const;
  // Posterior in the warped, standardized output space.
  Prediction latent(const GeometricParams& x) const;
  // Latent value of an observed y.
  double warp_output(double y) const;
  // Prior standard deviation mapped to y units (exact under identity warp).
  double signal_scale() const;

 private:
  friend Surrogate fit_surrogate(const std::vector<Observation>&, const SearchBox&,
                                 uint64_t, const SurrogateOptions&);
  friend Surrogate fit_surrogate_fixed(const std::vector<Observation>&, const SearchBox&,
                                       const GpHyper&, const SurrogateOptions&);
  void condition();

  std::vector<Observation> data_;
  SearchBox box_;
  GpHyper hyper_;
  SurrogateOptions options_;
  std::vector<std::string> warnings_;
  double y_mean_ = 0, y_scale_ = 1;
  double lml_ = 0;
  Eigen::MatrixXd inputs_;  // n x 2, warped
  Eigen::VectorXd alpha_;
  Eigen::LLT<Eigen::MatrixXd> chol_;
  double latent_mean_ = 0;
};

// Marginal-likelihood fit with seeded multi-start Nelder-Mead. Duplicate x
// keep the smallest y and record a warning. Throws std::invalid_argument for
// empty data or non-finite y.
Surrogate fit_surrogate(const std::vector<Observation>& data, const SearchBox& box,
                        uint64_t seed, const SurrogateOptions& options = {});
Surrogate fit_surrogate_fixed(const std::vector<Observation>& data, const SearchBox& box,
                              const GpHyper& hyper, const SurrogateOptions& options = {});

enum class AcquisitionKind { kExpectedImprovement, kLowerConfidenceBound, kRankAggregate };

std::string acquisition_name(AcquisitionKind k);
AcquisitionKind acquisition_from_name(const std::string& s);

struct AcquisitionOptions {
  AcquisitionKind kind = AcquisitionKind::kExpectedImprovement;
  double kappa = 2.0;  // confidence multiplier for the bound term
  int candidates = 512;
  int local_starts = 4;
};

// Expected improvement below `best` for a Gaussian (mu, sigma).
double expected_improvement(double mu, double sigma, double best);

// Larger is better. EI and LCB are evaluated in the latent space.
double acquisition_value(const Surrogate& s, const GeometricParams& x,
                         const AcquisitionOptions& options = {});

// Space-filling points of the box with r < R, deterministic in (box, seed).
std::vector<GeometricParams> initial_design(const SearchBox& box, int count, uint64_t seed);

// Maximizes the acquisition; an empty surrogate yields initial_design(box, 1,
// seed)[0]. Throws std::invalid_argument for an empty feasible box.
GeometricParams propose_next(const Surrogate& s, const SearchBox& box, uint64_t seed,
                             const AcquisitionOptions& options = {});

}  // namespace sdpgame
