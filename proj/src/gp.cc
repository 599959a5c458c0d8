// Gaussian-process surrogate: Matern-5/2 ARD kernel, Kumaraswamy input warp,
// Yeo-Johnson output warp.

#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>

#include "sdpgame/bo.h"

namespace sdpgame {

void SearchBox::validate() const {
  auto finite = [](double x) { return std::isfinite(x); };
  if (!(finite(r_min) && finite(r_max) && finite(R_min) && finite(R_max))) {
    throw std::invalid_argument("search box bounds must be finite");
  }
  if (!(r_min > 0 && r_min < r_max && R_min < R_max)) {
    throw std::invalid_argument("search box needs 0 < r_min < r_max and R_min < R_max");
  }
  if (!(r_min < R_max)) {
    throw std::invalid_argument("search box has no point with r < R");
  }
}

bool SearchBox::contains(const GeometricParams& x) const {
  return x.r >= r_min && x.r <= r_max && x.R >= R_min && x.R <= R_max;
}

std::array<double, 2> SearchBox::normalize(const GeometricParams& x) const {
  return {(x.r - r_min) / (r_max - r_min), (x.R - R_min) / (R_max - R_min)};
}

GeometricParams SearchBox::denormalize(const std::array<double, 2>& u) const {
  return {r_min + u[0] * (r_max - r_min), R_min + u[1] * (R_max - R_min)};
}

namespace {

constexpr double kLengthLo = 0.03, kLengthHi = 3.0;
constexpr double kSignalLo = 0.05, kSignalHi = 20.0;
constexpr double kNoiseHi = 0.1;
constexpr double kWarpLo = 0.5, kWarpHi = 3.0;
constexpr double kLambdaLo = 0.25, kLambdaHi = 2.0;

double kumaraswamy(double u, double a, double b) {
  u = std::clamp(u, 0.0, 1.0);
  return 1.0 - std::pow(1.0 - std::pow(u, a), b);
}

double yeo_johnson(double z, double lam) {
  if (z >= 0) {
    return std::abs(lam) < 1e-12 ? std::log1p(z) : (std::pow(z + 1, lam) - 1) / lam;
  }
  const double m = 2 - lam;
  return std::abs(m) < 1e-12 ? -std::log1p(-z) : -(std::pow(1 - z, m) - 1) / m;
}

double yeo_johnson_derivative(double z, double lam) {
  return z >= 0 ? std::pow(z + 1, lam - 1) : std::pow(1 - z, 1 - lam);
}

double yeo_johnson_inverse(double w, double lam) {
  if (w >= 0) {
    if (std::abs(lam) < 1e-12) return std::expm1(w);
    const double base = std::max(lam * w + 1, 1e-300);
    return std::pow(base, 1 / lam) - 1;
  }
  const double m = 2 - lam;
  if (std::abs(m) < 1e-12) return -std::expm1(-w);
  const double base = std::max(1 - m * w, 1e-300);
  return 1 - std::pow(base, 1 / m);
}

double matern52(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const GpHyper& h) {
  const double dx = (a(0) - b(0)) / h.lengthscale[0];
  const double dy = (a(1) - b(1)) / h.lengthscale[1];
  const double r = std::sqrt(5.0 * (dx * dx + dy * dy));
  return h.signal_variance * (1 + r + r * r / 3) * std::exp(-r);
}

struct Prepared {
  std::vector<Observation> data;
  Eigen::MatrixXd unit;  // n x 2 normalized inputs
  Eigen::VectorXd z;     // standardized outputs
  double y_mean = 0, y_scale = 1;
};

Prepared prepare(const std::vector<Observation>& raw, const SearchBox& box,
                 std::vector<std::string>& warnings) {
  if (raw.empty()) throw std::invalid_argument("surrogate needs at least one observation");
  box.validate();
  std::map<std::pair<double, double>, double> best;
  std::vector<std::pair<double, double>> order;
  for (const auto& o : raw) {
    if (!std::isfinite(o.y)) throw std::invalid_argument("observation y must be finite");
    if (!box.contains(o.x)) {
      std::ostringstream os;
      os << "observation (" << o.x.r << ", " << o.x.R << ") lies outside the search box";
      throw std::invalid_argument(os.str());
    }
    const auto key = std::make_pair(o.x.r, o.x.R);
    auto it = best.find(key);
    if (it == best.end()) {
      best.emplace(key, o.y);
      order.push_back(key);
    } else if (o.y != it->second) {
      std::ostringstream os;
      os << "duplicate input (" << o.x.r << ", " << o.x.R << ") with y " << it->second
         << " and " << o.y << "; keeping the smaller";
      warnings.push_back(os.str());
      it->second = std::min(it->second, o.y);
    }
  }
  Prepared p;
  const int n = static_cast<int>(order.size());
  p.unit.resize(n, 2);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    const GeometricParams x{order[i].first, order[i].second};
    p.data.push_back({x, best[order[i]]});
    const auto u = box.normalize(x);
    p.unit(i, 0) = u[0];
    p.unit(i, 1) = u[1];
    y(i) = p.data.back().y;
  }
  p.y_mean = y.mean();
  const double var = n > 1 ? (y.array() - p.y_mean).square().sum() / (n - 1) : 0.0;
  p.y_scale = var > 0 ? std::sqrt(var) : 1.0;
  p.z = (y.array() - p.y_mean) / p.y_scale;
  return p;
}

Eigen::Vector2d warp_input(double u0, double u1, const GpHyper& h, bool on) {
  if (!on) return {u0, u1};
  return {kumaraswamy(u0, h.warp_a[0], h.warp_b[0]), kumaraswamy(u1, h.warp_a[1], h.warp_b[1])};
}

struct Conditioned {
  Eigen::MatrixXd inputs;
  Eigen::LLT<Eigen::MatrixXd> chol;
  Eigen::VectorXd alpha;
  double mean = 0;
  double lml = -std::numeric_limits<double>::infinity();
};

Conditioned condition_on(const Prepared& p, const GpHyper& h, const SurrogateOptions& opt) {
  Conditioned c;
  const int n = static_cast<int>(p.z.size());
  c.inputs.resize(n, 2);
  for (int i = 0; i < n; ++i) {
    c.inputs.row(i) = warp_input(p.unit(i, 0), p.unit(i, 1), h, opt.input_warp).transpose();
  }
  Eigen::VectorXd w(n);
  double log_jac = 0;
  for (int i = 0; i < n; ++i) {
    const double lam = opt.output_warp ? h.lambda : 1.0;
    w(i) = yeo_johnson(p.z(i), lam);
    log_jac += std::log(yeo_johnson_derivative(p.z(i), lam));
  }
  c.mean = w.mean();
  Eigen::MatrixXd K(n, n);
  const double il0 = 1 / h.lengthscale[0], il1 = 1 / h.lengthscale[1];
  for (int j = 0; j < n; ++j) {
    const double a0 = c.inputs(j, 0), a1 = c.inputs(j, 1);
    K(j, j) = h.signal_variance;
    for (int i = j + 1; i < n; ++i) {
      const double dx = (c.inputs(i, 0) - a0) * il0, dy = (c.inputs(i, 1) - a1) * il1;
      const double r = std::sqrt(5.0 * (dx * dx + dy * dy));
      K(i, j) = h.signal_variance * (1 + r + r * r / 3) * std::exp(-r);
    }
  }
  K.triangularView<Eigen::StrictlyUpper>() = K.transpose();
  K.diagonal().array() += h.noise_variance;
  c.chol.compute(K);
  // Jitter escalation for near-duplicate inputs.
  double jitter = 1e-12 * h.signal_variance;
  for (int attempt = 0; attempt < 9 && c.chol.info() != Eigen::Success; ++attempt) {
    Eigen::MatrixXd Kj = K;
    Kj.diagonal().array() += jitter;
    c.chol.compute(Kj);
    jitter *= 10;
  }
  if (c.chol.info() != Eigen::Success) return c;
  const Eigen::VectorXd r = w.array() - c.mean;
  c.alpha = c.chol.solve(r);
  const double logdet = 2 * c.chol.matrixLLT().diagonal().array().log().sum();
  c.lml = -0.5 * r.dot(c.alpha) - 0.5 * logdet - 0.5 * n * std::log(2 * M_PI) + log_jac;
  return c;
}

// Unconstrained coordinates <-> hyperparameters.
struct Coding {
  SurrogateOptions opt;

  static double squash(double t) { return 1 / (1 + std::exp(-t)); }
  static double unsquash(double s) {
    s = std::clamp(s, 1e-9, 1 - 1e-9);
    return std::log(s / (1 - s));
  }
  static double log_box(double t, double lo, double hi) {
    return lo * std::pow(hi / lo, squash(t));
  }
  static double log_unbox(double v, double lo, double hi) {
    return unsquash(std::log(v / lo) / std::log(hi / lo));
  }

  int size() const {
    return 3 + (opt.fit_noise ? 1 : 0) + (opt.input_warp ? 4 : 0) + (opt.output_warp ? 1 : 0);
  }

  GpHyper decode(const double* t) const {
    GpHyper h;
    int k = 0;
    h.lengthscale[0] = log_box(t[k++], kLengthLo, kLengthHi);
    h.lengthscale[1] = log_box(t[k++], kLengthLo, kLengthHi);
    h.signal_variance = log_box(t[k++], kSignalLo, kSignalHi);
    h.noise_variance = opt.fit_noise ? log_box(t[k++], opt.noise_floor, kNoiseHi) : opt.noise_floor;
    if (opt.input_warp) {
      for (int d = 0; d < 2; ++d) h.warp_a[d] = log_box(t[k++], kWarpLo, kWarpHi);
      for (int d = 0; d < 2; ++d) h.warp_b[d] = log_box(t[k++], kWarpLo, kWarpHi);
    }
    if (opt.output_warp) h.lambda = kLambdaLo + (kLambdaHi - kLambdaLo) * squash(t[k++]);
    return h;
  }

  std::vector<double> encode(const GpHyper& h) const {
    std::vector<double> t;
    t.push_back(log_unbox(h.lengthscale[0], kLengthLo, kLengthHi));
    t.push_back(log_unbox(h.lengthscale[1], kLengthLo, kLengthHi));
    t.push_back(log_unbox(h.signal_variance, kSignalLo, kSignalHi));
    if (opt.fit_noise) {
      t.push_back(log_unbox(std::clamp(h.noise_variance, opt.noise_floor * 1.0001, kNoiseHi),
                            opt.noise_floor, kNoiseHi));
    }
    if (opt.input_warp) {
      for (int d = 0; d < 2; ++d) t.push_back(log_unbox(h.warp_a[d], kWarpLo, kWarpHi));
      for (int d = 0; d < 2; ++d) t.push_back(log_unbox(h.warp_b[d], kWarpLo, kWarpHi));
    }
    if (opt.output_warp) t.push_back(unsquash((h.lambda - kLambdaLo) / (kLambdaHi - kLambdaLo)));
    return t;
  }
};

struct FitContext {
  const Prepared* prepared;
  const Coding* coding;
};

double negative_lml(const gsl_vector* v, void* params) {
  const auto* ctx = static_cast<const FitContext*>(params);
  const GpHyper h = ctx->coding->decode(v->data);
  const double lml = condition_on(*ctx->prepared, h, ctx->coding->opt).lml;
  return std::isfinite(lml) ? -lml : 1e300;
}

class NelderMead {
 public:
  NelderMead(const FitContext& ctx, const std::vector<double>& start)
      : f_{&negative_lml, start.size(), const_cast<FitContext*>(&ctx)}, ctx_(ctx) {
    const size_t k = start.size();
    x_ = gsl_vector_alloc(k);
    step_ = gsl_vector_alloc(k);
    for (size_t i = 0; i < k; ++i) {
      gsl_vector_set(x_, i, start[i]);
      gsl_vector_set(step_, i, 0.7);
    }
    m_ = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, k);
    gsl_multimin_fminimizer_set(m_, &f_, x_, step_);
    window_start_ = m_->fval;
  }
  NelderMead(const NelderMead&) = delete;
  NelderMead& operator=(const NelderMead&) = delete;
  ~NelderMead() {
    gsl_multimin_fminimizer_free(m_);
    gsl_vector_free(step_);
    gsl_vector_free(x_);
  }

  // Runs until `limit` total iterations or convergence.
  void run(int limit) {
    // Flat directions (saturated warps) keep the simplex wide, so a stalled
    // best value also ends the run.
    constexpr int kStallWindow = 40;
    while (!done_ && iterations_ < limit) {
      ++iterations_;
      if (gsl_multimin_fminimizer_iterate(m_) != GSL_SUCCESS ||
          gsl_multimin_test_size(gsl_multimin_fminimizer_size(m_), 1e-3) == GSL_SUCCESS) {
        done_ = true;
      } else if (iterations_ % kStallWindow == 0) {
        if (window_start_ - m_->fval <= 1e-6 * (1 + std::abs(m_->fval))) done_ = true;
        window_start_ = m_->fval;
      }
    }
  }
  double value() const { return m_->fval; }
  GpHyper best() const { return ctx_.coding->decode(m_->x->data); }

 private:
  gsl_multimin_function f_;
  const FitContext& ctx_;
  gsl_vector* x_ = nullptr;
  gsl_vector* step_ = nullptr;
  gsl_multimin_fminimizer* m_ = nullptr;
  double window_start_ = 0;
  int iterations_ = 0;
  bool done_ = false;
};

}  // namespace

double Surrogate::best_y() const {
  if (data_.empty()) throw std::logic_error("empty surrogate has no best value");
  double b = data_[0].y;
  for (const auto& o : data_) b = std::min(b, o.y);
  return b;
}

void Surrogate::condition() {
  std::vector<std::string> ignored;
  const Prepared p = prepare(data_, box_, ignored);
  Conditioned c = condition_on(p, hyper_, options_);
  if (!std::isfinite(c.lml)) {
    throw std::runtime_error("surrogate kernel matrix is not positive definite");
  }
  y_mean_ = p.y_mean;
  y_scale_ = p.y_scale;
  inputs_ = std::move(c.inputs);
  chol_ = std::move(c.chol);
  alpha_ = std::move(c.alpha);
  latent_mean_ = c.mean;
  lml_ = c.lml;
}

Prediction Surrogate::latent(const GeometricParams& x) const {
  if (data_.empty()) throw std::logic_error("empty surrogate");
  if (!box_.contains(x)) {
    std::ostringstream os;
    os << "query (" << x.r << ", " << x.R << ") lies outside the search box";
    throw std::invalid_argument(os.str());
  }
  const auto u = box_.normalize(x);
  const Eigen::Vector2d q = warp_input(u[0], u[1], hyper_, options_.input_warp);
  const int n = static_cast<int>(inputs_.rows());
  Eigen::VectorXd ks(n);
  for (int i = 0; i < n; ++i) ks(i) = matern52(inputs_.row(i).transpose(), q, hyper_);
  const double mean = latent_mean_ + ks.dot(alpha_);
  const Eigen::VectorXd v = chol_.matrixL().solve(ks);
  const double var = std::max(0.0, hyper_.signal_variance - v.squaredNorm());
  return {mean, std::sqrt(var)};
}

double Surrogate::warp_output(double y) const {
  const double lam = options_.output_warp ? hyper_.lambda : 1.0;
  return yeo_johnson((y - y_mean_) / y_scale_, lam);
}

Prediction Surrogate::posterior(const GeometricParams& x) const {
  const Prediction l = latent(x);
  const double lam = options_.output_warp ? hyper_.lambda : 1.0;
  const double z = yeo_johnson_inverse(l.mu, lam);
  const double slope = yeo_johnson_derivative(z, lam);
  return {y_mean_ + y_scale_ * z, y_scale_ * l.sigma / slope};
}

double Surrogate::signal_scale() const { return y_scale_ * std::sqrt(hyper_.signal_variance); }

Surrogate fit_surrogate_fixed(const std::vector<Observation>& data, const SearchBox& box,
                              const GpHyper& hyper, const SurrogateOptions& options) {
  Surrogate s;
  const Prepared p = prepare(data, box, s.warnings_);
  s.data_ = p.data;
  s.box_ = box;
  s.options_ = options;
  s.hyper_ = hyper;
  if (!options.fit_noise) s.hyper_.noise_variance = options.noise_floor;
  s.condition();
  return s;
}

Surrogate fit_surrogate(const std::vector<Observation>& data, const SearchBox& box,
                        uint64_t seed, const SurrogateOptions& options) {
  Surrogate s;
  const Prepared p = prepare(data, box, s.warnings_);
  const Coding coding{options};
  const FitContext ctx{&p, &coding};

  GpHyper start;
  start.noise_variance = std::max(options.noise_floor * 10, 1e-6);
  std::vector<std::vector<double>> starts{coding.encode(start)};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.5);
  for (int i = 1; i < std::max(1, options.restarts); ++i) {
    std::vector<double> t(coding.size());
    for (auto& x : t) x = gauss(rng);
    starts.push_back(std::move(t));
  }
  // Every start gets a short probe; only the most promising continues.
  constexpr int kProbeIterations = 60;
  constexpr size_t kSurvivors = 1;
  std::vector<std::unique_ptr<NelderMead>> runs;
  for (const auto& t : starts) {
    runs.push_back(std::make_unique<NelderMead>(ctx, t));
    runs.back()->run(std::min(kProbeIterations, options.max_evaluations));
  }
  std::stable_sort(runs.begin(), runs.end(),
                   [](const auto& a, const auto& b) { return a->value() < b->value(); });
  GpHyper best = start;
  double best_val = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < runs.size(); ++i) {
    if (i < kSurvivors) runs[i]->run(options.max_evaluations);
    if (runs[i]->value() < best_val) {
      best_val = runs[i]->value();
      best = runs[i]->best();
    }
  }
  s.data_ = p.data;
  s.box_ = box;
  s.options_ = options;
  s.hyper_ = best;
  s.condition();
  return s;
}

}  // namespace sdpgame
