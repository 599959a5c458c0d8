#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "sdpgame/bo.h"
#include "sdpgame/pivots.h"

namespace sdpgame {

std::string acquisition_name(AcquisitionKind k) {
  switch (k) {
    case AcquisitionKind::kExpectedImprovement: return "ei";
    case AcquisitionKind::kLowerConfidenceBound: return "lcb";
    case AcquisitionKind::kRankAggregate: return "rank";
  }
  return "ei";
}

AcquisitionKind acquisition_from_name(const std::string& s) {
  if (s == "ei") return AcquisitionKind::kExpectedImprovement;
  if (s == "lcb") return AcquisitionKind::kLowerConfidenceBound;
  if (s == "rank") return AcquisitionKind::kRankAggregate;
  throw std::invalid_argument("unknown acquisition '" + s + "' (expected ei, lcb or rank)");
}

namespace {
double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2 * M_PI); }
double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double probability_of_improvement(double mu, double sigma, double best) {
  if (!(sigma > 0)) return mu < best ? 1.0 : 0.0;
  return normal_cdf((best - mu) / sigma);
}

double latent_best(const Surrogate& s) { return s.warp_output(s.best_y()); }

// log(z Phi(z) + phi(z)), accurate far into the lower tail where EI
// underflows and every candidate would otherwise tie at zero.
double log_ei_factor(double z) {
  if (z > -6) return std::log(z * normal_cdf(z) + normal_pdf(z));
  const double z2 = z * z;
  return -0.5 * z2 - 0.5 * std::log(2 * M_PI) - 2 * std::log(-z) +
         std::log1p(-3 / z2 + 15 / (z2 * z2));
}

// Monotone in the acquisition for EI, used for ranking and local search.
double search_score(const Surrogate& s, const GeometricParams& x,
                    const AcquisitionOptions& options) {
  const Prediction p = s.latent(x);
  if (options.kind == AcquisitionKind::kLowerConfidenceBound) {
    return -(p.mu - options.kappa * p.sigma);
  }
  const double best = latent_best(s);
  if (!(p.sigma > 1e-300)) {
    return best > p.mu ? std::log(best - p.mu) : -std::numeric_limits<double>::infinity();
  }
  return std::log(p.sigma) + log_ei_factor((best - p.mu) / p.sigma);
}

bool feasible(const SearchBox& box, const GeometricParams& x) {
  return box.contains(x) && x.r < x.R;
}

struct LocalContext {
  const Surrogate* s;
  const SearchBox* box;
  const AcquisitionOptions* opt;
};

double negative_acquisition(const gsl_vector* v, void* params) {
  const auto* ctx = static_cast<const LocalContext*>(params);
  const double u0 = gsl_vector_get(v, 0), u1 = gsl_vector_get(v, 1);
  if (u0 < 0 || u0 > 1 || u1 < 0 || u1 > 1) return 1e300;
  const GeometricParams x = ctx->box->denormalize({u0, u1});
  if (!feasible(*ctx->box, x)) return 1e300;
  const double score = search_score(*ctx->s, x, *ctx->opt);
  return std::isfinite(score) ? -score : 1e300;
}

GeometricParams local_search(const LocalContext& ctx, const GeometricParams& start) {
  gsl_multimin_function f{&negative_acquisition, 2, const_cast<LocalContext*>(&ctx)};
  gsl_vector* x = gsl_vector_alloc(2);
  gsl_vector* step = gsl_vector_alloc(2);
  const auto u = ctx.box->normalize(start);
  gsl_vector_set(x, 0, u[0]);
  gsl_vector_set(x, 1, u[1]);
  gsl_vector_set_all(step, 0.05);
  gsl_multimin_fminimizer* m = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2);
  gsl_multimin_fminimizer_set(m, &f, x, step);
  for (int it = 0; it < 200; ++it) {
    if (gsl_multimin_fminimizer_iterate(m) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(m), 1e-6) == GSL_SUCCESS) break;
  }
  const GeometricParams out = ctx.box->denormalize({gsl_vector_get(m->x, 0), gsl_vector_get(m->x, 1)});
  gsl_multimin_fminimizer_free(m);
  gsl_vector_free(step);
  gsl_vector_free(x);
  return out;
}

// Ranks (0 = best) of values under descending order, ties by index.
std::vector<int> ranks_descending(const std::vector<double>& v) {
  std::vector<int> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] > v[b]; });
  std::vector<int> rank(v.size());
  for (size_t i = 0; i < idx.size(); ++i) rank[idx[i]] = static_cast<int>(i);
  return rank;
}
}  // namespace

double expected_improvement(double mu, double sigma, double best) {
  if (!(sigma > 0)) return std::max(0.0, best - mu);
  const double z = (best - mu) / sigma;
  return std::max(0.0, (best - mu) * normal_cdf(z) + sigma * normal_pdf(z));
}

double acquisition_value(const Surrogate& s, const GeometricParams& x,
                         const AcquisitionOptions& options) {
  const Prediction p = s.latent(x);
  switch (options.kind) {
    case AcquisitionKind::kLowerConfidenceBound:
      return -(p.mu - options.kappa * p.sigma);
    case AcquisitionKind::kExpectedImprovement:
    case AcquisitionKind::kRankAggregate:
      break;
  }
  return expected_improvement(p.mu, p.sigma, latent_best(s));
}

std::vector<GeometricParams> initial_design(const SearchBox& box, int count, uint64_t seed) {
  box.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double shift0 = unif(rng), shift1 = unif(rng);
  std::vector<GeometricParams> out;
  const uint64_t budget = 1000 + 1000 * static_cast<uint64_t>(std::max(count, 0));
  for (uint64_t i = 1; static_cast<int>(out.size()) < count && i <= budget; ++i) {
    const double u0 = std::fmod(radical_inverse(i, 2) + shift0, 1.0);
    const double u1 = std::fmod(radical_inverse(i, 3) + shift1, 1.0);
    const GeometricParams x = box.denormalize({u0, u1});
    if (feasible(box, x)) out.push_back(x);
  }
  if (static_cast<int>(out.size()) < count) {
    throw std::invalid_argument("search box has too little area with r < R");
  }
  return out;
}

GeometricParams propose_next(const Surrogate& s, const SearchBox& box, uint64_t seed,
                             const AcquisitionOptions& options) {
  box.validate();
  if (s.empty()) return initial_design(box, 1, seed)[0];
  const std::vector<GeometricParams> cands =
      initial_design(box, std::max(1, options.candidates), seed);

  if (options.kind == AcquisitionKind::kRankAggregate) {
    // EI, PI and the confidence bound each rank the candidates; the smallest
    // rank sum wins.
    const double best = latent_best(s);
    std::vector<double> ei, pi, lcb;
    for (const auto& x : cands) {
      const Prediction p = s.latent(x);
      ei.push_back(expected_improvement(p.mu, p.sigma, best));
      pi.push_back(probability_of_improvement(p.mu, p.sigma, best));
      lcb.push_back(-(p.mu - options.kappa * p.sigma));
    }
    const auto r1 = ranks_descending(ei), r2 = ranks_descending(pi), r3 = ranks_descending(lcb);
    size_t arg = 0;
    int best_sum = std::numeric_limits<int>::max();
    for (size_t i = 0; i < cands.size(); ++i) {
      const int sum = r1[i] + r2[i] + r3[i];
      if (sum < best_sum) {
        best_sum = sum;
        arg = i;
      }
    }
    return cands[arg];
  }

  std::vector<double> vals;
  for (const auto& x : cands) vals.push_back(search_score(s, x, options));
  std::vector<int> order(cands.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] > vals[b]; });

  GeometricParams best = cands[order[0]];
  double best_val = vals[order[0]];
  const LocalContext ctx{&s, &box, &options};
  const int starts = std::min<int>(options.local_starts, static_cast<int>(order.size()));
  for (int i = 0; i < starts; ++i) {
    const GeometricParams x = local_search(ctx, cands[order[i]]);
    if (!feasible(box, x)) continue;
    const double v = search_score(s, x, options);
    if (v > best_val) {
      best_val = v;
      best = x;
    }
  }
  return best;
}

}  // namespace sdpgame
