#pragma once

// Synthetic temporal-drift benchmark. Coefficients follow an autoregressive
// mixing path with sparse random shocks and a one-time global perturbation;
// each period draws standard-normal covariates and logistic outcomes.
//
// Random streams (all derived from DriftConfig::seed):
//   path/seeds         initial sparse seed vectors
//   path/shock, l      shock indicators and shock values of period l
//   path/perturb       the perturbation vector
//   period, l          historical dataset of period l
//   current            current-period training data
//   eval, l            fresh evaluation data of period l
// Changing the perturbation level touches none of the other streams.

#include <cstdint>
#include <string>
#include <vector>

#include "adapt/error.hpp"
#include "adapt/glm.hpp"
#include "adapt/random.hpp"

namespace adapt {

struct DriftConfig {
  int periods = 15;         // L
  int dim = 100;            // p
  int zero_coords = 30;     // p0, zeroed entries per seed vector
  int ar_order = 3;         // m
  std::vector<double> ar_weights;  // empty -> uniform 1/m; [k] weights beta^(l-m+k)
  double shock_prob = 0.2;
  double shock_sd = 1.0;
  double perturb_level = 0.0;
  int perturb_period = 8;
  int samples_per_period = 2000;  // N
  double rho = 0.2;               // current size = round(rho * N)
  std::uint64_t seed = 0;

  std::vector<double> weights() const {
    if (!ar_weights.empty()) return ar_weights;
    return std::vector<double>(static_cast<std::size_t>(ar_order), 1.0 / ar_order);
  }

  void validate() const {
    auto fail = [](const std::string& m) { throw InvalidArgument("drift config: " + m); };
    if (periods < 2) fail("periods must be at least 2");
    if (dim < 1) fail("dim must be at least 1");
    if (zero_coords < 0 || zero_coords > dim) fail("zero_coords must lie in [0, dim]");
    if (ar_order < 1 || ar_order >= periods) fail("ar_order must lie in [1, periods)");
    if (!ar_weights.empty()) {
      if (static_cast<int>(ar_weights.size()) != ar_order) fail("ar_weights length must equal ar_order");
      for (double w : ar_weights)
        if (!(w > 0.0)) fail("ar_weights must be positive");
    }
    if (!(shock_prob >= 0.0 && shock_prob <= 1.0)) fail("shock_prob must lie in [0, 1]");
    if (!(shock_sd >= 0.0)) fail("shock_sd must be nonnegative");
    if (!(perturb_level >= 0.0 && perturb_level < 1.0)) fail("perturb_level must lie in [0, 1)");
    if (perturb_period < 1 || perturb_period > periods) fail("perturb_period must lie in [1, periods]");
    if (samples_per_period < 1) fail("samples_per_period must be positive");
    if (!(rho > 0.0 && rho <= 1.0)) fail("rho must lie in (0, 1]");
  }
};

struct CoefficientPath {
  std::vector<CoefficientVector> betas;        // betas[l - 1] is period l
  std::vector<std::vector<bool>> shocked;      // per period; empty for seed periods
};

inline CoefficientPath generate_coefficient_path(const DriftConfig& cfg) {
  cfg.validate();
  const Index p = cfg.dim;
  const int m = cfg.ar_order;
  const std::vector<double> w = cfg.weights();
  CoefficientPath path;
  path.betas.reserve(static_cast<std::size_t>(cfg.periods));
  path.shocked.resize(static_cast<std::size_t>(cfg.periods));

  Rng perturb_rng = make_rng(cfg.seed, {tag("path"), tag("perturb")});
  StandardNormal perturb_normal;
  auto perturbation = [&] {
    Vector z(p);
    for (Index j = 0; j < p; ++j) z[j] = std::sqrt(0.5) * perturb_normal(perturb_rng);
    return z;
  };
  auto apply_perturbation = [&](int l, Vector& beta) {
    if (l != cfg.perturb_period) return;
    const Vector z = perturbation();
    beta = (1.0 - cfg.perturb_level) * beta + cfg.perturb_level * z;
  };

  Rng seed_rng = make_rng(cfg.seed, {tag("path"), tag("seeds")});
  StandardNormal seed_normal;
  for (int l = 1; l <= m; ++l) {
    Vector beta(p);
    for (Index j = 0; j < p; ++j) beta[j] = seed_normal(seed_rng);
    const auto order = permutation(static_cast<std::size_t>(p), seed_rng);
    for (int k = 0; k < cfg.zero_coords; ++k) beta[static_cast<Index>(order[static_cast<std::size_t>(k)])] = 0.0;
    apply_perturbation(l, beta);
    path.betas.emplace_back(0.0, std::move(beta));
  }

  for (int l = m + 1; l <= cfg.periods; ++l) {
    Vector mix = Vector::Zero(p);
    for (int k = 0; k < m; ++k)
      mix += w[static_cast<std::size_t>(k)] * path.betas[static_cast<std::size_t>(l - m + k - 1)].slopes;

    Rng rng = make_rng(cfg.seed, {tag("path"), tag("shock"), static_cast<std::uint64_t>(l)});
    StandardNormal normal;
    auto& mask = path.shocked[static_cast<std::size_t>(l - 1)];
    mask.resize(static_cast<std::size_t>(p));
    Vector beta(p);
    for (Index j = 0; j < p; ++j) {
      const bool hit = uniform01(rng) < cfg.shock_prob;
      const double shock = cfg.shock_sd * normal(rng);
      mask[static_cast<std::size_t>(j)] = hit;
      beta[j] = hit ? shock : mix[j];
    }
    apply_perturbation(l, beta);
    path.betas.emplace_back(0.0, std::move(beta));
  }
  return path;
}

// Standard-normal covariates and Bernoulli(sigmoid(x'beta)) outcomes.
inline Dataset generate_dataset(const CoefficientVector& beta, Index n, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("dataset size must be positive");
  const Index p = beta.dim();
  Dataset d;
  d.features.resize(n, p);
  Rng xrng = make_rng(seed, {tag("X")});
  StandardNormal normal;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) d.features(i, j) = normal(xrng);
  const Vector eta = linear_predictor(beta, d.features);
  Rng yrng = make_rng(seed, {tag("Y")});
  d.outcomes.resize(n);
  for (Index i = 0; i < n; ++i) d.outcomes[i] = uniform01(yrng) < detail::sigmoid(eta[i]) ? 1.0 : 0.0;
  return d;
}

// One dataset of N rows per period, labelled 1..L.
inline std::vector<Dataset> generate_period_datasets(const DriftConfig& cfg, const CoefficientPath& path) {
  std::vector<Dataset> out;
  for (int l = 1; l <= cfg.periods; ++l) {
    Dataset d = generate_dataset(path.betas[static_cast<std::size_t>(l - 1)], cfg.samples_per_period,
                                 derive_seed(cfg.seed, {tag("period"), static_cast<std::uint64_t>(l)}));
    d.period = l;
    out.push_back(std::move(d));
  }
  return out;
}

struct Scenario {
  CoefficientPath path;
  std::vector<Dataset> history;     // periods 1 .. current-1, N rows each
  Dataset current;                  // period current, round(rho * N) rows
  std::vector<Dataset> evaluation;  // periods current .. L, fresh draws
  int current_period = 0;
};

inline Index current_sample_size(const DriftConfig& cfg) {
  return std::max<Index>(1, static_cast<Index>(std::llround(cfg.rho * cfg.samples_per_period)));
}

inline Scenario generate_scenario(const DriftConfig& cfg, int current_period, Index eval_size) {
  cfg.validate();
  if (current_period < 1 || current_period > cfg.periods)
    throw InvalidArgument("current period " + std::to_string(current_period) + " outside [1, " +
                          std::to_string(cfg.periods) + "]");
  if (eval_size < 1) throw InvalidArgument("evaluation size must be positive");
  Scenario s;
  s.current_period = current_period;
  s.path = generate_coefficient_path(cfg);
  auto beta = [&](int l) -> const CoefficientVector& { return s.path.betas[static_cast<std::size_t>(l - 1)]; };

  for (int l = 1; l < current_period; ++l) {
    Dataset d = generate_dataset(beta(l), cfg.samples_per_period,
                                 derive_seed(cfg.seed, {tag("period"), static_cast<std::uint64_t>(l)}));
    d.period = l;
    s.history.push_back(std::move(d));
  }
  s.current = generate_dataset(beta(current_period), current_sample_size(cfg),
                               derive_seed(cfg.seed, {tag("current")}));
  s.current.period = current_period;
  for (int l = current_period; l <= cfg.periods; ++l) {
    Dataset d = generate_dataset(beta(l), eval_size,
                                 derive_seed(cfg.seed, {tag("eval"), static_cast<std::uint64_t>(l)}));
    d.period = l;
    s.evaluation.push_back(std::move(d));
  }
  return s;
}

}  // namespace adapt
