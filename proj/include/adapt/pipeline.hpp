#pragma once

// End-to-end robust transfer fit: period models, uncertainty set and the
// anchored projection, plus the penalty policy shared with the baselines.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "adapt/glm.hpp"
#include "adapt/random.hpp"
#include "adapt/sampling.hpp"
#include "adapt/solver.hpp"

namespace adapt {

// How lambda is chosen for every penalized fit in a run.
struct PenaltyPolicy {
  double mixing = 1.0;
  int folds = 5;
  int grid_size = 20;
  bool standardize = true;
  std::optional<double> fixed_lambda;  // skips cross-validation when set
};

inline CoefficientVector fit_with_policy(const Dataset& data, Link link, const PenaltyPolicy& policy,
                                         std::uint64_t seed) {
  PenaltyConfig pen{0.0, policy.mixing, policy.standardize};
  if (policy.fixed_lambda) {
    pen.lambda = *policy.fixed_lambda;
  } else {
    pen = cross_validate_lambda_detailed(data, link, policy.mixing, policy.folds, policy.grid_size,
                                         seed, policy.standardize)
              .selected;
  }
  return fit_penalized(data, link, pen);
}

// Source l is fitted with its own sub-seed so a fit never depends on how
// many other sources are present.
inline std::vector<CoefficientVector> fit_sources(const std::vector<Dataset>& sources, Link link,
                                                  const PenaltyPolicy& policy, std::uint64_t seed) {
  std::vector<CoefficientVector> fits;
  fits.reserve(sources.size());
  for (std::size_t l = 0; l < sources.size(); ++l)
    fits.push_back(fit_with_policy(sources[l], link, policy,
                                   derive_seed(seed, {tag("source-fit"), l})));
  return fits;
}

inline ModelBank source_bank(const std::vector<Dataset>& sources,
                             const std::vector<CoefficientVector>& fits) {
  ModelBank bank;
  bank.columns = fits;
  for (std::size_t l = 0; l < sources.size(); ++l)
    bank.labels.push_back(sources[l].period.value_or(static_cast<int>(l) + 1));
  return bank;
}

enum class Anchor { target, best_source, zero };
enum class BankLayout { full, sources };

inline Anchor parse_anchor(std::string_view s) {
  if (s == "target") return Anchor::target;
  if (s == "best-source") return Anchor::best_source;
  if (s == "zero") return Anchor::zero;
  throw InvalidArgument("unknown anchor '" + std::string(s) + "'");
}

inline BankLayout parse_bank_layout(std::string_view s) {
  if (s == "full") return BankLayout::full;
  if (s == "sources") return BankLayout::sources;
  throw InvalidArgument("unknown bank layout '" + std::string(s) + "'");
}

struct PipelineOptions {
  double split_fraction = 0.5;
  Anchor anchor = Anchor::target;
  BankLayout bank = BankLayout::full;
  std::optional<double> tau;  // overrides the midpoint rule; +inf drops the constraint
  PenaltyPolicy policy;
  SolverOptions solver;
};

struct PipelineResult {
  CoefficientVector beta;
  SimplexWeights weights;
  AdaptDiagnostics diagnostics;
  ModelBank bank;
  CoefficientVector target_estimate;  // fitted on the estimation half
  CoefficientVector best_combination;
  SimplexWeights best_combination_weights;
  double tau = 0.0;
  double target_loss = 0.0;       // held-out loss of target_estimate
  double combination_loss = 0.0;  // held-out loss of best_combination
  SplitIndices split;             // empty when no split was made
};

// Sources must be ordered by ascending period. Seeds for the split, the
// target fit and every source fit derive from `seed`.
//
// With an infinite tau the held-out half plays no role, so the target is
// not split: every fit and the Hessian use all target rows.
inline PipelineResult run_adapt_pipeline(const std::vector<Dataset>& sources, const Dataset& target,
                                         Link link, std::uint64_t seed,
                                         const PipelineOptions& options = {},
                                         const std::vector<CoefficientVector>* source_fits = nullptr) {
  if (sources.empty()) throw InvalidArgument("at least one source dataset is required");
  target.validate(link);
  if (target.rows() < 20) throw InvalidArgument("target needs at least 20 rows to split");
  for (const auto& s : sources)
    if (s.dim() != target.dim()) throw DimensionError("source and target widths differ");

  PipelineResult out;
  std::vector<CoefficientVector> fitted;
  if (source_fits == nullptr) {
    fitted = fit_sources(sources, link, options.policy, seed);
    source_fits = &fitted;
  } else if (source_fits->size() != sources.size()) {
    throw DimensionError("precomputed source fits do not match sources");
  }
  const ModelBank sources_only = source_bank(sources, *source_fits);

  const bool unconstrained = options.tau && std::isinf(*options.tau);
  Dataset estimation;
  Dataset held_out;
  if (unconstrained) {
    estimation = target;
    held_out = target;
  } else {
    out.split = split_indices(static_cast<std::size_t>(target.rows()), options.split_fraction,
                              derive_seed(seed, {tag("split")}));
    estimation = target.subset(out.split.first);
    held_out = target.subset(out.split.second);
  }

  out.target_estimate =
      fit_with_policy(estimation, link, options.policy, derive_seed(seed, {tag("target-fit")}));
  std::tie(out.best_combination_weights, out.best_combination) =
      best_source_combination(sources_only, held_out, link, options.solver.inner);
  out.target_loss = negative_log_likelihood(out.target_estimate, held_out, link);
  out.combination_loss = negative_log_likelihood(out.best_combination, held_out, link);
  out.tau = options.tau ? *options.tau : 0.5 * (out.target_loss + out.combination_loss);

  if (options.bank == BankLayout::full) {
    out.bank.columns.push_back(out.target_estimate);
    out.bank.labels.push_back(target.period.value_or(static_cast<int>(sources.size()) + 1));
    out.bank.columns.insert(out.bank.columns.end(), sources_only.columns.begin(),
                            sources_only.columns.end());
    out.bank.labels.insert(out.bank.labels.end(), sources_only.labels.begin(),
                           sources_only.labels.end());
  } else {
    out.bank = sources_only;
  }

  CoefficientVector anchor(target.dim());
  if (options.anchor == Anchor::target) anchor = out.target_estimate;
  if (options.anchor == Anchor::best_source) anchor = out.best_combination;

  if (!options.tau && options.bank == BankLayout::full &&
      std::min(out.target_loss, out.combination_loss) > out.tau)
    throw SolverError("midpoint rule produced an empty uncertainty set");

  const Matrix hess = hessian(anchor, estimation, link);
  const UncertaintySet set{out.bank, out.tau, held_out, link};
  AdaptResult r = adapt_estimate(set, anchor, hess, options.solver);
  out.beta = std::move(r.beta);
  out.weights = std::move(r.weights);
  out.diagnostics = std::move(r.diagnostics);
  return out;
}

}  // namespace adapt
