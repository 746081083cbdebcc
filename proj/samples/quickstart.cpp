// Simulates one drifting scenario, fits ADAPT and the three baselines on the
// current period, and prints same-period and worst-future AUC per method.

#include <algorithm>
#include <cstdio>
#include <cstdlib>

#include "adapt/adapt.hpp"

using namespace adapt;

int main(int argc, char** argv) {
  DriftConfig drift;
  drift.dim = 30;
  drift.zero_coords = 9;
  drift.samples_per_period = 1000;
  drift.rho = argc > 1 ? std::atof(argv[1]) : 0.2;
  drift.seed = 2024;
  const Scenario sc = generate_scenario(drift, 7, 2000);

  PenaltyPolicy policy;
  policy.folds = 3;
  policy.grid_size = 10;
  const std::uint64_t seed = 11;
  const auto sources = fit_sources(sc.history, Link::logistic, policy, seed);

  PipelineOptions opt;
  opt.policy = policy;
  const PipelineResult adapt_fit = run_adapt_pipeline(sc.history, sc.current, Link::logistic, seed, opt, &sources);
  std::printf("tau %.4f  target loss %.4f  source-mix loss %.4f  constraint %s\n", adapt_fit.tau,
              adapt_fit.target_loss, adapt_fit.combination_loss,
              adapt_fit.diagnostics.constraint_active ? "active" : "slack");
  std::printf("weights:");
  for (Index k = 0; k < adapt_fit.weights.size(); ++k)
    std::printf(" %d:%.3f", adapt_fit.bank.labels[static_cast<std::size_t>(k)], adapt_fit.weights.gamma[k]);
  std::printf("\n\n");

  const std::pair<const char*, CoefficientVector> models[] = {
      {"adapt", adapt_fit.beta},
      {"target_only", fit_target_only(sc.current, Link::logistic, policy, seed)},
      {"pooled", fit_pooled(sc.history, sc.current, Link::logistic, policy, seed)},
      {"maximin", fit_maximin(sc.history, sc.current, Link::logistic, policy, seed, &sources).first},
  };
  std::printf("%-12s %10s %14s\n", "method", "same AUC", "worst future");
  for (const auto& [name, beta] : models) {
    AucTable table;
    for (const auto& eval : sc.evaluation)
      table.set(7, *eval.period, auc(predict_scores(beta, eval, Link::logistic), eval.outcomes));
    std::printf("%-12s %10.4f %14.4f\n", name, *table.get(7, 7), worst_future_auc(table, 7));
  }
  return 0;
}
