#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "adapt/error.hpp"
#include "adapt/glm.hpp"

namespace adapt {

// Mann-Whitney AUC, P(score+ > score-) + P(tie) / 2, from the rank sum of
// the positives with average ranks for ties.
inline double auc(const Vector& scores, const Vector& labels) {
  if (scores.size() != labels.size())
    throw DimensionError("scores and labels differ in length");
  const Index n = scores.size();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) { return scores[a] < scores[b]; });

  double positives = 0.0;
  double rank_sum = 0.0;
  for (Index i = 0; i < n;) {
    Index j = i;
    while (j + 1 < n && scores[order[static_cast<std::size_t>(j + 1)]] ==
                            scores[order[static_cast<std::size_t>(i)]])
      ++j;
    // ranks i+1 .. j+1 share their average
    const double avg_rank = 0.5 * static_cast<double>(i + j + 2);
    for (Index k = i; k <= j; ++k) {
      const double y = labels[order[static_cast<std::size_t>(k)]];
      if (y != 0.0 && y != 1.0) throw MetricError("AUC labels must be 0 or 1");
      if (y == 1.0) {
        positives += 1.0;
        rank_sum += avg_rank;
      }
    }
    i = j + 1;
  }
  const double negatives = static_cast<double>(n) - positives;
  if (positives == 0.0 || negatives == 0.0)
    throw MetricError("AUC needs at least one positive and one negative label");
  const double u = rank_sum - positives * (positives + 1.0) / 2.0;
  return u / (positives * negatives);
}

// Mean AUC per (train period, eval period) cell.
struct AucTable {
  std::map<std::pair<int, int>, double> entries;
  int reps = 0;

  void set(int train_period, int eval_period, double value) {
    if (!(value >= 0.0 && value <= 1.0))
      throw MetricError("AUC " + std::to_string(value) + " outside [0, 1]");
    entries[{train_period, eval_period}] = value;
  }

  std::optional<double> get(int train_period, int eval_period) const {
    const auto it = entries.find({train_period, eval_period});
    if (it == entries.end()) return std::nullopt;
    return it->second;
  }
};

// Worst AUC of the model trained at `train_period` over strictly later
// evaluation periods.
inline double worst_future_auc(const AucTable& table, int train_period) {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& [key, value] : table.entries)
    if (key.first == train_period && key.second > train_period) worst = std::min(worst, value);
  if (!std::isfinite(worst))
    throw MetricError("no evaluation period after training period " + std::to_string(train_period));
  return worst;
}

struct AgingOptions {
  bool skip_missing = false;  // average over the periods that are present
};

// Aging effect A(delta): mean over t = delta+1..T of
//   (AUC(t, t) - AUC(t - delta, t)) / (AUC(t, t) - 0.5),
// the relative AUC loss of a model trained delta periods earlier against a
// model trained on period t itself.
inline double aging_effect(const AucTable& table, int delta, int last_period,
                           const AgingOptions& opt = {}) {
  if (delta < 1 || delta >= last_period)
    throw MetricError("aging effect needs 1 <= delta < T (delta " + std::to_string(delta) +
                      ", T " + std::to_string(last_period) + ")");
  double total = 0.0;
  int used = 0;
  for (int t = delta + 1; t <= last_period; ++t) {
    const auto newborn = table.get(t, t);
    const auto aged = table.get(t - delta, t);
    if (!newborn || !aged) {
      if (opt.skip_missing) continue;
      throw MetricError("missing AUC entry for t=" + std::to_string(t) + " (needs (" +
                        std::to_string(t) + "," + std::to_string(t) + ") and (" +
                        std::to_string(t - delta) + "," + std::to_string(t) + "))");
    }
    const double denom = *newborn - 0.5;
    if (!(denom > 0.0))
      throw MetricError("denominator nonpositive at t=" + std::to_string(t) +
                        " (AUC " + std::to_string(*newborn) + ")");
    total += (*newborn - *aged) / denom;
    ++used;
  }
  if (used == 0) throw MetricError("no usable periods for the aging effect");
  return total / static_cast<double>(opt.skip_missing ? used : last_period - delta);
}

}  // namespace adapt
