#pragma once

// Row-level resampling utilities: target splitting and case-control
// downsampling.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "adapt/glm.hpp"
#include "adapt/random.hpp"

namespace adapt {

struct SplitIndices {
  std::vector<std::size_t> first;
  std::vector<std::size_t> second;
};

// Shuffled partition of n rows; the first part has floor(fraction * n) rows.
inline SplitIndices split_indices(std::size_t n, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw InvalidArgument("split fraction must lie strictly between 0 and 1");
  const auto head = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
  if (head == 0 || head == n)
    throw InvalidArgument("split of " + std::to_string(n) + " rows at fraction " +
                          std::to_string(fraction) + " leaves one side empty");
  Rng rng = make_rng(seed, {tag("target-split")});
  const auto order = permutation(n, rng);
  SplitIndices s;
  s.first.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(head));
  s.second.assign(order.begin() + static_cast<std::ptrdiff_t>(head), order.end());
  std::sort(s.first.begin(), s.first.end());
  std::sort(s.second.begin(), s.second.end());
  return s;
}

inline std::pair<Dataset, Dataset> split_target(const Dataset& data, double fraction,
                                                std::uint64_t seed) {
  const SplitIndices s = split_indices(static_cast<std::size_t>(data.rows()), fraction, seed);
  return {data.subset(s.first), data.subset(s.second)};
}

// Keeps every case (y = 1) and samples up to cases * controls_per_case
// controls without replacement. Row order of the input is preserved.
inline Dataset downsample_controls(const Dataset& data, int controls_per_case, std::uint64_t seed) {
  if (controls_per_case < 1) throw InvalidArgument("controls_per_case must be at least 1");
  std::vector<std::size_t> cases;
  std::vector<std::size_t> controls;
  for (Index i = 0; i < data.rows(); ++i)
    (data.outcomes[i] == 1.0 ? cases : controls).push_back(static_cast<std::size_t>(i));
  if (cases.empty()) throw InvalidArgument("case-control downsampling needs at least one case");

  const std::size_t wanted =
      std::min(controls.size(), cases.size() * static_cast<std::size_t>(controls_per_case));
  Rng rng = make_rng(seed, {tag("downsample-controls")});
  const auto order = permutation(controls.size(), rng);
  std::vector<std::size_t> keep = cases;
  for (std::size_t k = 0; k < wanted; ++k) keep.push_back(controls[order[k]]);
  std::sort(keep.begin(), keep.end());
  return data.subset(keep);
}

}  // namespace adapt
