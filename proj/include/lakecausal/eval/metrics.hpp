#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

#include "lakecausal/core/dataset.hpp"

namespace lakecausal::eval {

using Confusion = std::array<std::array<std::size_t, kNumClasses>, kNumClasses>;  // [truth][prediction]

struct Metrics {
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  std::array<std::size_t, kNumClasses> support{};
  Confusion confusion{};
};

// Macro averages run over all four classes; a 0/0 precision or recall is 0.
Metrics compute_metrics(std::span<const Label> predictions, std::span<const Label> truth);

// Accuracy difference in percentage points, rounded to two decimals.
double gain_points(double causal_accuracy, double baseline_accuracy);

struct Split {
  Dataset train;
  Dataset test;
};

// Per class (canonical order) the members are shuffled with one seeded
// generator and round(ratio * n_c) of them go to train. ratio must lie in
// (0, 1) and every class present needs at least two lakes.
Split stratified_split(const Dataset& ds, double ratio, std::uint64_t seed);

}  // namespace lakecausal::eval
