#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "lakecausal/causal/graph.hpp"
#include "lakecausal/core/dataset.hpp"

namespace lakecausal::synth {

struct SynthConfig {
  int lakes_per_class = 25;  // per region
  std::vector<Region> regions = {kRegions.begin(), kRegions.end()};
  std::uint64_t seed = 0;
  int year = 2019;
  // Scales the label-linked signature of each region's nuisance variable.
  // Outside that region the same variable carries the signature of a
  // random class, so the link holds within the region only.
  double spurious_strength = 1.0;
  // Multiplies the innovation noise of each observed variable.
  std::array<double, kNumObserved> noise_scale = {1, 1, 1, 1, 1, 1, 1, 1, 1};

  // Throws ConfigError.
  void validate() const;
};

struct SynthOutput {
  Dataset dataset;
  causal::CausalGraph truth;
};

// Lakes are ordered by region, class, index. Each lake draws from its own
// generator derived from (seed, region, class, index).
SynthOutput generate(const SynthConfig& cfg);

// The generating parents of hv_anom: lags 1-4 of itself, the optical water
// fraction on the same day and the day before, and the lake drift.
causal::CausalGraph truth_graph();

// Variable carrying the label-linked signature inside `region`.
VariableId nuisance_variable(Region region);
// Signature period (days) that `var` uses for `label`; var must be r2, sp or sst.
double signature_period(VariableId var, Label label);

}  // namespace lakecausal::synth
