#pragma once

#include <vector>

#include "lakecausal/core/variables.hpp"

namespace lakecausal::causal {

struct ContextFlags {
  bool s_dummy = true;  // lake identity
  bool r_dummy = true;  // region
  bool t_dummy = true;  // day-of-year phase (sin, cos)

  bool enabled(VariableId v) const noexcept {
    switch (v) {
      case VariableId::SDummy: return s_dummy;
      case VariableId::RDummy: return r_dummy;
      case VariableId::TDummy: return t_dummy;
      default: return false;
    }
  }
  friend bool operator==(const ContextFlags&, const ContextFlags&) = default;
};

struct DiscoveryConfig {
  int tau_max = 7;
  double alpha = 0.01;
  std::vector<VariableId> targets = {VariableId::HvAnom};
  ContextFlags use_context;
  // Largest conditioning set drawn from one variable's ranked parents.
  int max_conds = 10;
  int jobs = 1;

  // Throws ConfigError.
  void validate() const;
};

// A variable observed `lag` days before the reference day.
struct LaggedVar {
  VariableId var = VariableId::HvAnom;
  int lag = 0;

  friend auto operator<=>(const LaggedVar&, const LaggedVar&) = default;
};

}  // namespace lakecausal::causal
