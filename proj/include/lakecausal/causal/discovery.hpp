#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "lakecausal/causal/ci_test.hpp"
#include "lakecausal/causal/graph.hpp"

namespace lakecausal::causal {

struct DiscoveryStats {
  std::size_t selection_tests = 0;
  std::size_t mci_tests = 0;
};

// A candidate surviving condition selection, with the weakest |statistic|
// it showed across the tests it went through.
struct RankedParent {
  LaggedVar parent;
  double min_abs_statistic = 0.0;
};

// Condition-selection phase for one target: PC-stable elimination with
// conditioning sets drawn from the currently strongest candidates. Result is
// ordered strongest first; ties go to (variable, lag) order.
std::vector<RankedParent> select_conditions(const CiTester& tester, VariableId target,
                                            const DiscoveryConfig& cfg, DiscoveryStats* stats = nullptr);

// Lagged parents of every configured target: condition selection followed by
// a momentary conditional independence (MCI) retest of each survivor, given
// the target's other selected parents and the candidate's own selected
// parents shifted by its lag. Links with p <= alpha are kept. Lag-0 links
// between observed variables are reported as parents of the target.
CausalGraph discover_parents(const PooledPanel& panel, const DiscoveryConfig& cfg,
                             DiscoveryStats* stats = nullptr);

}  // namespace lakecausal::causal
