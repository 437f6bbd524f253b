#include "lakecausal/causal/discovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lakecausal/core/error.hpp"
#include "lakecausal/core/parallel.hpp"

namespace lakecausal::causal {
namespace {

std::vector<LaggedVar> observed_candidates(const PooledPanel& panel, VariableId target) {
  std::vector<LaggedVar> out;
  for (auto v : kObservedVariables) {
    for (int lag = 0; lag <= panel.tau_max(); ++lag) {
      if (v == target && lag == 0) continue;
      out.push_back({v, lag});
    }
  }
  return out;
}

// Strongest first; ties by canonical (variable, lag).
void rank(std::vector<RankedParent>& items) {
  std::stable_sort(items.begin(), items.end(), [](const RankedParent& a, const RankedParent& b) {
    if (a.min_abs_statistic != b.min_abs_statistic) return a.min_abs_statistic > b.min_abs_statistic;
    return a.parent < b.parent;
  });
}

std::vector<LaggedVar> observed_strongest(const std::vector<RankedParent>& ranked, std::size_t limit,
                                          const LaggedVar* skip = nullptr) {
  std::vector<LaggedVar> out;
  for (const auto& r : ranked) {
    if (out.size() >= limit) break;
    if (is_context(r.parent.var) || (skip && r.parent == *skip)) continue;
    out.push_back(r.parent);
  }
  return out;
}

void append_contexts(const std::vector<RankedParent>& ranked, std::vector<LaggedVar>& z) {
  for (const auto& r : ranked) {
    if (is_context(r.parent.var)) z.push_back(r.parent);
  }
}

}  // namespace

std::vector<RankedParent> select_conditions(const CiTester& tester, VariableId target,
                                            const DiscoveryConfig& cfg, DiscoveryStats* stats) {
  const LaggedVar y{target, 0};
  const PooledPanel& panel = tester.panel();

  // Context dummies are exogenous: each is screened once against the target
  // and, if kept, joins every later conditioning set.
  std::vector<RankedParent> contexts;
  for (auto d : kContextVariables) {
    if (!panel.context().enabled(d)) continue;
    const auto r = tester.test({d, 0}, y, {});
    if (stats) ++stats->selection_tests;
    if (r.p_value <= cfg.alpha) contexts.push_back({{d, 0}, std::abs(r.statistic)});
  }
  std::vector<LaggedVar> context_z;
  for (const auto& c : contexts) context_z.push_back(c.parent);

  std::vector<RankedParent> alive;
  for (const auto& c : observed_candidates(panel, target)) {
    alive.push_back({c, std::numeric_limits<double>::infinity()});
  }

  for (std::size_t p = 0; p <= static_cast<std::size_t>(cfg.max_conds); ++p) {
    if (alive.empty() || (p > 0 && alive.size() - 1 < p)) break;
    rank(alive);

    std::vector<CiResult> results(alive.size());
    parallel_for(alive.size(), cfg.jobs, [&](std::size_t i) {
      auto z = observed_strongest(alive, p, &alive[i].parent);
      z.insert(z.end(), context_z.begin(), context_z.end());
      results[i] = tester.test(alive[i].parent, y, z);
    });
    if (stats) stats->selection_tests += alive.size();

    // Removals take effect only after the whole sweep (PC-stable).
    std::vector<RankedParent> next;
    for (std::size_t i = 0; i < alive.size(); ++i) {
      if (results[i].p_value > cfg.alpha) continue;
      auto kept = alive[i];
      kept.min_abs_statistic = std::min(kept.min_abs_statistic, std::abs(results[i].statistic));
      next.push_back(kept);
    }
    alive = std::move(next);
  }
  rank(alive);
  alive.insert(alive.end(), contexts.begin(), contexts.end());
  return alive;
}

CausalGraph discover_parents(const PooledPanel& panel, const DiscoveryConfig& cfg, DiscoveryStats* stats) {
  cfg.validate();
  if (panel.tau_max() != cfg.tau_max) throw ConfigError("panel was pooled with a different tau_max");
  if (!(panel.context() == cfg.use_context)) throw ConfigError("panel was pooled with different context flags");

  const CiTester tester(panel);
  const auto limit = static_cast<std::size_t>(cfg.max_conds);
  std::map<VariableId, std::vector<RankedParent>> selected;
  auto selection = [&](VariableId v) -> const std::vector<RankedParent>& {
    auto it = selected.find(v);
    if (it == selected.end()) it = selected.emplace(v, select_conditions(tester, v, cfg, stats)).first;
    return it->second;
  };

  CausalGraph graph;
  graph.tau_max = cfg.tau_max;
  graph.alpha = cfg.alpha;
  for (auto target : cfg.targets) {
    const auto& parents = selection(target);
    for (const auto& c : parents) {
      if (!is_context(c.parent.var)) selection(c.parent.var);
    }

    const LaggedVar y{target, 0};
    std::vector<CiResult> results(parents.size());
    parallel_for(parents.size(), cfg.jobs, [&](std::size_t i) {
      const LaggedVar& x = parents[i].parent;
      std::vector<LaggedVar> z = observed_strongest(parents, limit, &x);
      append_contexts(parents, z);
      if (!is_context(x.var)) {
        const auto& own = selected.at(x.var);
        for (LaggedVar w : observed_strongest(own, limit)) {
          w.lag += x.lag;
          if (w.lag <= cfg.tau_max) z.push_back(w);
        }
        append_contexts(own, z);
      }
      std::sort(z.begin(), z.end());
      z.erase(std::unique(z.begin(), z.end()), z.end());
      std::erase_if(z, [&](const LaggedVar& v) { return v == x || v == y; });
      results[i] = tester.test(x, y, z);
    });
    if (stats) stats->mci_tests += parents.size();

    auto& links = graph.targets[target];
    for (std::size_t i = 0; i < parents.size(); ++i) {
      if (results[i].p_value <= cfg.alpha) {
        links.push_back({parents[i].parent.var, parents[i].parent.lag, results[i].p_value, results[i].strength});
      }
    }
  }
  graph.sort_links();
  return graph;
}

}  // namespace lakecausal::causal
