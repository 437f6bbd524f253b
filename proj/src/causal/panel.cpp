#include "lakecausal/causal/panel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "lakecausal/core/error.hpp"

namespace lakecausal::causal {

void DiscoveryConfig::validate() const {
  if (tau_max < 1) throw ConfigError("tau_max must be at least 1");
  if (tau_max >= kDaysPerYear - 4) throw ConfigError("tau_max leaves too few days per lake");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (targets.empty()) throw ConfigError("at least one discovery target is required");
  for (auto t : targets) {
    if (is_context(t)) throw ConfigError("context variable " + std::string(to_string(t)) + " cannot be a target");
  }
  if (max_conds < 0) throw ConfigError("max_conds must be nonnegative");
  if (jobs < 1) throw ConfigError("jobs must be at least 1");
}

std::pair<double, double> day_phase(int day) noexcept {
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(day) / kDaysPerYear;
  return {std::sin(angle), std::cos(angle)};
}

std::size_t PooledPanel::num_columns() const noexcept {
  std::size_t n = kNumObserved;
  if (context_.s_dummy) n += num_lakes();
  if (context_.r_dummy) n += regions_.size();
  if (context_.t_dummy) n += 2;
  return n;
}

Eigen::MatrixXd PooledPanel::context_block(VariableId v) const {
  if (!is_context(v) || !context_.enabled(v)) {
    throw DomainError("context variable " + std::string(to_string(v)) + " is not in this panel");
  }
  const auto rows = static_cast<Eigen::Index>(num_rows());
  Eigen::MatrixXd block;
  if (v == VariableId::TDummy) {
    block.resize(rows, 2);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const auto [s, c] = day_phase(static_cast<int>(r % kDaysPerYear) + 1);
      block(r, 0) = s;
      block(r, 1) = c;
    }
    return block;
  }
  const bool by_lake = v == VariableId::SDummy;
  block.setZero(rows, static_cast<Eigen::Index>(by_lake ? num_lakes() : regions_.size()));
  for (std::size_t lake = 0; lake < num_lakes(); ++lake) {
    const auto col = static_cast<Eigen::Index>(by_lake ? lake : region_slot_[lake]);
    const auto [begin, end] = lake_rows(lake);
    block.block(static_cast<Eigen::Index>(begin), col, static_cast<Eigen::Index>(end - begin), 1).setOnes();
  }
  return block;
}

Eigen::VectorXd PooledPanel::lagged(VariableId v, int lag) const {
  if (lag < 0 || lag > tau_max_) throw DomainError("lag outside 0..tau_max");
  const std::size_t per_lake = samples_per_lake();
  Eigen::VectorXd out(static_cast<Eigen::Index>(num_samples()));
  for (std::size_t lake = 0; lake < num_lakes(); ++lake) {
    for (std::size_t s = 0; s < per_lake; ++s) {
      const int day = static_cast<int>(s) + tau_max_ + 1;
      const auto row = static_cast<Eigen::Index>(lake * kDaysPerYear + static_cast<std::size_t>(day - 1));
      const auto at = static_cast<Eigen::Index>(lake * per_lake + s);
      switch (v) {
        case VariableId::SDummy:
          out(at) = static_cast<double>(lake);
          break;
        case VariableId::RDummy:
          out(at) = static_cast<double>(region_slot_[lake]);
          break;
        case VariableId::TDummy:
          out(at) = day_phase(day - lag).first;
          break;
        default:
          out(at) = observed_(row - lag, static_cast<Eigen::Index>(index_of(v)));
      }
    }
  }
  return out;
}

PooledPanel pool_lakes(const Dataset& ds, const DiscoveryConfig& cfg) {
  cfg.validate();
  if (ds.empty()) throw DomainError("pool_lakes: empty dataset");

  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return ds[a].unit_key() < ds[b].unit_key(); });

  PooledPanel panel;
  panel.tau_max_ = cfg.tau_max;
  panel.context_ = cfg.use_context;
  panel.observed_.resize(static_cast<Eigen::Index>(ds.size() * kDaysPerYear), kNumObserved);

  std::array<bool, kNumRegions> present{};
  for (const auto& lake : ds.lakes()) present[index_of(lake.region)] = true;
  std::array<std::size_t, kNumRegions> slot{};
  for (auto r : kRegions) {
    if (present[index_of(r)]) {
      slot[index_of(r)] = panel.regions_.size();
      panel.regions_.push_back(r);
    }
  }

  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& lake = ds[order[i]];
    if (!lake.is_dense()) throw DomainError("pool_lakes: lake " + lake.lake_id + " has missing cells");
    panel.observed_.block(static_cast<Eigen::Index>(i * kDaysPerYear), 0, kDaysPerYear, kNumObserved) =
        lake.series;
    panel.lake_keys_.push_back(lake.unit_key());
    panel.region_slot_.push_back(slot[index_of(lake.region)]);
  }
  return panel;
}

}  // namespace lakecausal::causal
