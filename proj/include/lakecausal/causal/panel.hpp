#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "lakecausal/causal/config.hpp"
#include "lakecausal/core/dataset.hpp"

namespace lakecausal::causal {

// Lakes stacked day-by-day with context columns. Lakes are kept in sorted
// unit-key order, so the panel does not depend on dataset ordering. The
// one-hot blocks are implicit (group indices) and materialized on request.
//
// A lagged sample is a (lake, day t) pair with t in [tau_max + 1, 365]; every
// lagged value it references comes from the same lake.
class PooledPanel {
 public:
  int tau_max() const noexcept { return tau_max_; }
  const ContextFlags& context() const noexcept { return context_; }

  std::size_t num_lakes() const noexcept { return lake_keys_.size(); }
  std::size_t num_rows() const noexcept { return static_cast<std::size_t>(observed_.rows()); }
  // 9 observed + one column per lake (s) + per present region (r) + 2 (t).
  std::size_t num_columns() const noexcept;
  std::size_t samples_per_lake() const noexcept { return static_cast<std::size_t>(kDaysPerYear - tau_max_); }
  std::size_t num_samples() const noexcept { return num_lakes() * samples_per_lake(); }

  // Row range [begin, end) of lake i in the stacked matrix.
  std::pair<std::size_t, std::size_t> lake_rows(std::size_t lake) const noexcept {
    return {lake * kDaysPerYear, (lake + 1) * kDaysPerYear};
  }
  const std::string& lake_key(std::size_t lake) const { return lake_keys_[lake]; }
  std::size_t region_slot(std::size_t lake) const { return region_slot_[lake]; }
  const std::vector<Region>& regions() const noexcept { return regions_; }

  const Eigen::MatrixXd& observed() const noexcept { return observed_; }

  // rows x k block of an enabled context variable (one-hot or sin/cos).
  Eigen::MatrixXd context_block(VariableId v) const;

  // Value of `v` at lag `lag` for every lagged sample, lake-major.
  Eigen::VectorXd lagged(VariableId v, int lag) const;
  std::size_t lake_of_sample(std::size_t sample) const noexcept { return sample / samples_per_lake(); }
  int day_of_sample(std::size_t sample) const noexcept {
    return static_cast<int>(sample % samples_per_lake()) + tau_max_ + 1;
  }

 private:
  friend PooledPanel pool_lakes(const Dataset& ds, const DiscoveryConfig& cfg);

  int tau_max_ = 0;
  ContextFlags context_;
  Eigen::MatrixXd observed_;
  std::vector<std::string> lake_keys_;
  std::vector<std::size_t> region_slot_;
  std::vector<Region> regions_;
};

// Stacks the dataset's lakes. Throws DomainError on an empty dataset or a
// lake with missing cells.
PooledPanel pool_lakes(const Dataset& ds, const DiscoveryConfig& cfg);

// Day-of-year phase encoding of the t dummy.
std::pair<double, double> day_phase(int day) noexcept;

}  // namespace lakecausal::causal
