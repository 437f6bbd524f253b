#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "lakecausal/core/lake.hpp"

namespace lakecausal {

// Ordered, immutable-after-construction collection of lakes with unique unit keys.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<LakeRecord> lakes, std::string provenance = {});

  const std::vector<LakeRecord>& lakes() const noexcept { return lakes_; }
  const std::string& provenance() const noexcept { return provenance_; }
  std::size_t size() const noexcept { return lakes_.size(); }
  bool empty() const noexcept { return lakes_.empty(); }
  const LakeRecord& operator[](std::size_t i) const { return lakes_[i]; }

  Dataset filter(const std::function<bool(const LakeRecord&)>& keep) const;
  Dataset subset(const std::vector<std::size_t>& indices) const;
  Dataset in_region(Region r) const;
  bool has_region(Region r) const;

  std::array<std::size_t, kNumClasses> class_counts() const;
  bool all_dense() const;

  friend bool operator==(const Dataset& a, const Dataset& b) { return a.lakes_ == b.lakes_; }

 private:
  std::vector<LakeRecord> lakes_;
  std::string provenance_;
};

// Throws LeakageError when any (lake_id, year) unit appears in both datasets.
void ensure_disjoint(const Dataset& train, const Dataset& test);

}  // namespace lakecausal
