#include "lakecausal/core/dataset.hpp"

#include <unordered_set>

#include "lakecausal/core/error.hpp"

namespace lakecausal {

Dataset::Dataset(std::vector<LakeRecord> lakes, std::string provenance)
    : lakes_(std::move(lakes)), provenance_(std::move(provenance)) {
  std::unordered_set<std::string> seen;
  for (const auto& lake : lakes_) {
    if (!seen.insert(lake.unit_key()).second) {
      throw DomainError("duplicate lake unit " + lake.lake_id + " (" + std::to_string(lake.year) + ")");
    }
  }
}

Dataset Dataset::filter(const std::function<bool(const LakeRecord&)>& keep) const {
  std::vector<LakeRecord> out;
  for (const auto& lake : lakes_) {
    if (keep(lake)) out.push_back(lake);
  }
  return Dataset(std::move(out), provenance_);
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  std::vector<LakeRecord> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(lakes_.at(i));
  return Dataset(std::move(out), provenance_);
}

Dataset Dataset::in_region(Region r) const {
  return filter([r](const LakeRecord& l) { return l.region == r; });
}

bool Dataset::has_region(Region r) const {
  for (const auto& lake : lakes_) {
    if (lake.region == r) return true;
  }
  return false;
}

std::array<std::size_t, kNumClasses> Dataset::class_counts() const {
  std::array<std::size_t, kNumClasses> counts{};
  for (const auto& lake : lakes_) ++counts[index_of(lake.label)];
  return counts;
}

bool Dataset::all_dense() const {
  for (const auto& lake : lakes_) {
    if (!lake.is_dense()) return false;
  }
  return true;
}

void ensure_disjoint(const Dataset& train, const Dataset& test) {
  std::unordered_set<std::string> keys;
  for (const auto& lake : train.lakes()) keys.insert(lake.unit_key());
  for (const auto& lake : test.lakes()) {
    if (keys.contains(lake.unit_key())) {
      throw LeakageError("unit " + lake.lake_id + " (" + std::to_string(lake.year) +
                         ") is in both train and test");
    }
  }
}

}  // namespace lakecausal
