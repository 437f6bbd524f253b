#include "lakecausal/core/lake.hpp"

#include <cmath>
#include <cstring>

namespace lakecausal {
namespace {

constexpr std::array<std::string_view, kNumRegions> kRegionNames = {"CW", "NE", "NO",
                                                                    "NW", "SE", "SW"};
constexpr std::array<std::string_view, kNumClasses> kLabelNames = {"refreeze", "buried",
                                                                   "slow_drainage", "rapid_drainage"};

// NaN-aware bitwise comparison so missing cells compare equal.
bool same_cells(const SeriesMatrix& a, const SeriesMatrix& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double x = a.data()[i];
    const double y = b.data()[i];
    if (std::isnan(x) && std::isnan(y)) continue;
    if (std::memcmp(&x, &y, sizeof(double)) != 0) return false;
  }
  return true;
}

}  // namespace

std::string_view to_string(Region r) noexcept { return kRegionNames[index_of(r)]; }
std::string_view to_string(Label l) noexcept { return kLabelNames[index_of(l)]; }

std::optional<Region> parse_region(std::string_view s) noexcept {
  for (std::size_t i = 0; i < kRegionNames.size(); ++i) {
    if (kRegionNames[i] == s) return static_cast<Region>(i);
  }
  return std::nullopt;
}

std::optional<Label> parse_label(std::string_view s) noexcept {
  for (std::size_t i = 0; i < kLabelNames.size(); ++i) {
    if (kLabelNames[i] == s) return static_cast<Label>(i);
  }
  return std::nullopt;
}

bool operator==(const LakeRecord& a, const LakeRecord& b) {
  return a.lake_id == b.lake_id && a.region == b.region && a.year == b.year &&
         a.label == b.label && a.area_m2 == b.area_m2 && a.elevation_m == b.elevation_m &&
         same_cells(a.series, b.series);
}

}  // namespace lakecausal
