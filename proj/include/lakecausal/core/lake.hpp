#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "lakecausal/core/variables.hpp"

namespace lakecausal {

inline constexpr int kDaysPerYear = 365;

enum class Region : std::uint8_t { CW = 0, NE, NO, NW, SE, SW };
inline constexpr std::size_t kNumRegions = 6;
inline constexpr std::array<Region, kNumRegions> kRegions = {Region::CW, Region::NE, Region::NO,
                                                             Region::NW, Region::SE, Region::SW};

// Canonical class order doubles as the argmax tie-break order.
enum class Label : std::uint8_t { Refreeze = 0, Buried, SlowDrainage, RapidDrainage };
inline constexpr std::size_t kNumClasses = 4;
inline constexpr std::array<Label, kNumClasses> kLabels = {Label::Refreeze, Label::Buried,
                                                           Label::SlowDrainage, Label::RapidDrainage};

std::string_view to_string(Region r) noexcept;
std::string_view to_string(Label l) noexcept;
std::optional<Region> parse_region(std::string_view s) noexcept;
std::optional<Label> parse_label(std::string_view s) noexcept;

constexpr std::size_t index_of(Region r) noexcept { return static_cast<std::size_t>(r); }
constexpr std::size_t index_of(Label l) noexcept { return static_cast<std::size_t>(l); }

// Rows are days 1..365 (row 0 is day 1); columns follow kObservedVariables.
// NaN marks a missing cell; a preprocessed record has none.
using SeriesMatrix = Eigen::Matrix<double, kDaysPerYear, static_cast<int>(kNumObserved)>;

struct LakeRecord {
  std::string lake_id;
  Region region = Region::CW;
  int year = 0;
  Label label = Label::Refreeze;
  double area_m2 = 0.0;
  double elevation_m = 0.0;
  SeriesMatrix series = SeriesMatrix::Zero();

  // (lake_id, year) identifies one observational unit.
  std::string unit_key() const { return lake_id + "#" + std::to_string(year); }
  bool is_dense() const noexcept { return !series.hasNaN(); }

  Eigen::Ref<const Eigen::Matrix<double, kDaysPerYear, 1>> column(VariableId v) const {
    return series.col(static_cast<Eigen::Index>(index_of(v)));
  }
};

bool operator==(const LakeRecord& a, const LakeRecord& b);

}  // namespace lakecausal
