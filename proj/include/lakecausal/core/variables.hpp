#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace lakecausal {

// Nine observed signals followed by the three context dummies. The numeric
// order is the canonical column order used everywhere.
enum class VariableId : std::uint8_t {
  HvAnom = 0,
  S2Water,
  LsWater,
  S2Zenith,
  LsZenith,
  T2m,
  R2,
  Sp,
  Sst,
  SDummy,
  RDummy,
  TDummy,
};

enum class VariableKind : std::uint8_t { Observed, Context };

inline constexpr std::size_t kNumObserved = 9;
inline constexpr std::size_t kNumContext = 3;
inline constexpr std::size_t kNumVariables = kNumObserved + kNumContext;

inline constexpr std::array<VariableId, kNumObserved> kObservedVariables = {
    VariableId::HvAnom, VariableId::S2Water, VariableId::LsWater,
    VariableId::S2Zenith, VariableId::LsZenith, VariableId::T2m,
    VariableId::R2, VariableId::Sp, VariableId::Sst};

inline constexpr std::array<VariableId, kNumContext> kContextVariables = {
    VariableId::SDummy, VariableId::RDummy, VariableId::TDummy};

constexpr std::size_t index_of(VariableId v) noexcept { return static_cast<std::size_t>(v); }

constexpr VariableKind kind_of(VariableId v) noexcept {
  return index_of(v) < kNumObserved ? VariableKind::Observed : VariableKind::Context;
}

constexpr bool is_context(VariableId v) noexcept { return kind_of(v) == VariableKind::Context; }

std::string_view to_string(VariableId v) noexcept;
std::optional<VariableId> parse_variable(std::string_view name) noexcept;

}  // namespace lakecausal
