#include "lakecausal/core/variables.hpp"

#include <array>

namespace lakecausal {
namespace {

constexpr std::array<std::string_view, kNumVariables> kNames = {
    "hv_anom", "s2_water", "ls_water", "s2_zenith", "ls_zenith", "t2m",
    "r2",      "sp",       "sst",      "s_dummy",   "r_dummy",   "t_dummy"};

}  // namespace

std::string_view to_string(VariableId v) noexcept { return kNames[index_of(v)]; }

std::optional<VariableId> parse_variable(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<VariableId>(i);
  }
  return std::nullopt;
}

}  // namespace lakecausal
