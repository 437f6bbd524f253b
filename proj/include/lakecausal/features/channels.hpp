#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "lakecausal/causal/graph.hpp"
#include "lakecausal/core/lake.hpp"

namespace lakecausal::features {

// One input channel: `var` observed `lag` days earlier.
struct ChannelSpec {
  VariableId var = VariableId::HvAnom;
  int lag = 0;

  friend auto operator<=>(const ChannelSpec&, const ChannelSpec&) = default;
};

using ChannelRows = Eigen::Matrix<double, Eigen::Dynamic, kDaysPerYear, Eigen::RowMajor>;

struct ChannelMatrix {
  ChannelRows channels;  // C x 365, row order follows spec
  std::vector<ChannelSpec> spec;

  std::size_t num_channels() const noexcept { return spec.size(); }
};

// Channels for the retained parents of `target`, in (variable, lag) order.
// Context parents are dropped unless include_dummies is set; even then the
// lake-identity dummy is never a channel.
std::vector<ChannelSpec> causal_channel_specs(const causal::CausalGraph& graph, VariableId target,
                                              bool include_dummies);

// The nine observed variables, unshifted.
std::vector<ChannelSpec> baseline_channel_specs();

// channel[t] = source[t - lag]; the first `lag` days repeat source[day 1].
// An r_dummy channel is the constant region index, a t_dummy channel the
// sine of the day-of-year phase. Throws DomainError for s_dummy.
ChannelMatrix build_channels(const LakeRecord& lake, std::span<const ChannelSpec> spec);

ChannelMatrix build_channels(const LakeRecord& lake, const causal::CausalGraph& graph, VariableId target,
                             bool include_dummies);

}  // namespace lakecausal::features
