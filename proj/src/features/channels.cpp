#include "lakecausal/features/channels.hpp"

#include <algorithm>

#include "lakecausal/causal/panel.hpp"
#include "lakecausal/core/error.hpp"

namespace lakecausal::features {

std::vector<ChannelSpec> causal_channel_specs(const causal::CausalGraph& graph, VariableId target,
                                              bool include_dummies) {
  std::vector<ChannelSpec> out;
  for (const auto& link : graph.parents(target)) {
    if (is_context(link.var)) {
      if (!include_dummies || link.var == VariableId::SDummy) continue;
    }
    out.push_back({link.var, link.lag});
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<ChannelSpec> baseline_channel_specs() {
  std::vector<ChannelSpec> out;
  for (auto v : kObservedVariables) out.push_back({v, 0});
  return out;
}

ChannelMatrix build_channels(const LakeRecord& lake, std::span<const ChannelSpec> spec) {
  ChannelMatrix cm;
  cm.spec.assign(spec.begin(), spec.end());
  cm.channels.resize(static_cast<Eigen::Index>(spec.size()), kDaysPerYear);
  for (std::size_t c = 0; c < spec.size(); ++c) {
    const auto row = static_cast<Eigen::Index>(c);
    const auto [var, lag] = spec[c];
    if (lag < 0 || lag >= kDaysPerYear) throw DomainError("channel lag outside 0..364");
    switch (var) {
      case VariableId::SDummy:
        throw DomainError("the lake-identity dummy cannot be a channel");
      case VariableId::RDummy:
        cm.channels.row(row).setConstant(static_cast<double>(index_of(lake.region)));
        break;
      case VariableId::TDummy:
        for (int d = 0; d < kDaysPerYear; ++d) {
          cm.channels(row, d) = causal::day_phase(std::max(1, d + 1 - lag)).first;
        }
        break;
      default: {
        const auto src = lake.column(var);
        for (int d = 0; d < kDaysPerYear; ++d) cm.channels(row, d) = src(std::max(0, d - lag));
      }
    }
  }
  if (!cm.channels.allFinite()) throw DomainError("lake " + lake.lake_id + " has missing or non-finite cells");
  return cm;
}

ChannelMatrix build_channels(const LakeRecord& lake, const causal::CausalGraph& graph, VariableId target,
                             bool include_dummies) {
  return build_channels(lake, causal_channel_specs(graph, target, include_dummies));
}

}  // namespace lakecausal::features
