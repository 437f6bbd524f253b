#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "lakecausal/features/channels.hpp"
#include "lakecausal/simd/kernels.hpp"

namespace lakecausal::features {

inline constexpr int kKernelLength = 9;
inline constexpr int kNumKernels = 84;

// Positions of the three +2 weights of each kernel, lexicographic.
const std::array<std::array<int, 3>, kNumKernels>& kernel_positions();
// Six -1 taps and three +2 taps: every kernel sums to zero.
std::array<double, kKernelLength> kernel_weights(int kernel);

struct TransformConfig {
  // Total features over all channels (the per-channel share is rounded down
  // to a multiple of the kernel count, minimum one feature per kernel).
  int features_budget = 9996;
  int max_dilations_per_kernel = 32;
  std::uint64_t seed = 0;
  int jobs = 1;

  void validate() const;
};

// Fitted dilations and biases. Features are laid out channel-major, then
// kernel, dilation, bias.
struct TransformParams {
  int length = 365;
  std::size_t num_channels = 0;
  std::vector<int> dilations;
  // Biases per (kernel, dilation); identical for every kernel and channel.
  std::vector<int> biases_per_dilation;
  std::vector<double> biases;

  std::size_t features_per_kernel() const noexcept;
  std::size_t features_per_channel() const noexcept { return features_per_kernel() * kNumKernels; }
  std::size_t num_features() const noexcept { return features_per_channel() * num_channels; }
  // Offset of the first bias of (channel, kernel, dilation index).
  std::size_t bias_offset(std::size_t channel, int kernel, std::size_t dilation) const noexcept;

  // Throws DomainError on inconsistent sizes, non-finite or unsorted biases.
  void validate() const;

  friend bool operator==(const TransformParams&, const TransformParams&) = default;
};

// Dilations (unique floors of a log2-spaced ladder up to (L-1)/8) and the
// per-dilation bias counts for a given per-kernel feature count.
void plan_dilations(int length, int features_per_kernel, int max_dilations,
                    std::vector<int>& dilations, std::vector<int>& biases_per_dilation);

// Replicates the edge values 4*dilation times on each side, so the output
// keeps the input length and constant offsets cancel exactly.
std::vector<double> pad_edges(std::span<const double> series, int dilation);

// Convolution of one series with one kernel at one dilation ("same" length).
std::vector<double> convolve(std::span<const double> series, int kernel, int dilation,
                             const simd::KernelTable& kernels = simd::active_kernels());

// Biases are quantiles at (i + 1) / (B + 1) of the convolution output of a
// seeded choice of training example, one draw per (channel, kernel, dilation).
TransformParams fit_transform_params(std::span<const ChannelMatrix> training, const TransformConfig& cfg);

// Proportion of positive values per (channel, kernel, dilation, bias).
Eigen::VectorXd transform(const ChannelMatrix& cm, const TransformParams& params,
                          const simd::KernelTable& kernels = simd::active_kernels());

// One row per input, computed over `jobs` workers.
Eigen::MatrixXd transform_all(std::span<const ChannelMatrix> inputs, const TransformParams& params, int jobs = 1,
                              const simd::KernelTable& kernels = simd::active_kernels());

nlohmann::ordered_json params_to_json(const TransformParams& params);
TransformParams params_from_json(const nlohmann::json& doc);

// Writes `lake_id,f0,f1,...` with one row per lake.
void write_feature_csv(const std::filesystem::path& path, std::span<const std::string> lake_ids,
                       const Eigen::MatrixXd& features);

}  // namespace lakecausal::features
