#include "lakecausal/features/transform.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "lakecausal/core/error.hpp"
#include "lakecausal/core/io.hpp"
#include "lakecausal/core/parallel.hpp"

namespace lakecausal::features {
namespace {

std::array<std::array<int, 3>, kNumKernels> make_positions() {
  std::array<std::array<int, 3>, kNumKernels> out{};
  std::size_t k = 0;
  for (int a = 0; a < kKernelLength; ++a) {
    for (int b = a + 1; b < kKernelLength; ++b) {
      for (int c = b + 1; c < kKernelLength; ++c) out[k++] = {a, b, c};
    }
  }
  return out;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

const std::array<std::array<int, 3>, kNumKernels>& kernel_positions() {
  static const auto positions = make_positions();
  return positions;
}

std::array<double, kKernelLength> kernel_weights(int kernel) {
  std::array<double, kKernelLength> w;
  w.fill(-1.0);
  for (int p : kernel_positions().at(static_cast<std::size_t>(kernel))) w[static_cast<std::size_t>(p)] = 2.0;
  return w;
}

void TransformConfig::validate() const {
  if (features_budget < 1) throw ConfigError("features_budget must be positive");
  if (max_dilations_per_kernel < 1) throw ConfigError("max_dilations_per_kernel must be positive");
  if (jobs < 1) throw ConfigError("jobs must be at least 1");
}

std::size_t TransformParams::features_per_kernel() const noexcept {
  std::size_t n = 0;
  for (int b : biases_per_dilation) n += static_cast<std::size_t>(b);
  return n;
}

std::size_t TransformParams::bias_offset(std::size_t channel, int kernel, std::size_t dilation) const noexcept {
  std::size_t offset = channel * features_per_channel() + static_cast<std::size_t>(kernel) * features_per_kernel();
  for (std::size_t d = 0; d < dilation; ++d) offset += static_cast<std::size_t>(biases_per_dilation[d]);
  return offset;
}

void TransformParams::validate() const {
  if (length < kKernelLength) throw DomainError("transform length shorter than a kernel");
  if (dilations.empty() || dilations.size() != biases_per_dilation.size()) {
    throw DomainError("transform dilations and bias counts disagree");
  }
  for (std::size_t d = 0; d < dilations.size(); ++d) {
    if (dilations[d] < 1 || biases_per_dilation[d] < 1) throw DomainError("dilations and bias counts must be positive");
    if (d > 0 && dilations[d] <= dilations[d - 1]) throw DomainError("dilations must be strictly increasing");
  }
  if (biases.size() != num_features()) throw DomainError("bias count does not match the feature layout");
  for (std::size_t c = 0; c < num_channels; ++c) {
    for (int k = 0; k < kNumKernels; ++k) {
      for (std::size_t d = 0; d < dilations.size(); ++d) {
        const auto first = biases.begin() + static_cast<std::ptrdiff_t>(bias_offset(c, k, d));
        const auto last = first + biases_per_dilation[d];
        if (!std::all_of(first, last, [](double b) { return std::isfinite(b); })) {
          throw DomainError("non-finite bias");
        }
        if (!std::is_sorted(first, last)) throw DomainError("biases of a (kernel, dilation) must be sorted");
      }
    }
  }
}

void plan_dilations(int length, int features_per_kernel, int max_dilations, std::vector<int>& dilations,
                    std::vector<int>& biases_per_dilation) {
  const int count = std::min(features_per_kernel, max_dilations);
  const double multiplier = static_cast<double>(features_per_kernel) / count;
  const double max_exponent = std::log2(static_cast<double>(length - 1) / (kKernelLength - 1));

  std::vector<int> ladder;
  for (int j = 0; j < count; ++j) {
    const double exponent = count > 1 ? j * max_exponent / (count - 1) : 0.0;
    ladder.push_back(static_cast<int>(std::floor(std::pow(2.0, exponent))));
  }
  dilations.clear();
  std::vector<int> counts;
  for (int d : ladder) {
    if (!dilations.empty() && dilations.back() == d) {
      ++counts.back();
    } else {
      dilations.push_back(d);
      counts.push_back(1);
    }
  }
  biases_per_dilation.clear();
  int assigned = 0;
  for (int c : counts) {
    biases_per_dilation.push_back(static_cast<int>(c * multiplier));
    assigned += biases_per_dilation.back();
  }
  for (std::size_t i = 0; assigned < features_per_kernel; i = (i + 1) % biases_per_dilation.size()) {
    ++biases_per_dilation[i];
    ++assigned;
  }
}

std::vector<double> pad_edges(std::span<const double> series, int dilation) {
  const std::size_t pad = static_cast<std::size_t>(4 * dilation);
  std::vector<double> out(series.size() + 2 * pad);
  std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(pad), series.front());
  std::copy(series.begin(), series.end(), out.begin() + static_cast<std::ptrdiff_t>(pad));
  std::fill(out.end() - static_cast<std::ptrdiff_t>(pad), out.end(), series.back());
  return out;
}

std::vector<double> convolve(std::span<const double> series, int kernel, int dilation,
                             const simd::KernelTable& kernels) {
  const auto padded = pad_edges(series, dilation);
  const auto w = kernel_weights(kernel);
  std::vector<double> out(series.size());
  kernels.conv9(padded.data(), series.size(), static_cast<std::size_t>(dilation), w.data(), out.data());
  return out;
}

TransformParams fit_transform_params(std::span<const ChannelMatrix> training, const TransformConfig& cfg) {
  cfg.validate();
  if (training.empty()) throw DomainError("fit_transform_params: empty training set");
  const std::size_t channels = training.front().num_channels();
  if (channels == 0) throw DomainError("fit_transform_params: no channels");
  for (const auto& cm : training) {
    if (cm.num_channels() != channels || cm.spec != training.front().spec) {
      throw DomainError("fit_transform_params: training inputs disagree on channels");
    }
  }

  TransformParams params;
  params.length = kDaysPerYear;
  params.num_channels = channels;
  const int per_channel = cfg.features_budget / static_cast<int>(channels);
  const int per_kernel = std::max(1, per_channel / kNumKernels);
  plan_dilations(params.length, per_kernel, cfg.max_dilations_per_kernel, params.dilations,
                 params.biases_per_dilation);
  params.biases.assign(params.num_features(), 0.0);

  // Draw every example choice up front so the result is independent of jobs.
  const std::size_t per_channel_blocks = static_cast<std::size_t>(kNumKernels) * params.dilations.size();
  std::vector<std::size_t> example(channels * per_channel_blocks);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> pick(0, training.size() - 1);
  for (auto& e : example) e = pick(rng);

  const auto& kernels = simd::active_kernels();
  parallel_for(channels * params.dilations.size(), cfg.jobs, [&](std::size_t job) {
    const std::size_t c = job / params.dilations.size();
    const std::size_t d = job % params.dilations.size();
    const int dilation = params.dilations[d];
    const auto nb = static_cast<std::size_t>(params.biases_per_dilation[d]);
    std::vector<double> out(static_cast<std::size_t>(params.length));
    for (int k = 0; k < kNumKernels; ++k) {
      const std::size_t e = example[c * per_channel_blocks + static_cast<std::size_t>(k) * params.dilations.size() + d];
      const auto& row = training[e].channels.row(static_cast<Eigen::Index>(c));
      const auto padded =
          pad_edges(std::span<const double>(row.data(), static_cast<std::size_t>(row.size())), dilation);
      const auto w = kernel_weights(k);
      kernels.conv9(padded.data(), out.size(), static_cast<std::size_t>(dilation), w.data(), out.data());
      std::vector<double> sorted = out;
      std::sort(sorted.begin(), sorted.end());
      const std::size_t offset = params.bias_offset(c, k, d);
      for (std::size_t i = 0; i < nb; ++i) {
        params.biases[offset + i] = quantile_sorted(sorted, static_cast<double>(i + 1) / static_cast<double>(nb + 1));
      }
    }
  });
  return params;
}

Eigen::VectorXd transform(const ChannelMatrix& cm, const TransformParams& params, const simd::KernelTable& kernels) {
  if (cm.num_channels() != params.num_channels || cm.channels.cols() != params.length) {
    throw DomainError("transform: input does not match the fitted channel layout");
  }
  Eigen::VectorXd features(static_cast<Eigen::Index>(params.num_features()));
  const auto n = static_cast<std::size_t>(params.length);
  std::vector<double> out(n);
  for (std::size_t c = 0; c < params.num_channels; ++c) {
    const auto& row = cm.channels.row(static_cast<Eigen::Index>(c));
    const std::span<const double> series(row.data(), n);
    for (std::size_t d = 0; d < params.dilations.size(); ++d) {
      const int dilation = params.dilations[d];
      const auto padded = pad_edges(series, dilation);
      const auto nb = static_cast<std::size_t>(params.biases_per_dilation[d]);
      for (int k = 0; k < kNumKernels; ++k) {
        const auto w = kernel_weights(k);
        kernels.conv9(padded.data(), n, static_cast<std::size_t>(dilation), w.data(), out.data());
        const std::size_t offset = params.bias_offset(c, k, d);
        for (std::size_t b = 0; b < nb; ++b) {
          const std::size_t hits = kernels.count_greater(out.data(), n, params.biases[offset + b]);
          features(static_cast<Eigen::Index>(offset + b)) = static_cast<double>(hits) / static_cast<double>(n);
        }
      }
    }
  }
  return features;
}

Eigen::MatrixXd transform_all(std::span<const ChannelMatrix> inputs, const TransformParams& params, int jobs,
                              const simd::KernelTable& kernels) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(inputs.size()), static_cast<Eigen::Index>(params.num_features()));
  parallel_for(inputs.size(), jobs, [&](std::size_t i) {
    out.row(static_cast<Eigen::Index>(i)) = transform(inputs[i], params, kernels).transpose();
  });
  return out;
}

nlohmann::ordered_json params_to_json(const TransformParams& params) {
  return {{"length", params.length},
          {"num_channels", params.num_channels},
          {"num_kernels", kNumKernels},
          {"dilations", params.dilations},
          {"biases_per_dilation", params.biases_per_dilation},
          {"biases", params.biases}};
}

TransformParams params_from_json(const nlohmann::json& doc) {
  TransformParams p;
  try {
    if (doc.at("num_kernels").get<int>() != kNumKernels) throw DomainError("unexpected kernel count");
    p.length = doc.at("length").get<int>();
    p.num_channels = doc.at("num_channels").get<std::size_t>();
    p.dilations = doc.at("dilations").get<std::vector<int>>();
    p.biases_per_dilation = doc.at("biases_per_dilation").get<std::vector<int>>();
    p.biases = doc.at("biases").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("transform params", 0, "", e.what());
  }
  p.validate();
  return p;
}

void write_feature_csv(const std::filesystem::path& path, std::span<const std::string> lake_ids,
                       const Eigen::MatrixXd& features) {
  if (static_cast<Eigen::Index>(lake_ids.size()) != features.rows()) {
    throw DomainError("write_feature_csv: one lake id per row required");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << "lake_id";
  for (Eigen::Index j = 0; j < features.cols(); ++j) out << ",f" << j;
  out << '\n';
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    out << lake_ids[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < features.cols(); ++j) out << ',' << format_double(features(i, j));
    out << '\n';
  }
  if (!out) throw IoError(path.string(), "write failed");
}

}  // namespace lakecausal::features
