#include "lakecausal/simd/kernels.hpp"

namespace lakecausal::simd::detail {

void conv9_scalar(const double* padded, std::size_t n, std::size_t dilation,
                  const double* weights, double* out) {
  for (std::size_t t = 0; t < n; ++t) {
    double acc = weights[0] * padded[t];
    for (std::size_t j = 1; j < 9; ++j) {
      acc = acc + weights[j] * padded[t + j * dilation];
    }
    out[t] = acc;
  }
}

std::size_t count_greater_scalar(const double* values, std::size_t n, double threshold) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) count += values[i] > threshold ? 1 : 0;
  return count;
}

}  // namespace lakecausal::simd::detail
