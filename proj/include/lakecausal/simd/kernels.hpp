#pragma once

// Data-parallel inner loops of the convolutional transform. Every kernel has a
// scalar reference and, where the CPU allows, a vector variant chosen at
// runtime. All variants produce bit-identical results: the vector paths use
// separate multiply and add (no FMA) in the same tap order as the scalar code.

#include <cstddef>
#include <string_view>
#include <vector>

namespace lakecausal::simd {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa) noexcept;

struct KernelTable {
  Isa isa;

  // out[t] = sum_{j=0..8} weights[j] * padded[t + j*dilation], t in [0, n),
  // accumulated in tap order. `padded` holds n + 8*dilation values.
  void (*conv9)(const double* padded, std::size_t n, std::size_t dilation,
                const double* weights, double* out);

  // Number of i in [0, n) with values[i] > threshold.
  std::size_t (*count_greater)(const double* values, std::size_t n, double threshold);
};

bool isa_supported(Isa isa) noexcept;

// Widest ISA the running CPU supports and this build contains.
Isa best_isa() noexcept;

// best_isa(), unless LAKECAUSAL_SIMD=scalar|avx2 asks for something else
// (an unsupported request falls back to scalar).
Isa active_isa() noexcept;

const KernelTable& kernels(Isa isa);
const KernelTable& active_kernels();

// Every ISA usable on this machine, scalar first.
std::vector<Isa> supported_isas();

namespace detail {
void conv9_scalar(const double* padded, std::size_t n, std::size_t dilation,
                  const double* weights, double* out);
std::size_t count_greater_scalar(const double* values, std::size_t n, double threshold);
#if defined(LAKECAUSAL_HAVE_AVX2)
void conv9_avx2(const double* padded, std::size_t n, std::size_t dilation,
                const double* weights, double* out);
std::size_t count_greater_avx2(const double* values, std::size_t n, double threshold);
#endif
}  // namespace detail

}  // namespace lakecausal::simd
