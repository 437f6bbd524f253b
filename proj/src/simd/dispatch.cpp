#include <cstdlib>
#include <string>

#include "lakecausal/core/error.hpp"
#include "lakecausal/simd/kernels.hpp"

namespace lakecausal::simd {
namespace {

constexpr KernelTable kScalar{Isa::Scalar, &detail::conv9_scalar, &detail::count_greater_scalar};
#if defined(LAKECAUSAL_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::Avx2, &detail::conv9_avx2, &detail::count_greater_avx2};
#endif

Isa resolve_active() noexcept {
  if (const char* forced = std::getenv("LAKECAUSAL_SIMD")) {
    const std::string want(forced);
    if (want == "scalar") return Isa::Scalar;
    if (want == "avx2") return isa_supported(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
  }
  return best_isa();
}

}  // namespace

std::string_view to_string(Isa isa) noexcept { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool isa_supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(LAKECAUSAL_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

Isa best_isa() noexcept { return isa_supported(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar; }

Isa active_isa() noexcept {
  static const Isa isa = resolve_active();
  return isa;
}

const KernelTable& kernels(Isa isa) {
  if (!isa_supported(isa)) throw Error("kernel set " + std::string(to_string(isa)) + " not available");
#if defined(LAKECAUSAL_HAVE_AVX2)
  if (isa == Isa::Avx2) return kAvx2;
#endif
  return kScalar;
}

const KernelTable& active_kernels() { return kernels(active_isa()); }

std::vector<Isa> supported_isas() {
  std::vector<Isa> out{Isa::Scalar};
  if (isa_supported(Isa::Avx2)) out.push_back(Isa::Avx2);
  return out;
}

}  // namespace lakecausal::simd
