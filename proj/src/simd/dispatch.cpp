#include <cstdlib>
#include <string_view>

#include "drm/simd/kernels.hpp"

namespace drm::simd {

#if defined(DRM_HAVE_AVX2)
namespace avx2 {
const Kernels& table();
}
#endif

const Kernels* avx2_kernels() {
#if defined(DRM_HAVE_AVX2)
    static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return supported ? &avx2::table() : nullptr;
#else
    return nullptr;
#endif
}

namespace {

const Kernels& select_kernels() {
    const char* env = std::getenv("DRM_SIMD");
    const std::string_view want = env ? env : "";
    if (want == "scalar") return scalar_kernels();
    if (const Kernels* k = avx2_kernels()) return *k;
    return scalar_kernels();
}

}  // namespace

const Kernels& active_kernels() {
    static const Kernels& k = select_kernels();
    return k;
}

}  // namespace drm::simd
