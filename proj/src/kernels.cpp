#include "qsl/kernels.hpp"

#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"

namespace qsl::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(QSL_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

} // namespace

const KernelSet& scalar() {
    static const KernelSet set{"scalar", &detail::weighted_abs2_sum_scalar,
                               &detail::sld_pair_sum_scalar};
    return set;
}

const KernelSet* avx2() {
#if defined(QSL_HAVE_AVX2_TU)
    static const KernelSet set{"avx2", &detail::weighted_abs2_sum_avx2,
                               &detail::sld_pair_sum_avx2};
    static const bool ok = cpu_has_avx2();
    return ok ? &set : nullptr;
#else
    return nullptr;
#endif
}

const KernelSet& active() {
    static const KernelSet* chosen = [] {
        const char* env = std::getenv("QSL_KERNELS");
        if (env != nullptr && std::string_view(env) == "scalar") return &scalar();
        const KernelSet* simd = avx2();
        return simd != nullptr ? simd : &scalar();
    }();
    return *chosen;
}

} // namespace qsl::kernels
