// Compiled with -mavx2 -mfma; only reached through kernels::avx2() after a CPU check.

#include <immintrin.h>

#include <cmath>

#include "kernels_impl.hpp"

namespace qsl::kernels::detail {

namespace {

// |z0|^2, |z1|^2 for two interleaved complex doubles.
inline __m128d abs2_pair(const double* z) {
    const __m256d v = _mm256_loadu_pd(z);
    const __m256d sq = _mm256_mul_pd(v, v);
    const __m256d h = _mm256_hadd_pd(sq, sq);  // (a0, a0, a1, a1)
    return _mm256_castpd256_pd128(_mm256_permute4x64_pd(h, 0b1000));
}

inline double hsum(__m128d v) {
    return _mm_cvtsd_f64(_mm_add_sd(v, _mm_unpackhi_pd(v, v)));
}

} // namespace

double weighted_abs2_sum_avx2(std::span<const double> w, std::span<const std::complex<double>> z) {
    const std::size_t n = z.size();
    const double* zd = reinterpret_cast<const double*>(z.data());
    const __m128d zero = _mm_setzero_pd();
    __m128d acc = zero;
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        const __m128d a = abs2_pair(zd + 2 * k);
        const __m128d wk = _mm_loadu_pd(w.data() + k);
        const __m128d live = _mm_cmpneq_pd(a, zero);
        acc = _mm_add_pd(acc, _mm_and_pd(_mm_mul_pd(wk, a), live));
    }
    double total = hsum(acc);
    for (; k < n; ++k) {
        const double a = std::norm(z[k]);
        if (a != 0.0) total += w[k] * a;
    }
    return total;
}

double sld_pair_sum_avx2(std::span<const double> p, std::span<const std::complex<double>> m) {
    const std::size_t n = p.size();
    const double* md = reinterpret_cast<const double*>(m.data());
    const __m128d zero = _mm_setzero_pd();
    const __m128d two = _mm_set1_pd(2.0);
    __m128d acc = zero;
    double tail = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const __m128d pi = _mm_set1_pd(p[i]);
        std::size_t j = 0;
        for (; j + 2 <= n; j += 2) {
            const __m128d pj = _mm_loadu_pd(p.data() + j);
            const __m128d s = _mm_add_pd(pi, pj);
            const __m128d d = _mm_sub_pd(pi, pj);
            const __m128d a = abs2_pair(md + 2 * (i * n + j));
            const __m128d term = _mm_div_pd(_mm_mul_pd(_mm_mul_pd(two, _mm_mul_pd(d, d)), a), s);
            const __m128d live = _mm_cmpgt_pd(s, zero);
            acc = _mm_add_pd(acc, _mm_and_pd(term, live));
        }
        for (; j < n; ++j) {
            const double s = p[i] + p[j];
            if (s <= 0.0) continue;
            const double d = p[i] - p[j];
            tail += 2.0 * d * d * std::norm(m[i * n + j]) / s;
        }
    }
    return hsum(acc) + tail;
}

} // namespace qsl::kernels::detail
