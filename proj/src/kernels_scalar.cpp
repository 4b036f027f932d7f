#include <cmath>

#include "kernels_impl.hpp"

namespace qsl::kernels::detail {

double weighted_abs2_sum_scalar(std::span<const double> w, std::span<const std::complex<double>> z) {
    double acc = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) {
        const double a = std::norm(z[k]);
        if (a == 0.0) continue;
        acc += w[k] * a;
    }
    return acc;
}

double sld_pair_sum_scalar(std::span<const double> p, std::span<const std::complex<double>> m) {
    const std::size_t n = p.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double s = p[i] + p[j];
            if (s <= 0.0) continue;
            const double d = p[i] - p[j];
            acc += 2.0 * d * d / s * std::norm(m[i * n + j]);
        }
    }
    return acc;
}

} // namespace qsl::kernels::detail
