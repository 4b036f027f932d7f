#pragma once

#include <complex>
#include <span>

namespace qsl::kernels::detail {

double weighted_abs2_sum_scalar(std::span<const double> w, std::span<const std::complex<double>> z);
double sld_pair_sum_scalar(std::span<const double> p, std::span<const std::complex<double>> m);

#if defined(QSL_HAVE_AVX2_TU)
double weighted_abs2_sum_avx2(std::span<const double> w, std::span<const std::complex<double>> z);
double sld_pair_sum_avx2(std::span<const double> p, std::span<const std::complex<double>> m);
#endif

} // namespace qsl::kernels::detail
