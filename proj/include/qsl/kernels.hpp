// kernels.hpp: pairwise-sum inner loops with a scalar reference and SIMD variants.
//
// All Fisher-type quantities reduce to sums over index pairs (i, j) of a weight
// times |M_ij|^2. The scalar implementation is the reference; the AVX2 variant is
// selected at runtime when the CPU supports it and must agree with the reference
// to round-off (see tests/test_kernels.cpp).

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace qsl::kernels {

struct KernelSet {
    std::string_view name;

    /// sum_k w[k] * |z[k]|^2. Terms with z[k] == 0 contribute 0 even when w[k] is infinite.
    double (*weighted_abs2_sum)(std::span<const double> w, std::span<const std::complex<double>> z);

    /// sum_{i,j} 2 (p_i - p_j)^2 / (p_i + p_j) * |m_ij|^2 for a row-major n x n block,
    /// skipping pairs with p_i + p_j == 0.
    double (*sld_pair_sum)(std::span<const double> p, std::span<const std::complex<double>> m);
};

const KernelSet& scalar();

/// nullptr when the build or the CPU lacks AVX2/FMA.
const KernelSet* avx2();

/// Best available set; QSL_KERNELS=scalar in the environment pins the reference.
const KernelSet& active();

} // namespace qsl::kernels
