// thermo.hpp: rate matrix in the instantaneous eigenbasis of rho and the
// stochastic-thermodynamic scalars built from it.

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "qsl/lindblad.hpp"
#include "qsl/operator.hpp"

namespace qsl {

namespace tol {
inline constexpr double rate_prune = 1e-15;
inline constexpr double log_floor = 1e-14;      // eigenvalue floor for ln p
inline constexpr double divergent_flux = 1e-6;  // flux into a floored level that signals divergence
inline constexpr double sigma_forms = 1e-6;
} // namespace tol

/// W^{omega,alpha}_{mn} = gamma_alpha(omega) |<m|L_{omega,alpha}|n>|^2 in rho's eigenbasis.
class RateMatrix {
public:
    struct Block {
        double omega = 0.0;
        std::size_t channel = 0;
        std::size_t reverse = 0;  // block holding (-omega, alpha)
        Eigen::MatrixXd w;        // w(m, n): rate for n -> m
    };

    struct Entry {
        double omega;
        std::size_t channel;
        Eigen::Index m;
        Eigen::Index n;
        double rate;
    };

    const std::vector<Block>& blocks() const { return blocks_; }
    const RealVector& populations() const { return p_; }
    const Matrix& basis() const { return basis_; }
    std::uint64_t model_id() const { return model_id_; }
    Eigen::Index dim() const { return p_.size(); }
    /// True when no transition has a positive rate.
    bool empty() const;

    /// Nonzero entries (omega, alpha, m, n).
    std::vector<Entry> entries() const;

    /// |sum' W_mn p_n - sum' W^{-w}_nm p_m|; zero up to round-off.
    double flux_balance_residual() const;

    /// Visits every term of a primed sum with a = W^{w}_{mn} p_n and
    /// b = W^{-w}_{nm} p_m, skipping terms where both vanish. With
    /// off_diagonal_only all m == n terms are dropped; otherwise only
    /// (m == n and omega == 0).
    template <class Fn>
    void for_each_pair(bool off_diagonal_only, Fn&& fn) const {
        const Eigen::Index d = dim();
        for (const auto& blk : blocks_) {
            const auto& rev = blocks_[blk.reverse].w;
            for (Eigen::Index m = 0; m < d; ++m)
                for (Eigen::Index n = 0; n < d; ++n) {
                    if (m == n && (off_diagonal_only || blk.omega == 0.0)) continue;
                    const double a = blk.w(m, n) * p_(n);
                    const double b = rev(n, m) * p_(m);
                    if (a == 0.0 && b == 0.0) continue;
                    fn(a, b, m, n);
                }
        }
    }

private:
    friend RateMatrix rate_matrix(const LindbladModel&, const ResolvedBasis&);

    std::vector<Block> blocks_;
    RealVector p_;
    Matrix basis_;
    std::uint64_t model_id_ = 0;
};

RateMatrix rate_matrix(const LindbladModel& model, const ResolvedBasis& basis);

struct EntropyFlux {
    double value = 0.0;  // +-infinity when a floored level carries significant flux
    std::size_t clamped_levels = 0;
};

/// -Tr[rho_dot ln rho] in rho's eigenbasis with p floored at 1e-14.
EntropyFlux entropy_flux(const SpectralState& state, const HermitianOperator& rho_dot);

/// Tr[rho_dot H].
double heat_flux(const HermitianOperator& rho_dot, const HermitianOperator& h);

struct EntropyProduction {
    double value = 0.0;      // rate-matrix form, >= 0 or +infinity
    double flux_form = 0.0;  // S_dot - beta Q_dot
    bool forms_agree = true; // |value - flux_form| <= 1e-6 max(1, |value|) when both finite
};

EntropyProduction entropy_production_rate(const SpectralState& state, const HermitianOperator& rho_dot,
                                          const HermitianOperator& h, double beta, const RateMatrix& w);

/// Logarithmic mean (a - b) / ln(a / b); a when a == b, 0 when either is 0.
double log_mean(double a, double b);

/// (1/2) sum' (W_mn p_n + W^{-w}_nm p_m).
double activity(const RateMatrix& w);

/// M = sum' f(W_mn p_n, W^{-w}_nm p_m).
double mobility(const RateMatrix& w);

/// M' = the same sum restricted to n != m.
double mobility_prime(const RateMatrix& w);

/// M_X = 4 sum_{n != m} |<m|X|m>|^2 f(...), with <m|X|m> taken in the rate matrix's basis.
double mobility_x(const RateMatrix& w, const HermitianOperator& x);

} // namespace qsl
