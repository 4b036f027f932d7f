// bounds.hpp: entropy-based speed limits on ||rho_dot||_Tr and on currents
// Tr[X rho_dot], each split into a coherent (variance or Fisher) term and a
// dissipative (entropy production) term.

#pragma once

#include <optional>
#include <string>

#include "qsl/lindblad.hpp"
#include "qsl/operator.hpp"
#include "qsl/thermo.hpp"

namespace qsl {

namespace tol {
inline constexpr double chain_slack = 1e-9;
} // namespace tol

/// sqrt(sigma_dot * k / 2); infinite when sigma_dot is.
double entropy_term(double sigma_dot, double k);

/// sqrt V(H) + sqrt V(H_D) + sqrt(sigma_dot A / 2).
double fss_bound(const SpectralState& state, const HermitianOperator& h, const HermitianOperator& h_d,
                 double sigma_dot, double activity);

/// sqrt V(H) + sqrt V(H_D) + sqrt(sigma_dot M / 2).
double vs_bound(const SpectralState& state, const HermitianOperator& h, const HermitianOperator& h_d,
                double sigma_dot, double mobility);

struct QfiBound {
    double fisher_term = 0.0;   // (1/2) sqrt F(H + H_D)
    double entropy_term = 0.0;  // sqrt(sigma_dot M' / 2)
    double value() const { return fisher_term + entropy_term; }
};

QfiBound qfi_bound(const SpectralState& state, const HermitianOperator& h, const HermitianOperator& h_d,
                   double sigma_dot, double mobility_prime);

struct CurrentBound {
    double bound = 0.0;  // sqrt F(H + H_D) sqrt V(X) + sqrt(sigma_dot M_X / 2)
    double lhs = 0.0;    // |Tr[X rho_dot]|
};

CurrentBound current_bound(const SpectralState& state, const HermitianOperator& rho_dot,
                           const HermitianOperator& h, const HermitianOperator& h_d,
                           const HermitianOperator& x, double sigma_dot, const RateMatrix& w);

/// X' = sgn(rho_dot) / 2.
HermitianOperator optimal_probe(const HermitianOperator& rho_dot);

/// current_bound evaluated at X = X'; its lhs equals ||rho_dot||_Tr.
CurrentBound state_current_bound(const SpectralState& state, const HermitianOperator& rho_dot,
                                 const HermitianOperator& h, const HermitianOperator& h_d,
                                 double sigma_dot, const RateMatrix& w);

struct BoundReport {
    double time = 0.0;
    double speed_tr = 0.0;
    double fss = 0.0;
    double vs = 0.0;
    double qfi = 0.0;
    double current_xprime = 0.0;
    double fisher_term_qfi = 0.0;
    double entropy_term_qfi = 0.0;
    double entropy_term_fss = 0.0;
    double entropy_term_vs = 0.0;
    double sqrt_var_h = 0.0;
    double sqrt_var_hd = 0.0;
    double sqrt_var_h_plus_hd = 0.0;
    double sigma_dot = 0.0;
    double sigma_dot_flux_form = 0.0;
    bool sigma_forms_agree = true;
    double activity = 0.0;
    double mobility_m = 0.0;
    double mobility_mprime = 0.0;
    double heat_flux = 0.0;
    double entropy_flux = 0.0;
    double purity = 0.0;

    /// First violated link of the chain
    /// speed <= current(X') <= qfi <= vs <= fss, M' <= M <= A, and the Fisher-term
    /// comparison, with raw values; empty when all hold (or sigma_dot is infinite).
    std::optional<std::string> chain_violation;

    bool divergent() const;
};

/// Evaluates every quantity at one trajectory point.
BoundReport bound_report(const LindbladModel& model, const SpectralState& state, double time = 0.0);

} // namespace qsl
