#include "qsl/bounds.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "qsl/error.hpp"
#include "qsl/fisher.hpp"

namespace qsl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_non_negative(double v, const char* what) {
    if (std::isnan(v) || v < 0.0) throw Error(ErrorCode::Domain, std::string(what) + " must be >= 0");
}

double coherent_variance_terms(const SpectralState& state, const HermitianOperator& h,
                               const HermitianOperator& h_d) {
    return std::sqrt(variance(state, h)) + std::sqrt(variance(state, h_d));
}

} // namespace

double entropy_term(double sigma_dot, double k) {
    require_non_negative(sigma_dot, "sigma_dot");
    require_non_negative(k, "mobility/activity");
    if (std::isinf(sigma_dot)) return kInf;
    return std::sqrt(0.5 * sigma_dot * k);
}

double fss_bound(const SpectralState& state, const HermitianOperator& h, const HermitianOperator& h_d,
                 double sigma_dot, double activity) {
    return coherent_variance_terms(state, h, h_d) + entropy_term(sigma_dot, activity);
}

double vs_bound(const SpectralState& state, const HermitianOperator& h, const HermitianOperator& h_d,
                double sigma_dot, double mobility) {
    return coherent_variance_terms(state, h, h_d) + entropy_term(sigma_dot, mobility);
}

QfiBound qfi_bound(const SpectralState& state, const HermitianOperator& h, const HermitianOperator& h_d,
                   double sigma_dot, double mobility_prime) {
    QfiBound out;
    out.fisher_term = 0.5 * std::sqrt(sld_fisher(state, h + h_d));
    out.entropy_term = entropy_term(sigma_dot, mobility_prime);
    return out;
}

CurrentBound current_bound(const SpectralState& state, const HermitianOperator& rho_dot,
                           const HermitianOperator& h, const HermitianOperator& h_d,
                           const HermitianOperator& x, double sigma_dot, const RateMatrix& w) {
    require_same_dim(state.dim(), x.dim(), "current_bound");
    require_same_dim(state.dim(), rho_dot.dim(), "current_bound");
    CurrentBound out;
    out.lhs = std::abs((x.matrix() * rho_dot.matrix()).trace().real());
    const double fisher = sld_fisher(state, h + h_d);
    out.bound = std::sqrt(fisher) * std::sqrt(variance(state, x)) + entropy_term(sigma_dot, mobility_x(w, x));
    return out;
}

HermitianOperator optimal_probe(const HermitianOperator& rho_dot) {
    return sign_operator(rho_dot) * 0.5;
}

CurrentBound state_current_bound(const SpectralState& state, const HermitianOperator& rho_dot,
                                 const HermitianOperator& h, const HermitianOperator& h_d,
                                 double sigma_dot, const RateMatrix& w) {
    return current_bound(state, rho_dot, h, h_d, optimal_probe(rho_dot), sigma_dot, w);
}

bool BoundReport::divergent() const {
    return std::isinf(sigma_dot);
}

namespace {

std::optional<std::string> check_chain(const BoundReport& r) {
    if (r.divergent()) return std::nullopt;
    struct Link {
        const char* lower_name;
        double lower;
        const char* upper_name;
        double upper;
    };
    const Link links[] = {
        {"speed_tr", r.speed_tr, "current_xprime", r.current_xprime},
        {"current_xprime", r.current_xprime, "qfi", r.qfi},
        {"qfi", r.qfi, "vs", r.vs},
        {"vs", r.vs, "fss", r.fss},
        {"mobility_mprime", r.mobility_mprime, "mobility_m", r.mobility_m},
        {"mobility_m", r.mobility_m, "activity", r.activity},
        {"fisher_term_qfi", r.fisher_term_qfi, "sqrt_var_h_plus_hd", r.sqrt_var_h_plus_hd},
        {"sqrt_var_h_plus_hd", r.sqrt_var_h_plus_hd, "sqrt_var_h+sqrt_var_hd", r.sqrt_var_h + r.sqrt_var_hd},
    };
    for (const auto& l : links) {
        if (l.lower <= l.upper + tol::chain_slack) continue;
        std::ostringstream os;
        os.precision(17);
        os << "t = " << r.time << ": " << l.lower_name << " = " << l.lower << " exceeds " << l.upper_name
           << " = " << l.upper << " [speed_tr=" << r.speed_tr << " current_xprime=" << r.current_xprime
           << " qfi=" << r.qfi << " vs=" << r.vs << " fss=" << r.fss << " sigma_dot=" << r.sigma_dot
           << " activity=" << r.activity << " M=" << r.mobility_m << " M'=" << r.mobility_mprime << "]";
        return os.str();
    }
    return std::nullopt;
}

} // namespace

BoundReport bound_report(const LindbladModel& model, const SpectralState& state, double time) {
    try {
        const ResolvedBasis basis = resolve_basis(model, state);
        const SpectralState& s = basis.state;
        const HermitianOperator& h = model.hamiltonian();
        const HermitianOperator rho_dot = rhs(model, s);
        const HermitianOperator h_d = effective_hamiltonian(model, basis);
        const RateMatrix w = rate_matrix(model, basis);
        const EntropyProduction ep = entropy_production_rate(s, rho_dot, h, model.beta(), w);

        BoundReport r;
        r.time = time;
        r.speed_tr = trace_norm(rho_dot);
        r.sigma_dot = ep.value;
        r.sigma_dot_flux_form = ep.flux_form;
        r.sigma_forms_agree = ep.forms_agree;
        r.activity = activity(w);
        r.mobility_m = mobility(w);
        r.mobility_mprime = mobility_prime(w);
        r.sqrt_var_h = std::sqrt(variance(s, h));
        r.sqrt_var_hd = std::sqrt(variance(s, h_d));
        r.sqrt_var_h_plus_hd = std::sqrt(variance(s, h + h_d));

        r.entropy_term_fss = entropy_term(r.sigma_dot, r.activity);
        r.entropy_term_vs = entropy_term(r.sigma_dot, r.mobility_m);
        r.fss = r.sqrt_var_h + r.sqrt_var_hd + r.entropy_term_fss;
        r.vs = r.sqrt_var_h + r.sqrt_var_hd + r.entropy_term_vs;

        const QfiBound q = qfi_bound(s, h, h_d, r.sigma_dot, r.mobility_mprime);
        r.fisher_term_qfi = q.fisher_term;
        r.entropy_term_qfi = q.entropy_term;
        r.qfi = q.value();
        r.current_xprime = state_current_bound(s, rho_dot, h, h_d, r.sigma_dot, w).bound;

        r.heat_flux = heat_flux(rho_dot, h);
        r.entropy_flux = entropy_flux(s, rho_dot).value;
        r.purity = s.purity();
        r.chain_violation = check_chain(r);
        return r;
    } catch (const Error& e) {
        std::ostringstream os;
        os << "at t = " << time << ": " << e.what();
        throw Error(e.code(), os.str());
    }
}

} // namespace qsl
