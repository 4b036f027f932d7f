#include "qsl/thermo.hpp"

#include <cmath>
#include <limits>

#include "qsl/error.hpp"

namespace qsl {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

RateMatrix rate_matrix(const LindbladModel& model, const ResolvedBasis& basis) {
    if (basis.model_id != model.id())
        throw Error(ErrorCode::Contract, "rate matrix requested with a basis resolved for another model");
    const SpectralState& s = basis.state;
    const Eigen::Index d = s.dim();

    RateMatrix out;
    out.p_ = s.eigenvalues().cwiseMax(0.0);
    out.basis_ = s.eigenvectors();
    out.model_id_ = model.id();

    const auto& jumps = model.resolved_jumps();
    out.blocks_.reserve(jumps.size());
    for (const auto& j : jumps) {
        Eigen::MatrixXd w(d, d);
        if (j.gamma == 0.0) {
            w.setZero();
        } else {
            w = j.gamma * s.to_eigenbasis(j.op).cwiseAbs2();
            w = (w.array() < tol::rate_prune).select(0.0, w);
        }
        out.blocks_.push_back({j.omega, j.channel, j.reverse, std::move(w)});
    }
    return out;
}

bool RateMatrix::empty() const {
    for (const auto& blk : blocks_)
        if ((blk.w.array() > 0.0).any()) return false;
    return true;
}

std::vector<RateMatrix::Entry> RateMatrix::entries() const {
    std::vector<Entry> out;
    for (const auto& blk : blocks_)
        for (Eigen::Index m = 0; m < blk.w.rows(); ++m)
            for (Eigen::Index n = 0; n < blk.w.cols(); ++n)
                if (blk.w(m, n) > 0.0) out.push_back({blk.omega, blk.channel, m, n, blk.w(m, n)});
    return out;
}

double RateMatrix::flux_balance_residual() const {
    double fwd = 0.0;
    double bwd = 0.0;
    for_each_pair(false, [&](double a, double b, Eigen::Index, Eigen::Index) {
        fwd += a;
        bwd += b;
    });
    return std::abs(fwd - bwd);
}

EntropyFlux entropy_flux(const SpectralState& state, const HermitianOperator& rho_dot) {
    require_same_dim(state.dim(), rho_dot.dim(), "entropy_flux");
    const Matrix rd = state.to_eigenbasis(rho_dot.matrix());
    const RealVector& p = state.eigenvalues();
    EntropyFlux out;
    double divergent = 0.0;
    for (Eigen::Index n = 0; n < p.size(); ++n) {
        const double flow = rd(n, n).real();
        if (p(n) < tol::log_floor) {
            ++out.clamped_levels;
            if (std::abs(flow) > tol::divergent_flux) divergent += flow;
            out.value -= flow * std::log(tol::log_floor);
        } else {
            out.value -= flow * std::log(p(n));
        }
    }
    // ln p -> -inf on a level with inflow drives S_dot to +inf (and outflow to -inf).
    if (divergent != 0.0) out.value = divergent > 0.0 ? kInf : -kInf;
    return out;
}

double heat_flux(const HermitianOperator& rho_dot, const HermitianOperator& h) {
    require_same_dim(rho_dot.dim(), h.dim(), "heat_flux");
    return (rho_dot.matrix() * h.matrix()).trace().real();
}

EntropyProduction entropy_production_rate(const SpectralState& state, const HermitianOperator& rho_dot,
                                          const HermitianOperator& h, double beta, const RateMatrix& w) {
    require_same_dim(state.dim(), w.dim(), "entropy_production_rate");
    EntropyProduction out;

    double sigma = 0.0;
    bool divergent = false;
    w.for_each_pair(false, [&](double a, double b, Eigen::Index, Eigen::Index) {
        if (a == 0.0) return;  // 0 ln 0 = 0
        if (b == 0.0) {
            divergent = true;
            return;
        }
        sigma += a * std::log(a / b);
    });
    if (divergent) {
        out.value = kInf;
    } else {
        out.value = sigma < 0.0 && sigma > -1e-10 ? 0.0 : sigma;
    }

    out.flux_form = entropy_flux(state, rho_dot).value - beta * heat_flux(rho_dot, h);
    if (std::isfinite(out.value) && std::isfinite(out.flux_form))
        out.forms_agree =
            std::abs(out.value - out.flux_form) <= tol::sigma_forms * std::max(1.0, std::abs(out.value));
    return out;
}

double log_mean(double a, double b) {
    if (a < 0.0 || b < 0.0 || std::isnan(a) || std::isnan(b))
        throw Error(ErrorCode::Domain, "log_mean requires non-negative arguments");
    if (a == 0.0 || b == 0.0) return 0.0;
    if (a == b) return a;
    const double u = b / a - 1.0;
    if (std::abs(u) < 1e-4) return a * (1.0 + u * (0.5 + u * (-1.0 / 12.0 + u / 24.0)));
    return (a - b) / std::log(a / b);
}

double activity(const RateMatrix& w) {
    double acc = 0.0;
    w.for_each_pair(false, [&](double a, double b, Eigen::Index, Eigen::Index) { acc += a + b; });
    return 0.5 * acc;
}

double mobility(const RateMatrix& w) {
    double acc = 0.0;
    w.for_each_pair(false, [&](double a, double b, Eigen::Index, Eigen::Index) { acc += log_mean(a, b); });
    return acc;
}

double mobility_prime(const RateMatrix& w) {
    double acc = 0.0;
    w.for_each_pair(true, [&](double a, double b, Eigen::Index, Eigen::Index) { acc += log_mean(a, b); });
    return acc;
}

double mobility_x(const RateMatrix& w, const HermitianOperator& x) {
    if (x.dim() != w.dim())
        throw Error(ErrorCode::Contract, "observable and rate matrix live in different spaces");
    const Matrix xb = w.basis().adjoint() * x.matrix() * w.basis();
    double acc = 0.0;
    w.for_each_pair(true, [&](double a, double b, Eigen::Index m, Eigen::Index) {
        acc += std::norm(xb(m, m)) * log_mean(a, b);
    });
    return 4.0 * acc;
}

} // namespace qsl
