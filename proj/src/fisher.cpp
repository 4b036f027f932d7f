#include "qsl/fisher.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "qsl/error.hpp"
#include "qsl/kernels.hpp"

namespace qsl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSupportTol = 1e-10;
constexpr double kNullEigen = 1e-14;

using RowMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Eigenvalues below the null threshold are solver noise on an empty level.
RealVector clamped(const SpectralState& s) {
    return s.eigenvalues().unaryExpr([](double v) { return v < kNullEigen ? 0.0 : v; });
}

bool both_null(double pi, double pj) {
    return std::max(pi, pj) < kNullEigen;
}

} // namespace

MonotoneFunction::MonotoneFunction(std::string name, std::function<double(double)> f)
    : name_(std::move(name)), f_(std::move(f)) {
    auto fail = [&](const std::string& why) {
        throw Error(ErrorCode::Domain, "metric '" + name_ + "' rejected: " + why);
    };
    if (!f_) fail("empty function");
    if (std::abs(f_(1.0) - 1.0) > 1e-12) fail("f(1) != 1");
    double prev = -kInf;
    for (int k = -6; k <= 6; ++k) {
        const double x = std::pow(10.0, k);
        const double fx = f_(x);
        if (!std::isfinite(fx) || fx <= 0.0) fail("f must be positive and finite on (0, inf)");
        const double mirrored = x * f_(1.0 / x);
        if (std::abs(fx - mirrored) > 1e-10 * std::max(1.0, std::abs(fx)))
            fail("f(x) != x f(1/x) at x = 1e" + std::to_string(k));
        if (fx < prev - 1e-12 * std::abs(prev)) fail("not nondecreasing at x = 1e" + std::to_string(k));
        prev = fx;
    }
}

double MonotoneFunction::pair_weight(double pi, double pj) const {
    const double hi = std::max(pi, pj);
    if (hi <= 0.0) return 0.0;
    const double lo = std::max(std::min(pi, pj), 0.0);
    return hi * f_(lo / hi);
}

const MonotoneFunction& sld_metric() {
    static const MonotoneFunction f = [] {
        MonotoneFunction m("sld", [](double x) { return 0.5 * (1.0 + x); });
        m.sld_ = true;
        return m;
    }();
    return f;
}

MonotoneFunction wigner_yanase_metric() {
    return MonotoneFunction("wigner_yanase", [](double x) {
        const double r = 0.5 * (1.0 + std::sqrt(x));
        return r * r;
    });
}

MonotoneFunction kubo_mori_metric() {
    return MonotoneFunction("kubo_mori", [](double x) {
        if (x == 0.0) return 0.0;
        const double u = x - 1.0;
        if (std::abs(u) < 1e-5) return 1.0 + u * (0.5 - u / 12.0);
        return u / std::log(x);
    });
}

MonotoneFunction harmonic_metric() {
    return MonotoneFunction("harmonic", [](double x) { return 2.0 * x / (1.0 + x); });
}

MetricRegistry::MetricRegistry() {
    metrics_.emplace("sld", sld_metric());
}

void MetricRegistry::add(MonotoneFunction f) {
    const std::string key = f.name();
    if (!metrics_.emplace(key, std::move(f)).second)
        throw Error(ErrorCode::Domain, "metric '" + key + "' already registered");
}

const MonotoneFunction& MetricRegistry::get(std::string_view name) const {
    auto it = metrics_.find(name);
    if (it == metrics_.end()) throw Error(ErrorCode::Domain, "unknown metric '" + std::string(name) + "'");
    return it->second;
}

std::vector<std::string> MetricRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : metrics_) out.push_back(k);
    return out;
}

Matrix apply_j(const MonotoneFunction& f, const SpectralState& state, const Matrix& x) {
    require_same_dim(state.dim(), x.rows(), "apply_j");
    const RealVector p = clamped(state);
    Matrix xb = state.to_eigenbasis(x);
    for (Eigen::Index i = 0; i < p.size(); ++i)
        for (Eigen::Index j = 0; j < p.size(); ++j) xb(i, j) *= f.pair_weight(p(i), p(j));
    return state.from_eigenbasis(xb);
}

cplx f_inner_product(const MonotoneFunction& f, const SpectralState& state, const HermitianOperator& a,
                     const HermitianOperator& b) {
    require_same_dim(a.dim(), b.dim(), "f_inner_product");
    require_same_dim(state.dim(), a.dim(), "f_inner_product");
    const RealVector p = clamped(state);
    const Matrix ab = state.to_eigenbasis(a.matrix());
    const Matrix bb = state.to_eigenbasis(b.matrix());
    cplx acc{0.0, 0.0};
    for (Eigen::Index i = 0; i < p.size(); ++i)
        for (Eigen::Index j = 0; j < p.size(); ++j)
            acc += f.pair_weight(p(i), p(j)) * std::conj(ab(i, j)) * bb(i, j);
    return acc;
}

double f_variance(const MonotoneFunction& f, const SpectralState& state, const HermitianOperator& a) {
    const double mean = expectation(state, a);
    const HermitianOperator centred = a - HermitianOperator::identity(a.dim()) * mean;
    const double v = f_inner_product(f, state, centred, centred).real();
    return v < 0.0 && v > -1e-12 ? 0.0 : v;
}

HermitianOperator log_derivative(const MonotoneFunction& f, const SpectralState& state,
                                 const HermitianOperator& rho_dot) {
    require_same_dim(state.dim(), rho_dot.dim(), "log_derivative");
    const RealVector p = clamped(state);
    const Matrix rd = state.to_eigenbasis(rho_dot.matrix());
    Matrix l = Matrix::Zero(p.size(), p.size());
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        for (Eigen::Index j = 0; j < p.size(); ++j) {
            const double c = f.pair_weight(p(i), p(j));
            const bool null_pair = both_null(p(i), p(j)) || c == 0.0;
            if (null_pair) {
                if (std::abs(rd(i, j)) > kSupportTol) {
                    std::ostringstream os;
                    os << "rho_dot element (" << i << ", " << j << ") = " << std::abs(rd(i, j))
                       << " lies outside the support of rho";
                    throw Error(ErrorCode::Support, os.str());
                }
                continue;
            }
            l(i, j) = rd(i, j) / c;
        }
    }
    return hermitian_part(state.from_eigenbasis(l));
}

FisherResult fisher_information(const MonotoneFunction& f, const SpectralState& state,
                                const HermitianOperator& rho_dot) {
    require_same_dim(state.dim(), rho_dot.dim(), "fisher_information");
    const RealVector p = clamped(state);
    const Eigen::Index n = p.size();
    const Matrix rd = state.to_eigenbasis(rho_dot.matrix());
    std::vector<double> w(static_cast<std::size_t>(n * n));
    std::vector<cplx> z(static_cast<std::size_t>(n * n));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto k = static_cast<std::size_t>(i * n + j);
            z[k] = rd(i, j);
            if (both_null(p(i), p(j))) {
                if (std::abs(rd(i, j)) > kSupportTol)
                    throw Error(ErrorCode::Support, "rho_dot leaves the support of rho");
                z[k] = 0.0;
                w[k] = 0.0;
                continue;
            }
            const double c = f.pair_weight(p(i), p(j));
            w[k] = c > 0.0 ? 1.0 / c : kInf;
        }
    }
    return {kernels::active().weighted_abs2_sum(w, z), f.name(), GeneratorKind::StateFamily};
}

FisherResult asymmetry_fisher(const MonotoneFunction& f, const SpectralState& state,
                              const HermitianOperator& h) {
    require_same_dim(state.dim(), h.dim(), "asymmetry_fisher");
    const RealVector p = clamped(state);
    const Eigen::Index n = p.size();
    const RowMatrix hb = state.to_eigenbasis(h.matrix());
    const std::span<const cplx> z(hb.data(), static_cast<std::size_t>(hb.size()));

    if (f.is_sld()) {
        const double v = kernels::active().sld_pair_sum({p.data(), static_cast<std::size_t>(n)}, z);
        return {v, f.name(), GeneratorKind::UnitaryAsymmetry};
    }
    std::vector<double> w(static_cast<std::size_t>(n * n), 0.0);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const double d = p(i) - p(j);
            if (d == 0.0) continue;
            const double c = f.pair_weight(p(i), p(j));
            w[static_cast<std::size_t>(i * n + j)] = c > 0.0 ? d * d / c : kInf;
        }
    return {kernels::active().weighted_abs2_sum(w, z), f.name(), GeneratorKind::UnitaryAsymmetry};
}

double sld_fisher(const SpectralState& state, const HermitianOperator& h) {
    return asymmetry_fisher(sld_metric(), state, h).value;
}

VarianceSplit variance_split(const SpectralState& state, const HermitianOperator& h) {
    const double v = variance(state, h);
    VarianceSplit out;
    out.quantum = std::max(0.0, sld_fisher(state, h) / 4.0);
    out.classical = v - out.quantum;
    if (out.classical < 0.0 && out.classical > -1e-10) out.classical = 0.0;
    return out;
}

CramerRao cramer_rao_check(const MonotoneFunction& f, const SpectralState& state,
                           const HermitianOperator& generator, const HermitianOperator& a) {
    require_same_dim(state.dim(), generator.dim(), "cramer_rao_check");
    require_same_dim(state.dim(), a.dim(), "cramer_rao_check");
    const HermitianOperator rho_dot = minus_i_commutator(generator, state.rho());
    CramerRao out;
    out.lhs = std::abs((a.matrix() * rho_dot.matrix()).trace().real());
    const double j = fisher_information(f, state, rho_dot).value;
    out.rhs = std::sqrt(std::max(0.0, j)) * std::sqrt(f_variance(f, state, a));
    return out;
}

} // namespace qsl
