// fisher.hpp: monotone metrics, f-inner products, logarithmic derivatives and
// the Fisher informations built on them.

#pragma once

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "qsl/operator.hpp"

namespace qsl {

/// Standard monotone function f: f(1) = 1, f(x) = x f(1/x), nondecreasing.
class MonotoneFunction {
public:
    /// Validates f(1) = 1, the symmetry and monotonicity on x = 10^k, k = -6..6.
    /// Operator monotonicity itself is assumed, not checked.
    MonotoneFunction(std::string name, std::function<double(double)> f);

    const std::string& name() const { return name_; }
    double operator()(double x) const { return f_(x); }

    /// p_j f(p_i / p_j) evaluated as p_max f(p_min / p_max); 0 when both vanish.
    double pair_weight(double pi, double pj) const;

    /// True for the built-in SLD metric, which has a dedicated pair-sum kernel.
    bool is_sld() const { return sld_; }

private:
    friend const MonotoneFunction& sld_metric();

    std::string name_;
    std::function<double(double)> f_;
    bool sld_ = false;
};

/// f(x) = (1 + x) / 2.
const MonotoneFunction& sld_metric();

MonotoneFunction wigner_yanase_metric();  // ((1 + sqrt x) / 2)^2
MonotoneFunction kubo_mori_metric();      // (x - 1) / ln x
MonotoneFunction harmonic_metric();       // 2x / (1 + x)

class MetricRegistry {
public:
    MetricRegistry();  // holds "sld"

    void add(MonotoneFunction f);
    const MonotoneFunction& get(std::string_view name) const;
    std::vector<std::string> names() const;

private:
    std::map<std::string, MonotoneFunction, std::less<>> metrics_;
};

enum class GeneratorKind { StateFamily, UnitaryAsymmetry };

struct FisherResult {
    double value = 0.0;
    std::string metric;
    GeneratorKind kind = GeneratorKind::StateFamily;
};

/// <A, B>^f = Tr[A J^f_rho(B)].
cplx f_inner_product(const MonotoneFunction& f, const SpectralState& state, const HermitianOperator& a,
                     const HermitianOperator& b);

/// <A0, A0>^f with A0 = A - <A> I.
double f_variance(const MonotoneFunction& f, const SpectralState& state, const HermitianOperator& a);

/// J^f_rho applied to an operator.
Matrix apply_j(const MonotoneFunction& f, const SpectralState& state, const Matrix& x);

/// L with J^f_rho(L) = rho_dot. Throws Support when rho_dot has components no
/// finite L reproduces.
HermitianOperator log_derivative(const MonotoneFunction& f, const SpectralState& state,
                                 const HermitianOperator& rho_dot);

/// J^f = Tr[rho_dot (J^f)^{-1}(rho_dot)].
FisherResult fisher_information(const MonotoneFunction& f, const SpectralState& state,
                                const HermitianOperator& rho_dot);

/// F^f_rho(H) = sum_ij (p_i - p_j)^2 / (p_j f(p_i/p_j)) |H_ij|^2.
FisherResult asymmetry_fisher(const MonotoneFunction& f, const SpectralState& state,
                              const HermitianOperator& h);

/// SLD Fisher information F_rho(H).
double sld_fisher(const SpectralState& state, const HermitianOperator& h);

struct VarianceSplit {
    double quantum = 0.0;    // F_SLD / 4
    double classical = 0.0;  // V - Q
};

VarianceSplit variance_split(const SpectralState& state, const HermitianOperator& h);

struct CramerRao {
    double lhs = 0.0;  // |Tr[A (-i[H, rho])]|
    double rhs = 0.0;  // sqrt(J^f) sqrt(V^f(A))
};

CramerRao cramer_rao_check(const MonotoneFunction& f, const SpectralState& state,
                           const HermitianOperator& generator, const HermitianOperator& a);

} // namespace qsl
