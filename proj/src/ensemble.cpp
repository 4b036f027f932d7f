#include "qsl/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <random>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "qsl/error.hpp"

namespace qsl {

namespace {

struct Objective {
    Eigen::Index dim;
    Eigen::Index members;
    RealVector sqrt_p;
    Matrix h;           // H in rho's eigenbasis
    double second = 0;  // Tr[rho H^2]
    const std::function<void(double)>* observer = nullptr;
    std::size_t evaluations = 0;

    double operator()(const double* x) {
        Matrix a(members, dim);
        for (Eigen::Index i = 0; i < members; ++i)
            for (Eigen::Index j = 0; j < dim; ++j) {
                const Eigen::Index k = 2 * (i * dim + j);
                a(i, j) = cplx(x[k], x[k + 1]);
            }
        // Thin Q of the QR factorisation: an isometry U with U^dag U = I.
        Eigen::HouseholderQR<Matrix> qr(a);
        const Matrix u = qr.householderQ() * Matrix::Identity(members, dim);
        const Matrix phi = u * sqrt_p.cast<cplx>().asDiagonal();  // row i = components of |phi~_i>

        double captured = 0.0;
        for (Eigen::Index i = 0; i < members; ++i) {
            const double q = phi.row(i).squaredNorm();
            if (q < 1e-300) continue;
            const double mean = (phi.row(i).conjugate() * h * phi.row(i).transpose())(0, 0).real();
            captured += mean * mean / q;
        }
        const double value = second - captured;
        ++evaluations;
        if (observer != nullptr && *observer) (*observer)(value);
        return value;
    }
};

double gsl_trampoline(const gsl_vector* v, void* ctx) {
    return (*static_cast<Objective*>(ctx))(v->data);
}

struct MinimizerDeleter {
    void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};
struct VectorDeleter {
    void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};

} // namespace

EnsembleResult min_ensemble_variance(const SpectralState& state, const HermitianOperator& h,
                                     const EnsembleOptions& options) {
    require_same_dim(state.dim(), h.dim(), "min_ensemble_variance");
    if (state.dim() > 6) throw Error(ErrorCode::Input, "ensemble oracle supports dim <= 6");
    if (options.budget < 1) throw Error(ErrorCode::Input, "budget must be >= 1");
    static std::once_flag quiet;
    std::call_once(quiet, [] { gsl_set_error_handler_off(); });

    const RealVector p = state.eigenvalues().cwiseMax(0.0);
    const Eigen::Index rank = (p.array() > 1e-14).count();
    if (rank <= 1) {
        // A pure state has a single decomposition: itself.
        const double v = variance(state, h);
        if (options.on_evaluate) options.on_evaluate(v);
        return {v, true, 0, 1};
    }

    Objective obj;
    obj.dim = state.dim();
    obj.members = options.members == 0 ? obj.dim * obj.dim : static_cast<Eigen::Index>(options.members);
    if (obj.members < obj.dim) throw Error(ErrorCode::Input, "ensemble needs at least dim members");
    obj.sqrt_p = p.cwiseSqrt();
    obj.h = state.to_eigenbasis(h.matrix());
    obj.second = (state.rho().matrix() * h.matrix() * h.matrix()).trace().real();
    obj.observer = &options.on_evaluate;

    const std::size_t n = static_cast<std::size_t>(2 * obj.members * obj.dim);
    gsl_multimin_function fn{&gsl_trampoline, n, &obj};
    std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter> mini(
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n));
    std::unique_ptr<gsl_vector, VectorDeleter> x(gsl_vector_alloc(n));
    std::unique_ptr<gsl_vector, VectorDeleter> step(gsl_vector_alloc(n));

    const std::size_t restarts = std::max<std::size_t>(1, std::min(options.restarts, options.budget));
    const std::size_t per_restart = std::max<std::size_t>(1, options.budget / restarts);

    EnsembleResult result;
    result.value = std::numeric_limits<double>::infinity();
    std::vector<double> minima;

    for (std::size_t r = 0; r < restarts; ++r) {
        std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                          static_cast<std::uint32_t>(r)};
        std::mt19937_64 rng(seq);
        std::normal_distribution<double> normal;
        for (std::size_t k = 0; k < n; ++k) gsl_vector_set(x.get(), k, normal(rng));

        double best = std::numeric_limits<double>::infinity();
        std::size_t used = 0;
        double scale = 0.5;
        // Simplex search, then re-seed a shrinking simplex at the incumbent.
        while (used < per_restart) {
            gsl_vector_set_all(step.get(), scale);
            gsl_multimin_fminimizer_set(mini.get(), &fn, x.get(), step.get());
            int status = GSL_CONTINUE;
            while (status == GSL_CONTINUE && used < per_restart) {
                if (gsl_multimin_fminimizer_iterate(mini.get()) != GSL_SUCCESS) break;
                ++used;
                status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(mini.get()), 1e-10);
            }
            const double fmin = gsl_multimin_fminimizer_minimum(mini.get());
            gsl_vector_memcpy(x.get(), gsl_multimin_fminimizer_x(mini.get()));
            const bool stalled = best - fmin <= 1e-13 * std::max(1.0, std::abs(fmin));
            best = std::min(best, fmin);
            if (stalled && status == GSL_SUCCESS) break;
            scale = std::max(scale * 0.3, 1e-3);
        }
        result.iterations += used;
        minima.push_back(best);
        result.value = std::min(result.value, best);
    }

    std::sort(minima.begin(), minima.end());
    result.converged =
        minima.size() >= 2 && minima[1] - minima[0] <= 1e-7 * std::max(1e-3, std::abs(minima[0]));
    result.evaluations = obj.evaluations;
    result.value = std::max(result.value, 0.0);
    return result;
}

} // namespace qsl
