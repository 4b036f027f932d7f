#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "qsl/ensemble.hpp"
#include "qsl/error.hpp"

using namespace qsl;
namespace o = oracle;

namespace {

SpectralState state_of(const Matrix& m) { return SpectralState(HermitianOperator(m)); }

} // namespace

TEST_CASE("pure state returns its own variance") {
    std::mt19937_64 rng(41);
    const Eigen::VectorXcd psi = o::random_pure(3, rng);
    const Matrix h = o::random_hermitian(3, rng);
    const SpectralState s = SpectralState::pure(psi);
    const EnsembleResult r = min_ensemble_variance(s, HermitianOperator(h));
    CHECK(std::abs(r.value - o::variance(s.rho().matrix(), h)) < 1e-12);
    CHECK(r.converged);
}

TEST_CASE("state diagonal in the H basis reaches zero") {
    Matrix rho = Matrix::Zero(2, 2);
    rho(0, 0) = 0.35;
    rho(1, 1) = 0.65;
    const EnsembleResult r = min_ensemble_variance(state_of(rho), HermitianOperator(0.5 * o::sigma_z()));
    CHECK(r.value < 1e-6);
}

TEST_CASE("rho0 with sigma_z / 2 reaches F/4 = 0.05") {
    const HermitianOperator h(0.5 * o::sigma_z());
    double lowest = 1e300;
    EnsembleOptions opts;
    opts.on_evaluate = [&](double v) { lowest = std::min(lowest, v); };
    const EnsembleResult r = min_ensemble_variance(state_of(o::rho0()), h, opts);
    CHECK(std::abs(r.value - 0.05) < 1e-3);
    CHECK(r.value >= 0.05 - 1e-9);
    // Every evaluated ensemble respects the lower bound.
    CHECK(lowest >= 0.05 - 1e-9);
    CHECK(r.evaluations > 0);
}

TEST_CASE("seeded runs are reproducible") {
    std::mt19937_64 rng(42);
    const Matrix rho = o::random_state(2, rng);
    const Matrix h = o::random_hermitian(2, rng);
    EnsembleOptions opts;
    opts.budget = 2000;
    const EnsembleResult a = min_ensemble_variance(state_of(rho), HermitianOperator(h), opts);
    const EnsembleResult b = min_ensemble_variance(state_of(rho), HermitianOperator(h), opts);
    CHECK(a.value == b.value);
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("qutrit: lower bound holds along the search") {
    std::mt19937_64 rng(43);
    const Matrix rho = o::random_state(3, rng, 0.2);
    const Matrix h = o::random_hermitian(3, rng);
    const double quarter_f = 0.25 * o::lyapunov_fisher(rho, o::commutator_flow(h, rho));
    bool all_above = true;
    EnsembleOptions opts;
    opts.budget = 4000;
    opts.on_evaluate = [&](double v) { all_above = all_above && v >= quarter_f - 1e-9; };
    const EnsembleResult r = min_ensemble_variance(state_of(rho), HermitianOperator(h), opts);
    CHECK(all_above);
    CHECK(r.value <= o::variance(rho, h) + 1e-12);
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(min_ensemble_variance(state_of(Matrix::Identity(7, 7) / 7.0), HermitianOperator::identity(7)),
                    Error);
    EnsembleOptions opts;
    opts.budget = 0;
    CHECK_THROWS_AS(min_ensemble_variance(state_of(o::rho0()), HermitianOperator(o::sigma_z()), opts), Error);
}
