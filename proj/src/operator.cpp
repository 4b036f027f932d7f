#include "qsl/operator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "qsl/error.hpp"

namespace qsl {

namespace {

bool all_finite(const Matrix& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        const cplx z = m.data()[i];
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return true;
}

void phase_columns(Matrix& v) {
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
        Eigen::Index best = 0;
        double best_abs = -1.0;
        for (Eigen::Index r = 0; r < v.rows(); ++r) {
            // Small bias toward lower indices keeps the choice stable under round-off.
            const double a = std::abs(v(r, c));
            if (a > best_abs * (1.0 + 1e-12)) {
                best_abs = a;
                best = r;
            }
        }
        if (best_abs > 0.0) v.col(c) *= std::conj(v(best, c)) / best_abs;
    }
}

} // namespace

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* where) {
    if (a != b)
        throw Error(ErrorCode::DimensionMismatch,
                    std::string(where) + ": " + std::to_string(a) + " vs " + std::to_string(b));
}

double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

HermitianOperator::HermitianOperator(const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() < 1)
        throw Error(ErrorCode::Input, "operator must be square with dim >= 1");
    if (!all_finite(m)) throw Error(ErrorCode::Input, "operator has non-finite entries");
    const double residual = max_abs(0.5 * (m - m.adjoint()));
    if (residual > tol::hermitian_reject)
        throw Error(ErrorCode::NonHermitian,
                    "anti-Hermitian residual " + std::to_string(residual) + " exceeds 1e-8");
    m_ = 0.5 * (m + m.adjoint());
}

HermitianOperator hermitian_part(const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() < 1)
        throw Error(ErrorCode::Input, "operator must be square with dim >= 1");
    if (!all_finite(m)) throw Error(ErrorCode::Input, "operator has non-finite entries");
    return HermitianOperator(Matrix(0.5 * (m + m.adjoint())), HermitianOperator::Trusted{});
}

HermitianOperator HermitianOperator::zero(Eigen::Index dim) {
    return HermitianOperator(Matrix::Zero(dim, dim));
}

HermitianOperator HermitianOperator::identity(Eigen::Index dim) {
    return HermitianOperator(Matrix::Identity(dim, dim));
}

HermitianOperator HermitianOperator::diagonal(const RealVector& d) {
    return HermitianOperator(Matrix(d.cast<cplx>().asDiagonal()));
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& o) const {
    require_same_dim(dim(), o.dim(), "operator+");
    return HermitianOperator(Matrix(m_ + o.m_), Trusted{});
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& o) const {
    require_same_dim(dim(), o.dim(), "operator-");
    return HermitianOperator(Matrix(m_ - o.m_), Trusted{});
}

HermitianOperator HermitianOperator::operator*(double s) const {
    return HermitianOperator(Matrix(m_ * s), Trusted{});
}

Eigenpairs spectral_decompose(const HermitianOperator& op) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(op.matrix());
    if (solver.info() != Eigen::Success)
        throw Error(ErrorCode::Input, "eigensolver failed to converge");
    const RealVector& asc = solver.eigenvalues();
    const Eigen::Index n = asc.size();

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return asc(a) > asc(b); });

    Eigenpairs out{RealVector(n), Matrix(n, n)};
    for (Eigen::Index k = 0; k < n; ++k) {
        out.values(k) = asc(order[static_cast<std::size_t>(k)]);
        out.vectors.col(k) = solver.eigenvectors().col(order[static_cast<std::size_t>(k)]);
    }
    phase_columns(out.vectors);
    return out;
}

SpectralState::SpectralState(const HermitianOperator& rho, double negative_tolerance)
    : rho_(rho) {
    auto eig = spectral_decompose(rho);
    values_ = std::move(eig.values);
    vectors_ = std::move(eig.vectors);

    const double sum = values_.sum();
    if (std::abs(sum - 1.0) > tol::trace)
        throw Error(ErrorCode::InvalidState, "trace " + std::to_string(sum) + " differs from 1");
    if (values_.minCoeff() < -negative_tolerance)
        throw Error(ErrorCode::InvalidState,
                    "negative eigenvalue " + std::to_string(values_.minCoeff()));
}

SpectralState SpectralState::with_basis(const Matrix& vectors) const {
    require_same_dim(vectors.rows(), dim(), "with_basis");
    require_same_dim(vectors.cols(), dim(), "with_basis");
    const Matrix id = Matrix::Identity(dim(), dim());
    if (max_abs(vectors.adjoint() * vectors - id) > 1e-10)
        throw Error(ErrorCode::Contract, "supplied eigenbasis is not unitary");
    const Matrix in_basis = vectors.adjoint() * rho_.matrix() * vectors;
    Matrix off = in_basis;
    off.diagonal().setZero();
    if (max_abs(off) > 1e-10)
        throw Error(ErrorCode::Contract, "supplied basis does not diagonalize rho");

    SpectralState s;
    s.rho_ = rho_;
    s.values_ = in_basis.diagonal().real();
    s.vectors_ = vectors;
    return s;
}

SpectralState SpectralState::pure(const Eigen::VectorXcd& psi) {
    const Eigen::VectorXcd v = psi.normalized();
    return SpectralState(hermitian_part(v * v.adjoint()));
}

Matrix SpectralState::to_eigenbasis(const Matrix& a) const {
    require_same_dim(a.rows(), dim(), "to_eigenbasis");
    return vectors_.adjoint() * a * vectors_;
}

Matrix SpectralState::from_eigenbasis(const Matrix& a) const {
    require_same_dim(a.rows(), dim(), "from_eigenbasis");
    return vectors_ * a * vectors_.adjoint();
}

double SpectralState::purity() const {
    return values_.squaredNorm();
}

double trace_norm(const HermitianOperator& op) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(op.matrix(), Eigen::EigenvaluesOnly);
    return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

double expectation(const SpectralState& state, const HermitianOperator& obs) {
    require_same_dim(state.dim(), obs.dim(), "expectation");
    return (state.rho().matrix() * obs.matrix()).trace().real();
}

double variance(const SpectralState& state, const HermitianOperator& obs) {
    require_same_dim(state.dim(), obs.dim(), "variance");
    const Matrix ra = state.rho().matrix() * obs.matrix();
    const double mean = ra.trace().real();
    const double second = (ra * obs.matrix()).trace().real();
    const double v = second - mean * mean;
    if (v < 0.0 && v > -1e-12) return 0.0;
    return v;
}

HermitianOperator sign_operator(const HermitianOperator& op) {
    const auto eig = spectral_decompose(op);
    RealVector s(eig.values.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        const double l = eig.values(i);
        s(i) = std::abs(l) < tol::sign_zero ? 0.0 : (l > 0.0 ? 1.0 : -1.0);
    }
    return hermitian_part(eig.vectors * s.cast<cplx>().asDiagonal() * eig.vectors.adjoint());
}

Matrix commutator(const HermitianOperator& a, const HermitianOperator& b) {
    require_same_dim(a.dim(), b.dim(), "commutator");
    return a.matrix() * b.matrix() - b.matrix() * a.matrix();
}

HermitianOperator minus_i_commutator(const HermitianOperator& a, const HermitianOperator& b) {
    return hermitian_part(cplx(0.0, -1.0) * commutator(a, b));
}

HermitianOperator gibbs_state(const HermitianOperator& h, double beta) {
    const auto eig = spectral_decompose(h);
    // Shift by the ground energy before exponentiating.
    const double e0 = eig.values.minCoeff();
    RealVector w = (-beta * (eig.values.array() - e0)).exp();
    w /= w.sum();
    return hermitian_part(eig.vectors * w.cast<cplx>().asDiagonal() * eig.vectors.adjoint());
}

} // namespace qsl
