// operator.hpp: dense Hermitian operators and spectrally decomposed density matrices.
//
// hbar = 1 throughout the library.

#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace qsl {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

namespace tol {
inline constexpr double hermitian_reject = 1e-8;  // max |(A - A^dag)/2| accepted at construction
inline constexpr double eigen_negative = 1e-10;   // density-matrix eigenvalue floor
inline constexpr double trace = 1e-9;
inline constexpr double sign_zero = 1e-12;
inline constexpr double degenerate = 1e-10;       // equal rho eigenvalues
} // namespace tol

/// Complex square matrix with Hermiticity enforced by (A + A^dag)/2.
///
/// Construction rejects non-finite entries and anti-Hermitian residuals above
/// tol::hermitian_reject.
class HermitianOperator {
public:
    HermitianOperator() = default;
    explicit HermitianOperator(const Matrix& m);

    static HermitianOperator zero(Eigen::Index dim);
    static HermitianOperator identity(Eigen::Index dim);
    static HermitianOperator diagonal(const RealVector& d);

    Eigen::Index dim() const { return m_.rows(); }
    const Matrix& matrix() const { return m_; }
    cplx operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

    double trace() const { return m_.trace().real(); }

    HermitianOperator operator+(const HermitianOperator& o) const;
    HermitianOperator operator-(const HermitianOperator& o) const;
    HermitianOperator operator*(double s) const;

private:
    struct Trusted {};
    HermitianOperator(Matrix m, Trusted) : m_(std::move(m)) {}
    friend HermitianOperator hermitian_part(const Matrix& m);

    Matrix m_;
};

inline HermitianOperator operator*(double s, const HermitianOperator& a) { return a * s; }

/// Hermitian part (A + A^dag)/2 without the rejection threshold.
HermitianOperator hermitian_part(const Matrix& m);

/// Max-entry norm.
double max_abs(const Matrix& m);

/// Eigenpairs with eigenvalues in descending order and orthonormal columns.
struct Eigenpairs {
    RealVector values;
    Matrix vectors;
};

/// Eigenvalues descending (stable with respect to the solver's ascending order
/// for ties), each eigenvector phased so its largest component is real positive.
Eigenpairs spectral_decompose(const HermitianOperator& op);

/// Density matrix together with its eigendecomposition rho = sum_n p_n |n><n|.
class SpectralState {
public:
    /// Validates the density-matrix invariants; negative_tolerance bounds how far
    /// below zero an eigenvalue may sit.
    explicit SpectralState(const HermitianOperator& rho,
                           double negative_tolerance = tol::eigen_negative);

    /// Same rho, with a caller-supplied orthonormal eigenbasis (used after
    /// rotating degenerate blocks). Reconstruction is re-validated.
    SpectralState with_basis(const Matrix& vectors) const;

    static SpectralState pure(const Eigen::VectorXcd& psi);

    Eigen::Index dim() const { return rho_.dim(); }
    const HermitianOperator& rho() const { return rho_; }
    const RealVector& eigenvalues() const { return values_; }
    const Matrix& eigenvectors() const { return vectors_; }

    /// V^dag A V: the operator's matrix elements in the eigenbasis.
    Matrix to_eigenbasis(const Matrix& a) const;
    Matrix from_eigenbasis(const Matrix& a) const;

    double purity() const;

private:
    SpectralState() = default;

    HermitianOperator rho_;
    RealVector values_;
    Matrix vectors_;
};

/// (1/2) sum_i |lambda_i|.
double trace_norm(const HermitianOperator& op);

double expectation(const SpectralState& state, const HermitianOperator& obs);

/// Tr[rho A^2] - Tr[rho A]^2, clamped at zero within 1e-12.
double variance(const SpectralState& state, const HermitianOperator& obs);

/// Same eigenvectors, eigenvalues mapped to sgn(lambda) with |lambda| < 1e-12 -> 0.
HermitianOperator sign_operator(const HermitianOperator& op);

/// ab - ba (anti-Hermitian for Hermitian inputs).
Matrix commutator(const HermitianOperator& a, const HermitianOperator& b);

/// -i[a, b], which is Hermitian.
HermitianOperator minus_i_commutator(const HermitianOperator& a, const HermitianOperator& b);

/// exp(-beta H) / Z.
HermitianOperator gibbs_state(const HermitianOperator& h, double beta);

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* where);

} // namespace qsl
