// Independent reference computations for the test suites. Nothing here calls
// into the library's spectral or Fisher code paths.

#pragma once

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;

inline const cplx I{0.0, 1.0};

inline Mat sigma_x() { Mat m(2, 2); m << 0, 1, 1, 0; return m; }
inline Mat sigma_y() { Mat m(2, 2); m << 0, -I, I, 0; return m; }
inline Mat sigma_z() { Mat m(2, 2); m << 1, 0, 0, -1; return m; }
inline Mat sigma_minus() { Mat m(2, 2); m << 0, 0, 1, 0; return m; }  // |g><e| with |e> = index 0
inline Mat sigma_plus() { return sigma_minus().adjoint(); }

inline Mat rho0() {
    Mat m(2, 2);
    m << 0.7, cplx(0.2, 0.1), cplx(0.2, -0.1), 0.3;
    return m;
}

inline Mat two_level_h() {
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = 0.5;
    m(1, 1) = -0.5;
    return m;
}

inline constexpr double gamma_down = 2.0;  // gamma0 omega0 (N + 1)
inline constexpr double gamma_up = 1.5;    // gamma0 omega0 N

/// D[rho] = sum gamma (L rho L^dag - {L^dag L, rho}/2) with sigma_- at gamma_down
/// and sigma_+ at gamma_up, written out by hand.
inline Mat two_level_dissipator(const Mat& rho) {
    auto term = [&](const Mat& l, double g) {
        return (g * (l * rho * l.adjoint() - 0.5 * (l.adjoint() * l * rho + rho * l.adjoint() * l))).eval();
    };
    return term(sigma_minus(), gamma_down) + term(sigma_plus(), gamma_up);
}

inline Mat two_level_rhs(const Mat& rho) {
    const Mat h = two_level_h();
    return -I * (h * rho - rho * h) + two_level_dissipator(rho);
}

/// 2x2 Hermitian eigenvalues from the characteristic polynomial, descending.
inline std::pair<double, double> qubit_eigenvalues(const Mat& m) {
    const double a = m(0, 0).real(), d = m(1, 1).real();
    const double mid = 0.5 * (a + d);
    const double rad = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(m(0, 1)));
    return {mid + rad, mid - rad};
}

/// Bloch-vector form of the qubit SLD Fisher information under H = n.sigma / 2:
/// F = |r x n|^2.
inline double qubit_sld_fisher(const Mat& rho, const Eigen::Vector3d& n) {
    const Eigen::Vector3d r{2.0 * rho(0, 1).real(), -2.0 * rho(0, 1).imag(), (rho(0, 0) - rho(1, 1)).real()};
    return n.squaredNorm() * r.squaredNorm() - std::pow(r.dot(n), 2);
}

/// SLD Fisher information from the Lyapunov equation rho L + L rho = 2 rho_dot,
/// solved by vectorization; F = Tr[rho L^2]. Requires full-rank rho.
inline double lyapunov_fisher(const Mat& rho, const Mat& rho_dot) {
    const Eigen::Index d = rho.rows();
    const Mat id = Mat::Identity(d, d);
    Mat k = Mat::Zero(d * d, d * d);
    // column-major vec: vec(A X B) = (B^T kron A) vec(X)
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) {
            k.block(i * d, j * d, d, d) += id(j, i) * rho;
            k.block(i * d, j * d, d, d) += rho(j, i) * id;
        }
    Eigen::VectorXcd rhs = 2.0 * Eigen::Map<const Eigen::VectorXcd>(rho_dot.data(), d * d);
    Eigen::VectorXcd x = k.fullPivLu().solve(rhs);
    const Mat l = Eigen::Map<Mat>(x.data(), d, d);
    return (rho * l * l).trace().real();
}

inline double variance(const Mat& rho, const Mat& a) {
    const double mean = (rho * a).trace().real();
    return (rho * a * a).trace().real() - mean * mean;
}

inline Mat commutator_flow(const Mat& h, const Mat& rho) {  // -i[H, rho]
    return -I * (h * rho - rho * h);
}

inline Mat random_hermitian(Eigen::Index d, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> n;
    Mat g(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) g(i, j) = cplx(n(rng), n(rng));
    return scale * 0.5 * (g + g.adjoint());
}

/// Full-rank density matrix G G^dag / Tr, optionally mixed towards I/d.
inline Mat random_state(Eigen::Index d, std::mt19937_64& rng, double mix = 0.0) {
    std::normal_distribution<double> n;
    Mat g(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) g(i, j) = cplx(n(rng), n(rng));
    Mat r = g * g.adjoint();
    r /= r.trace().real();
    r = (1.0 - mix) * r + mix * Mat::Identity(d, d) / static_cast<double>(d);
    return 0.5 * (r + r.adjoint());
}

inline Eigen::VectorXcd random_pure(Eigen::Index d, std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    Eigen::VectorXcd v(d);
    for (Eigen::Index i = 0; i < d; ++i) v(i) = cplx(n(rng), n(rng));
    return v.normalized();
}

inline double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace oracle
