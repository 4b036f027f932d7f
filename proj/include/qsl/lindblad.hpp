// lindblad.hpp: detailed-balance GKSL generator, Bohr-frequency resolved jumps,
// the diagonal/off-diagonal dissipator split and the effective Hamiltonian H_D.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qsl/operator.hpp"

namespace qsl {

namespace tol {
inline constexpr double bohr = 1e-9;            // grouping of energies and Bohr frequencies
inline constexpr double detailed_balance = 1e-9; // relative
inline constexpr double adjoint_pair = 1e-10;
} // namespace tol

struct RawJump {
    std::string label;
    Matrix op;
};

/// gamma_channel(omega).
struct RateEntry {
    std::string channel;
    double omega = 0.0;
    double gamma = 0.0;
};

/// L_{omega,alpha} together with its rate and the index of its (-omega, alpha) partner.
struct ResolvedJump {
    double omega = 0.0;
    std::size_t channel = 0;
    Matrix op;
    double gamma = 0.0;
    std::size_t reverse = 0;
};

/// Distinct Bohr frequencies eps_m - eps_n of h, ascending, grouped within tol::bohr.
std::vector<double> bohr_frequencies(const HermitianOperator& h);

/// Nonzero components sum_{eps_m - eps_n = omega} P_n L P_m, ascending in omega.
std::vector<std::pair<double, Matrix>> bohr_components(const HermitianOperator& h, const Matrix& l);

class LindbladModel {
public:
    const HermitianOperator& hamiltonian() const { return h_; }
    const std::vector<RawJump>& raw_jumps() const { return raw_; }
    const std::vector<RateEntry>& rates() const { return rates_; }
    double beta() const { return beta_; }
    const std::vector<ResolvedJump>& resolved_jumps() const { return jumps_; }
    const std::string& channel_label(std::size_t c) const { return raw_[c].label; }
    Eigen::Index dim() const { return h_.dim(); }

    /// Identifies the model that produced a ResolvedBasis or RateMatrix.
    std::uint64_t id() const { return id_; }

private:
    friend LindbladModel build_jump_decomposition(const HermitianOperator&, std::vector<RawJump>,
                                                  std::vector<RateEntry>, double);
    LindbladModel() = default;

    HermitianOperator h_;
    std::vector<RawJump> raw_;
    std::vector<RateEntry> rates_;
    double beta_ = 0.0;
    std::vector<ResolvedJump> jumps_;
    // gamma * L^dag L per resolved jump, cached for the anticommutator.
    std::vector<Matrix> decay_;
    std::uint64_t id_ = 0;

    friend Matrix dissipator_matrix(const LindbladModel&, const Matrix&);
};

/// Resolves each raw jump into Bohr-frequency components and validates rates.
///
/// A channel whose component at omega has no counterpart at -omega receives
/// L_{-omega} := L_omega^dag (so sigma_- yields the sigma_+ partner). Where both
/// components exist they must already be adjoint to each other, and omega = 0
/// components must be Hermitian. Every resolved (channel, omega) needs exactly
/// one rate entry; rates must satisfy gamma(-w) = gamma(w) exp(-beta w).
LindbladModel build_jump_decomposition(const HermitianOperator& h, std::vector<RawJump> raw_jumps,
                                       std::vector<RateEntry> rates, double beta);

/// D[rho] for an arbitrary (not necessarily validated) matrix.
Matrix dissipator_matrix(const LindbladModel& model, const Matrix& rho);

HermitianOperator dissipator(const LindbladModel& model, const SpectralState& state);

/// The state's eigenbasis with every degenerate eigenvalue block rotated to
/// diagonalize the projected dissipator, plus D[rho] expressed in that basis.
/// All basis-dependent quantities (split, H_D, rate matrix) consume this.
struct ResolvedBasis {
    SpectralState state;
    Matrix dissipator_in_basis;
    std::uint64_t model_id = 0;
};

ResolvedBasis resolve_basis(const LindbladModel& model, const SpectralState& state);

struct DissipatorSplit {
    HermitianOperator diagonal;      // D_d
    HermitianOperator off_diagonal;  // D_nd
};

DissipatorSplit dissipator_split(const LindbladModel& model, const ResolvedBasis& basis);
DissipatorSplit dissipator_split(const LindbladModel& model, const SpectralState& state);

/// H_D with -i[H_D, rho] = D_nd. Throws Degeneracy if D couples equal
/// eigenvalues after block rotation.
HermitianOperator effective_hamiltonian(const LindbladModel& model, const ResolvedBasis& basis);
HermitianOperator effective_hamiltonian(const LindbladModel& model, const SpectralState& state);

Matrix rhs_matrix(const LindbladModel& model, const Matrix& rho);

/// rho_dot = -i[H, rho] + D[rho].
HermitianOperator rhs(const LindbladModel& model, const SpectralState& state);

struct TrajectoryPoint {
    double t = 0.0;
    SpectralState state;
    HermitianOperator rho_dot;
};

struct TimeSpan {
    double t0 = 0.0;
    double t1 = 0.0;
};

struct EvolveOptions {
    std::size_t stride = 1;  // store every stride-th step (the first and last are always stored)
};

struct Trajectory {
    std::vector<TrajectoryPoint> points;
    double dt = 0.0;
    TimeSpan t_span;
    std::size_t steps = 0;
    std::size_t trace_renormalizations = 0;
};

/// Fixed-step RK4 of the master equation. rho is re-symmetrized after every step
/// and renormalized when |Tr rho - 1| > 1e-12. Throws PositivityLoss when an
/// eigenvalue drops below -1e-8 and Integration on non-finite values.
Trajectory evolve(const LindbladModel& model, const SpectralState& rho0, TimeSpan span, double dt,
                  EvolveOptions options = {});

} // namespace qsl
