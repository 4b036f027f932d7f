#include "qsl/lindblad.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <sstream>

#include "qsl/error.hpp"

namespace qsl {

namespace {

struct Level {
    double energy;
    Matrix projector;
};

std::vector<Level> energy_levels(const HermitianOperator& h) {
    const auto eig = spectral_decompose(h);
    std::vector<Level> levels;
    Eigen::Index start = 0;
    const Eigen::Index n = eig.values.size();
    for (Eigen::Index k = 1; k <= n; ++k) {
        if (k == n || std::abs(eig.values(k) - eig.values(k - 1)) > tol::bohr) {
            const Eigen::Index len = k - start;
            const auto block = eig.vectors.middleCols(start, len);
            levels.push_back({eig.values.segment(start, len).mean(), block * block.adjoint()});
            start = k;
        }
    }
    return levels;
}

// Cluster sorted values whose consecutive gaps are within tol; returns cluster means.
std::vector<double> cluster(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    std::vector<double> out;
    std::size_t start = 0;
    for (std::size_t k = 1; k <= values.size(); ++k) {
        if (k == values.size() || values[k] - values[k - 1] > tol::bohr) {
            double s = 0.0;
            for (std::size_t i = start; i < k; ++i) s += values[i];
            out.push_back(s / static_cast<double>(k - start));
            start = k;
        }
    }
    return out;
}

std::size_t find_frequency(const std::vector<double>& freqs, double w) {
    for (std::size_t i = 0; i < freqs.size(); ++i)
        if (std::abs(freqs[i] - w) <= tol::bohr) return i;
    return freqs.size();
}

// Nearest slot; gaps between distinct frequencies exceed tol::bohr by construction.
std::size_t nearest_frequency(const std::vector<double>& freqs, double w) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < freqs.size(); ++i)
        if (std::abs(freqs[i] - w) < std::abs(freqs[best] - w)) best = i;
    return best;
}

std::vector<double> bohr_from_levels(const std::vector<Level>& levels) {
    std::vector<double> all;
    for (const auto& m : levels)
        for (const auto& n : levels) all.push_back(m.energy - n.energy);
    auto freqs = cluster(std::move(all));
    // Keep the set exactly antisymmetric so +w and -w pair up by value.
    for (std::size_t i = 0; i < freqs.size() / 2; ++i) {
        const std::size_t j = freqs.size() - 1 - i;
        const double w = 0.5 * (freqs[j] - freqs[i]);
        freqs[i] = -w;
        freqs[j] = w;
    }
    if (freqs.size() % 2 == 1) freqs[freqs.size() / 2] = 0.0;
    return freqs;
}

double component_threshold(const Matrix& l) {
    return 1e-14 * std::max(1.0, max_abs(l));
}

std::uint64_t next_model_id() {
    static std::atomic<std::uint64_t> counter{1};
    return counter.fetch_add(1);
}

std::string describe(const std::string& label, double w) {
    std::ostringstream os;
    os << "(channel '" << label << "', omega " << w << ")";
    return os.str();
}

} // namespace

std::vector<double> bohr_frequencies(const HermitianOperator& h) {
    return bohr_from_levels(energy_levels(h));
}

std::vector<std::pair<double, Matrix>> bohr_components(const HermitianOperator& h, const Matrix& l) {
    require_same_dim(h.dim(), l.rows(), "bohr_components");
    require_same_dim(l.rows(), l.cols(), "bohr_components");
    const auto levels = energy_levels(h);
    const auto freqs = bohr_from_levels(levels);
    std::vector<Matrix> acc(freqs.size(), Matrix::Zero(h.dim(), h.dim()));
    for (const auto& m : levels)
        for (const auto& n : levels) {
            const std::size_t k = nearest_frequency(freqs, m.energy - n.energy);
            acc[k] += n.projector * l * m.projector;
        }
    std::vector<std::pair<double, Matrix>> out;
    const double thr = component_threshold(l);
    for (std::size_t k = 0; k < freqs.size(); ++k)
        if (max_abs(acc[k]) > thr) out.emplace_back(freqs[k], std::move(acc[k]));
    return out;
}

LindbladModel build_jump_decomposition(const HermitianOperator& h, std::vector<RawJump> raw_jumps,
                                       std::vector<RateEntry> rates, double beta) {
    if (!std::isfinite(beta)) throw Error(ErrorCode::ModelConstruction, "beta must be finite");
    LindbladModel model;
    model.h_ = h;
    model.beta_ = beta;
    model.id_ = next_model_id();

    const auto levels = energy_levels(h);
    const auto freqs = bohr_from_levels(levels);

    std::map<std::string, std::size_t> channel_of;
    for (std::size_t c = 0; c < raw_jumps.size(); ++c) {
        const auto& rj = raw_jumps[c];
        require_same_dim(rj.op.rows(), h.dim(), "jump operator");
        require_same_dim(rj.op.cols(), h.dim(), "jump operator");
        if (!rj.op.allFinite())
            throw Error(ErrorCode::Input, "jump operator '" + rj.label + "' has non-finite entries");
        if (!channel_of.emplace(rj.label, c).second)
            throw Error(ErrorCode::ModelConstruction, "duplicate jump label '" + rj.label + "'");
    }

    // Validate the rate table and index it by (channel, frequency slot).
    std::map<std::pair<std::size_t, std::size_t>, double> rate_of;
    for (const auto& r : rates) {
        auto it = channel_of.find(r.channel);
        if (it == channel_of.end())
            throw Error(ErrorCode::ModelConstruction, "rate for unknown channel '" + r.channel + "'");
        if (!std::isfinite(r.gamma) || r.gamma < 0.0)
            throw Error(ErrorCode::ModelConstruction,
                        "rate " + describe(r.channel, r.omega) + " must be finite and non-negative");
        const std::size_t slot = find_frequency(freqs, r.omega);
        if (slot == freqs.size())
            throw Error(ErrorCode::ModelConstruction,
                        "rate " + describe(r.channel, r.omega) + " matches no Bohr frequency");
        if (!rate_of.emplace(std::make_pair(it->second, slot), r.gamma).second)
            throw Error(ErrorCode::ModelConstruction, "duplicate rate " + describe(r.channel, r.omega));
    }

    for (std::size_t c = 0; c < raw_jumps.size(); ++c) {
        const auto& label = raw_jumps[c].label;
        std::vector<Matrix> comp(freqs.size(), Matrix::Zero(h.dim(), h.dim()));
        for (const auto& m : levels)
            for (const auto& n : levels)
                comp[nearest_frequency(freqs, m.energy - n.energy)] +=
                    n.projector * raw_jumps[c].op * m.projector;
        const double thr = component_threshold(raw_jumps[c].op);
        std::vector<bool> present(freqs.size());
        for (std::size_t k = 0; k < freqs.size(); ++k) present[k] = max_abs(comp[k]) > thr;

        // Close the channel under adjoint: L_{-w} = L_w^dag.
        for (std::size_t k = 0; k < freqs.size(); ++k) {
            const std::size_t r = freqs.size() - 1 - k;  // slot of -w
            if (!present[k]) continue;
            if (r == k) {
                if (max_abs(comp[k] - comp[k].adjoint()) > tol::adjoint_pair * std::max(1.0, max_abs(comp[k])))
                    throw Error(ErrorCode::ModelConstruction,
                                "omega = 0 component of channel '" + label +
                                    "' is not Hermitian; split it into Hermitian channels");
                continue;
            }
            if (!present[r]) {
                comp[r] = comp[k].adjoint();
                present[r] = true;
            } else if (max_abs(comp[r] - comp[k].adjoint()) >
                       tol::adjoint_pair * std::max(1.0, max_abs(comp[k]))) {
                throw Error(ErrorCode::ModelConstruction,
                            "components " + describe(label, freqs[k]) +
                                " and its reverse are not adjoint; L_{w}^dag must equal L_{-w}");
            }
        }

        std::map<std::size_t, std::size_t> index_of_slot;
        for (std::size_t k = 0; k < freqs.size(); ++k) {
            if (!present[k]) continue;
            auto it = rate_of.find({c, k});
            if (it == rate_of.end())
                throw Error(ErrorCode::ModelConstruction, "missing rate " + describe(label, freqs[k]));
            index_of_slot[k] = model.jumps_.size();
            model.jumps_.push_back({freqs[k], c, comp[k], it->second, 0});
        }
        for (auto& [slot, idx] : index_of_slot)
            model.jumps_[idx].reverse = index_of_slot.at(freqs.size() - 1 - slot);

        // Detailed balance gamma(-w) = gamma(w) exp(-beta w) for w > 0.
        for (auto& [slot, idx] : index_of_slot) {
            const auto& j = model.jumps_[idx];
            if (j.omega <= 0.0) continue;
            const double expected = j.gamma * std::exp(-beta * j.omega);
            const double actual = model.jumps_[j.reverse].gamma;
            const double residual = std::abs(actual - expected);
            if (residual > tol::detailed_balance * std::max(std::abs(actual), std::abs(expected))) {
                std::ostringstream os;
                os << "detailed balance violated for " << describe(label, j.omega)
                   << ": gamma(-w) = " << actual << ", gamma(w) exp(-beta w) = " << expected
                   << ", residual " << residual;
                throw Error(ErrorCode::DetailedBalance, os.str());
            }
        }
    }

    for (const auto& j : model.jumps_) model.decay_.push_back(j.gamma * (j.op.adjoint() * j.op));
    model.raw_ = std::move(raw_jumps);
    model.rates_ = std::move(rates);
    return model;
}

Matrix dissipator_matrix(const LindbladModel& model, const Matrix& rho) {
    require_same_dim(model.dim(), rho.rows(), "dissipator");
    Matrix d = Matrix::Zero(rho.rows(), rho.cols());
    for (std::size_t k = 0; k < model.jumps_.size(); ++k) {
        const auto& j = model.jumps_[k];
        if (j.gamma == 0.0) continue;
        d.noalias() += j.gamma * (j.op * rho * j.op.adjoint());
        d.noalias() -= 0.5 * (model.decay_[k] * rho + rho * model.decay_[k]);
    }
    return d;
}

HermitianOperator dissipator(const LindbladModel& model, const SpectralState& state) {
    return hermitian_part(dissipator_matrix(model, state.rho().matrix()));
}

ResolvedBasis resolve_basis(const LindbladModel& model, const SpectralState& state) {
    require_same_dim(model.dim(), state.dim(), "resolve_basis");
    const Matrix d = dissipator_matrix(model, state.rho().matrix());
    Matrix v = state.eigenvectors();
    const RealVector& p = state.eigenvalues();
    const Eigen::Index n = p.size();

    bool rotated = false;
    Eigen::Index start = 0;
    for (Eigen::Index k = 1; k <= n; ++k) {
        if (k < n && std::abs(p(k) - p(k - 1)) < tol::degenerate) continue;
        const Eigen::Index len = k - start;
        if (len > 1) {
            const Matrix block_v = v.middleCols(start, len);
            const Matrix block_d = block_v.adjoint() * d * block_v;
            const auto eig = spectral_decompose(hermitian_part(block_d));
            v.middleCols(start, len) = block_v * eig.vectors;
            rotated = true;
        }
        start = k;
    }

    ResolvedBasis out{rotated ? state.with_basis(v) : state, Matrix(), model.id()};
    out.dissipator_in_basis = v.adjoint() * d * v;
    return out;
}

namespace {

void require_basis_for(const LindbladModel& model, const ResolvedBasis& basis) {
    if (basis.model_id != model.id())
        throw Error(ErrorCode::Contract, "eigenbasis was resolved for a different model");
}

} // namespace

DissipatorSplit dissipator_split(const LindbladModel& model, const ResolvedBasis& basis) {
    require_basis_for(model, basis);
    const Matrix& db = basis.dissipator_in_basis;
    Matrix diag = Matrix::Zero(db.rows(), db.cols());
    diag.diagonal() = db.diagonal();
    Matrix off = db - diag;
    return {hermitian_part(basis.state.from_eigenbasis(diag)),
            hermitian_part(basis.state.from_eigenbasis(off))};
}

DissipatorSplit dissipator_split(const LindbladModel& model, const SpectralState& state) {
    return dissipator_split(model, resolve_basis(model, state));
}

HermitianOperator effective_hamiltonian(const LindbladModel& model, const ResolvedBasis& basis) {
    require_basis_for(model, basis);
    const Matrix& db = basis.dissipator_in_basis;
    const RealVector& p = basis.state.eigenvalues();
    const Eigen::Index n = p.size();
    Matrix hd = Matrix::Zero(n, n);
    for (Eigen::Index m = 0; m < n; ++m) {
        for (Eigen::Index k = 0; k < n; ++k) {
            if (m == k) continue;
            const double gap = p(k) - p(m);
            if (std::abs(gap) < tol::degenerate) {
                if (std::abs(db(m, k)) > 1e-8) {
                    std::ostringstream os;
                    os << "dissipator element " << std::abs(db(m, k)) << " couples equal eigenvalues "
                       << p(m) << " and " << p(k) << "; no commutator can produce it";
                    throw Error(ErrorCode::Degeneracy, os.str());
                }
                continue;
            }
            hd(m, k) = cplx(0.0, 1.0) * db(m, k) / gap;
        }
    }
    return hermitian_part(basis.state.from_eigenbasis(hd));
}

HermitianOperator effective_hamiltonian(const LindbladModel& model, const SpectralState& state) {
    return effective_hamiltonian(model, resolve_basis(model, state));
}

Matrix rhs_matrix(const LindbladModel& model, const Matrix& rho) {
    const Matrix& h = model.hamiltonian().matrix();
    return cplx(0.0, -1.0) * (h * rho - rho * h) + dissipator_matrix(model, rho);
}

HermitianOperator rhs(const LindbladModel& model, const SpectralState& state) {
    require_same_dim(model.dim(), state.dim(), "rhs");
    return hermitian_part(rhs_matrix(model, state.rho().matrix()));
}

Trajectory evolve(const LindbladModel& model, const SpectralState& rho0, TimeSpan span, double dt,
                  EvolveOptions options) {
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw Error(ErrorCode::Input, "dt must be positive and finite");
    if (!(span.t1 > span.t0)) throw Error(ErrorCode::Input, "t_span must be nonempty");
    if (options.stride == 0) throw Error(ErrorCode::Input, "stride must be >= 1");
    require_same_dim(model.dim(), rho0.dim(), "evolve");

    Trajectory traj;
    traj.dt = dt;
    traj.t_span = span;
    traj.steps = static_cast<std::size_t>(std::floor((span.t1 - span.t0) / dt + 1e-9));

    Matrix rho = rho0.rho().matrix();
    auto record = [&](std::size_t step, const SpectralState& s) {
        const double t = span.t0 + static_cast<double>(step) * dt;
        traj.points.push_back({t, s, rhs(model, s)});
    };
    record(0, rho0);

    for (std::size_t step = 1; step <= traj.steps; ++step) {
        const Matrix k1 = rhs_matrix(model, rho);
        const Matrix k2 = rhs_matrix(model, rho + 0.5 * dt * k1);
        const Matrix k3 = rhs_matrix(model, rho + 0.5 * dt * k2);
        const Matrix k4 = rhs_matrix(model, rho + dt * k3);
        rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        rho = 0.5 * (rho + rho.adjoint()).eval();

        const double t = span.t0 + static_cast<double>(step) * dt;
        if (!rho.allFinite()) {
            std::ostringstream os;
            os << "non-finite density matrix at t = " << t;
            throw Error(ErrorCode::Integration, os.str());
        }
        const double tr = rho.trace().real();
        if (std::abs(tr - 1.0) > 1e-12) {
            rho /= tr;
            ++traj.trace_renormalizations;
        }

        const HermitianOperator h_rho = hermitian_part(rho);
        const auto eig = spectral_decompose(h_rho);
        if (eig.values.minCoeff() < -1e-8) {
            std::ostringstream os;
            os << "eigenvalue " << eig.values.minCoeff() << " < -1e-8 at t = " << t
               << "; reduce dt (currently " << dt << ")";
            throw Error(ErrorCode::PositivityLoss, os.str());
        }
        if (step % options.stride == 0 || step == traj.steps) record(step, SpectralState(h_rho, 1e-8));
    }
    return traj;
}

} // namespace qsl
