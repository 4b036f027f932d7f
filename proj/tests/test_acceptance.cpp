// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qsl/bounds.hpp"
#include "qsl/ensemble.hpp"
#include "qsl/fisher.hpp"
#include "qsl/runner.hpp"
#include "qsl/scenario.hpp"

using namespace qsl;
namespace o = oracle;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string detail;
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

SpectralState state_of(const Matrix& m) { return SpectralState(HermitianOperator(m)); }

// Shared by criteria 1-3 and 9.
struct PresetRun {
    std::vector<BoundReport> reports;
    std::size_t violations = 0;
    double seconds = 0.0;
    Matrix final_rho;
};

const PresetRun& preset_run() {
    static const PresetRun run = [] {
        PresetRun r;
        const Scenario s = preset_two_level();
        const auto t0 = Clock::now();
        RunResult res = run_scenario(s);
        r.seconds = seconds_since(t0);
        r.reports = std::move(res.reports);
        r.violations = res.summary.chain_violations;
        const Trajectory traj = evolve(build_model(s), initial_state(s), s.t_span, s.dt, EvolveOptions{s.stride});
        r.final_rho = traj.points.back().state.rho().matrix();
        return r;
    }();
    return run;
}

constexpr double kSlack = 1e-9;

Outcome criterion_1() {
    const auto& run = preset_run();
    std::size_t bad = 0;
    for (const auto& r : run.reports) {
        const bool ordered = r.speed_tr <= r.current_xprime + kSlack && r.current_xprime <= r.qfi + kSlack &&
                             r.qfi <= r.vs + kSlack && r.vs <= r.fss + kSlack;
        if (!ordered || r.divergent()) ++bad;
    }
    Outcome out;
    out.pass = bad == 0 && run.violations == 0 && run.reports.size() == 501 && run.seconds < 5.0 &&
               std::abs(run.reports.back().time - 5.0) < 1e-9;
    out.detail = fmt("%zu sampled points over [0, 5], %zu chain violations, %.3f s", run.reports.size(),
                     bad + run.violations, run.seconds);
    return out;
}

Outcome criterion_2() {
    const auto& run = preset_run();
    std::size_t fisher_below = 0, entropy_below = 0, sum_fails = 0;
    for (const auto& r : run.reports) {
        if (r.fisher_term_qfi < r.speed_tr) ++fisher_below;
        if (r.entropy_term_qfi < r.speed_tr) ++entropy_below;
        if (r.fisher_term_qfi + r.entropy_term_qfi < r.speed_tr - kSlack) ++sum_fails;
    }
    Outcome out;
    out.pass = fisher_below > 0 && entropy_below > 0 && sum_fails == 0;
    out.detail = fmt("Fisher term < speed at %zu points, entropy term < speed at %zu points, sum fails at %zu",
                     fisher_below, entropy_below, sum_fails);
    return out;
}

Outcome criterion_3() {
    const auto& run = preset_run();
    const auto& first = run.reports.front();
    const auto& last = run.reports.back();
    const double dpe = std::abs(run.final_rho(0, 0).real() - 3.0 / 7.0);
    const double dpg = std::abs(run.final_rho(1, 1).real() - 4.0 / 7.0);
    const double terms[] = {last.entropy_term_fss, last.entropy_term_vs, last.entropy_term_qfi};
    const double initial[] = {first.entropy_term_fss, first.entropy_term_vs, first.entropy_term_qfi};
    bool vanish = true;
    for (int k = 0; k < 3; ++k) vanish = vanish && terms[k] < 1e-3 && terms[k] < 1e-2 * initial[k];
    Outcome out;
    out.pass = dpe < 1e-4 && dpg < 1e-4 && last.sigma_dot < 1e-6 && last.sigma_dot >= 0.0 && vanish;
    out.detail = fmt("|dp| = (%.2e, %.2e), sigma_dot(5) = %.2e, entropy terms(5) fss %.2e vs %.2e qfi %.2e", dpe, dpg,
                     last.sigma_dot, terms[0], terms[1], terms[2]);
    return out;
}

Outcome criterion_4() {
    const Scenario s = preset_two_level();
    const double beta = s.effective_beta();
    const bool beta_ok = std::round(beta * 1000.0) / 1000.0 == 0.288 && std::abs(beta - std::log(4.0 / 3.0)) < 1e-9;

    const SpectralState r0 = initial_state(s);
    const auto [l1, l2] = o::qubit_eigenvalues(o::rho0());
    const double eig_err = std::max(std::abs(r0.eigenvalues()(0) - l1), std::abs(r0.eigenvalues()(1) - l2));
    const bool eig_ok = eig_err < 1e-9 && std::abs(l1 - 0.8) < 1e-9 && std::abs(l2 - 0.2) < 1e-9;

    const HermitianOperator hz(0.5 * o::sigma_z());
    const double f = sld_fisher(r0, hz);
    const double f_bloch = o::qubit_sld_fisher(o::rho0(), {0, 0, 1});
    const double f_lyap = o::lyapunov_fisher(o::rho0(), o::commutator_flow(hz.matrix(), o::rho0()));
    const bool f_ok = std::abs(f - 0.2) < 1e-9 && std::abs(f - f_bloch) < 1e-9 && std::abs(f - f_lyap) < 1e-9;

    const LindbladModel m = build_model(s);
    Matrix closed(2, 2);
    closed << -0.95, o::cplx(-0.35, -0.175), o::cplx(-0.35, 0.175), 0.95;
    const Matrix d = dissipator(m, r0).matrix();
    const double d_err = std::max(o::max_abs(d - closed), o::max_abs(d - o::two_level_dissipator(o::rho0())));

    Outcome out;
    out.pass = beta_ok && eig_ok && f_ok && d_err < 1e-9;
    out.detail = fmt("beta*omega0 = %.6f, eigenvalues err %.1e, F = %.12f, D[rho0] err %.1e", beta, eig_err, f, d_err);
    return out;
}

// Criteria 5 and 9 share these random runs.
struct RandomRuns {
    std::size_t models = 0, points = 0, negative = 0, form_mismatch = 0, mobility_order = 0, prior_order = 0;
    double min_sigma = INFINITY, max_gap = 0.0;
};

const RandomRuns& random_runs() {
    static const RandomRuns runs = [] {
        RandomRuns rr;
        for (int k = 0; k < 100; ++k) {
            std::mt19937_64 rng(1000 + static_cast<std::uint64_t>(k));
            Scenario s = random_detailed_balance_model(2 + k % 3, rng);
            s.t_span = {0.0, 1.0};
            s.stride = 50;
            const RunResult res = run_scenario(s);
            ++rr.models;
            for (const auto& r : res.reports) {
                ++rr.points;
                rr.min_sigma = std::min(rr.min_sigma, r.sigma_dot);
                if (r.sigma_dot < -1e-10) ++rr.negative;
                if (std::isfinite(r.sigma_dot) && std::isfinite(r.sigma_dot_flux_form)) {
                    const double gap = std::abs(r.sigma_dot - r.sigma_dot_flux_form);
                    rr.max_gap = std::max(rr.max_gap, gap);
                    if (gap >= 1e-6) ++rr.form_mismatch;
                }
                if (!(r.mobility_mprime <= r.mobility_m + kSlack && r.mobility_m <= r.activity + kSlack))
                    ++rr.mobility_order;
                if (!(r.vs <= r.fss + kSlack)) ++rr.prior_order;
            }
        }
        return rr;
    }();
    return runs;
}

Outcome criterion_5() {
    const auto& rr = random_runs();
    Outcome out;
    out.pass = rr.models == 100 && rr.negative == 0 && rr.form_mismatch == 0;
    out.detail = fmt("%zu models (dims 2-4), %zu points, min sigma_dot %.3e, max |form gap| %.2e", rr.models, rr.points,
                     rr.min_sigma, rr.max_gap);
    return out;
}

Outcome criterion_6() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(6006);
    std::size_t fails = 0, oracle_fails = 0;
    double worst = -INFINITY;
    for (int k = 0; k < 10000; ++k) {
        const Matrix rho = o::random_state(2, rng, 0.05);
        const Matrix h = o::random_hermitian(2, rng);
        const Matrix a = o::random_hermitian(2, rng);
        const CramerRao c = cramer_rao_check(sld_metric(), state_of(rho), HermitianOperator(h), HermitianOperator(a));
        worst = std::max(worst, c.lhs - c.rhs);
        if (c.lhs > c.rhs + kSlack) ++fails;
        if (k % 10 == 0) {
            // Independent evaluation of both sides.
            const Matrix rd = o::commutator_flow(h, rho);
            const double lhs = std::abs((a * rd).trace().real());
            const double rhs = std::sqrt(o::lyapunov_fisher(rho, rd)) * std::sqrt(o::variance(rho, a));
            if (std::abs(lhs - c.lhs) > 1e-9 || std::abs(rhs - c.rhs) > 1e-8 * std::max(1.0, rhs)) ++oracle_fails;
        }
    }
    const double secs = seconds_since(t0);
    Outcome out;
    out.pass = fails == 0 && oracle_fails == 0 && secs < 30.0;
    out.detail = fmt("10^4 qubit triples, %zu violations, %zu oracle mismatches, max(lhs - rhs) = %.2e, %.2f s", fails,
                     oracle_fails, worst, secs);
    return out;
}

Outcome criterion_7() {
    std::mt19937_64 rng(7007);
    std::size_t f1 = 0, f2 = 0, f3 = 0, f4 = 0;
    auto quantum = [](const Matrix& rho, const Matrix& h) { return 0.25 * sld_fisher(state_of(rho), HermitianOperator(h)); };
    for (int k = 0; k < 1000; ++k) {
        const Eigen::Index d = 2 + k % 3;
        const Matrix h = o::random_hermitian(d, rng);

        const Matrix rho = o::random_state(d, rng);
        const double q = quantum(rho, h);
        if (!(q >= 0.0 && q <= o::variance(rho, h) + 1e-12)) ++f1;

        const Eigen::VectorXcd psi = o::random_pure(d, rng);
        const SpectralState pure = SpectralState::pure(psi);
        const double qp = 0.25 * sld_fisher(pure, HermitianOperator(h));
        if (std::abs(qp - o::variance(pure.rho().matrix(), h)) >= 1e-9) ++f2;

        Eigen::SelfAdjointEigenSolver<Matrix> es(h);
        std::uniform_real_distribution<double> u(0.05, 1.0);
        Eigen::VectorXd p(d);
        for (Eigen::Index i = 0; i < d; ++i) p(i) = u(rng);
        p /= p.sum();
        Matrix commuting = es.eigenvectors() * p.cast<o::cplx>().asDiagonal() * es.eigenvectors().adjoint();
        commuting = 0.5 * (commuting + commuting.adjoint());
        if (quantum(commuting, h) >= 1e-12) ++f3;

        const int parts = 2 + k % 3;
        std::vector<double> w(parts);
        double wsum = 0.0;
        for (auto& x : w) wsum += (x = u(rng));
        Matrix mix = Matrix::Zero(d, d);
        double rhs = 0.0;
        for (int j = 0; j < parts; ++j) {
            const Matrix rj = o::random_state(d, rng);
            mix += (w[j] / wsum) * rj;
            rhs += (w[j] / wsum) * quantum(rj, h);
        }
        mix = 0.5 * (mix + mix.adjoint());
        if (quantum(mix, h) > rhs + 1e-9) ++f4;
    }
    Outcome out;
    out.pass = f1 == 0 && f2 == 0 && f3 == 0 && f4 == 0;
    out.detail = fmt("10^3 instances each, dims 2-4: bounded %zu, pure %zu, commuting %zu, convexity %zu failures", f1, f2,
                     f3, f4);
    return out;
}

Outcome criterion_8() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(8008);
    std::size_t below = 0, far = 0;
    double worst_rel = 0.0;
    for (int k = 0; k < 50; ++k) {
        const Matrix rho = o::random_state(2, rng, 0.1);
        const Matrix h = o::random_hermitian(2, rng);
        const double quarter_f = 0.25 * o::lyapunov_fisher(rho, o::commutator_flow(h, rho));
        bool under = false;
        EnsembleOptions opts;
        opts.seed = 0x5eed + static_cast<std::uint64_t>(k);
        opts.on_evaluate = [&](double v) { under = under || v < quarter_f - 1e-9; };
        const EnsembleResult r = min_ensemble_variance(state_of(rho), HermitianOperator(h), opts);
        if (under || r.value < quarter_f - 1e-9) ++below;
        const double rel = std::abs(r.value - quarter_f) / quarter_f;
        worst_rel = std::max(worst_rel, rel);
        if (rel > 1e-3) ++far;
    }
    const double secs = seconds_since(t0);
    Outcome out;
    out.pass = below == 0 && far == 0 && secs < 60.0;
    out.detail = fmt("50 qubit pairs: %zu below F/4, %zu beyond 1e-3 relative (worst %.2e), %.2f s", below, far,
                     worst_rel, secs);
    return out;
}

Outcome criterion_9() {
    const auto& run = preset_run();
    std::size_t bad = 0;
    for (const auto& r : run.reports)
        if (!(r.mobility_mprime <= r.mobility_m + kSlack && r.mobility_m <= r.activity + kSlack &&
              r.vs <= r.fss + kSlack))
            ++bad;
    const auto& rr = random_runs();
    Outcome out;
    out.pass = bad == 0 && rr.mobility_order == 0 && rr.prior_order == 0;
    out.detail = fmt("preset: %zu of %zu points out of order; random runs: %zu (M' <= M <= A), %zu (VS <= FSS) of %zu",
                     bad, run.reports.size(), rr.mobility_order, rr.prior_order, rr.points);
    return out;
}

Outcome criterion_10() {
    const auto dir = std::filesystem::temp_directory_path() / "qsl_acceptance";
    std::filesystem::create_directories(dir);
    SweepConfig cfg;
    cfg.dims = {2, 3};
    cfg.count = 10;
    cfg.seed = 2024;
    const auto a = dir / "sweep_a.csv", b = dir / "sweep_b.csv";
    cfg.threads = 1;
    const SweepSummary sa = sweep_and_emit(cfg, a);
    cfg.threads = 0;
    sweep_and_emit(cfg, b);
    auto slurp = [](const std::filesystem::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    };
    const std::string ca = slurp(a), cb = slurp(b);
    Outcome out;
    out.pass = !ca.empty() && ca == cb && sa.ok();
    out.detail = fmt("%zu models, %zu bytes, identical = %s", sa.models, ca.size(), ca == cb ? "yes" : "no");
    return out;
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"two-level chain over [0, 5]", criterion_1},
        {"individual terms fail, their sum bounds", criterion_2},
        {"stationarity", criterion_3},
        {"golden values", criterion_4},
        {"second law and dual forms", criterion_5},
        {"Cramer-Rao suite", criterion_6},
        {"quantum-uncertainty criteria suite", criterion_7},
        {"minimal-ensemble oracle", criterion_8},
        {"ordering of prior bounds", criterion_9},
        {"sweep determinism", criterion_10},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome out;
        try {
            out = criteria[k].second();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        if (!out.pass) ++failed;
        std::printf("%s [%zu] %s: %s\n", out.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, out.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
