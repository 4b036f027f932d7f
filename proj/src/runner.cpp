#include "qsl/runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "qsl/error.hpp"
#include "qsl/lindblad.hpp"

namespace qsl {

using json = nlohmann::ordered_json;

namespace {

constexpr double kSpeedFloor = 1e-12;
constexpr std::size_t kKeptMessages = 5;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void widen(RatioRange& r, double v, bool first) {
    if (first) {
        r = {v, v};
    } else {
        r.min = std::min(r.min, v);
        r.max = std::max(r.max, v);
    }
}

double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// JSON has no infinity; non-finite values are written as strings.
json number_json(double v) {
    if (std::isfinite(v)) return v;
    return format_number(v);
}

json ratio_json(const RatioRange& r) {
    return json{{"min", number_json(r.min)}, {"max", number_json(r.max)}};
}

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

Matrix ginibre(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = cplx(normal(rng), normal(rng));
    return m;
}

Matrix random_hermitian(Eigen::Index dim, std::mt19937_64& rng) {
    const Matrix g = ginibre(dim, dim, rng);
    return 0.5 * (g + g.adjoint());
}

} // namespace

const std::vector<std::string>& csv_columns() {
    static const std::vector<std::string> cols{
        "t",           "speed_tr",   "fss",        "vs",         "qfi",
        "current_xprime", "fisher_term_qfi", "entropy_term_qfi", "sigma_dot", "activity",
        "mobility_m",  "mobility_mprime", "heat_flux", "entropy_flux", "purity"};
    return cols;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_csv_header(std::ostream& out) {
    const auto& cols = csv_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
}

void write_csv_row(std::ostream& out, const BoundReport& r) {
    const double values[] = {r.time,           r.speed_tr,         r.fss,          r.vs,
                             r.qfi,            r.current_xprime,   r.fisher_term_qfi, r.entropy_term_qfi,
                             r.sigma_dot,      r.activity,         r.mobility_m,   r.mobility_mprime,
                             r.heat_flux,      r.entropy_flux,     r.purity};
    for (std::size_t i = 0; i < std::size(values); ++i) out << (i ? "," : "") << format_number(values[i]);
    out << '\n';
}

std::string RunSummary::to_json() const {
    json j = json::object();
    j["scenario"] = scenario;
    j["rows"] = rows;
    j["chain_violations"] = chain_violations;
    j["violations"] = violation_messages;
    j["divergent_rows"] = divergent_rows;
    j["fisher_term_below_speed_rows"] = fisher_term_below_speed;
    j["entropy_term_below_speed_rows"] = entropy_term_below_speed;
    j["trace_renormalizations"] = trace_renormalizations;
    j["tightness_ratio"] = {{"fss", ratio_json(fss_ratio)},
                            {"vs", ratio_json(vs_ratio)},
                            {"qfi", ratio_json(qfi_ratio)},
                            {"current_xprime", ratio_json(current_ratio)}};
    j["runtime_seconds"] = runtime_seconds;
    return j.dump(2) + "\n";
}

RunResult run_scenario(const Scenario& scenario) {
    const auto start = Clock::now();
    const LindbladModel model = build_model(scenario);
    const SpectralState rho0 = initial_state(scenario);
    const Trajectory traj = evolve(model, rho0, scenario.t_span, scenario.dt, EvolveOptions{scenario.stride});

    RunResult out;
    RunSummary& s = out.summary;
    s.scenario = scenario.name;
    s.trace_renormalizations = traj.trace_renormalizations;
    out.reports.reserve(traj.points.size());
    bool first_ratio = true;
    for (const auto& p : traj.points) {
        BoundReport r = bound_report(model, p.state, p.t);
        if (r.chain_violation) {
            ++s.chain_violations;
            if (s.violation_messages.size() < kKeptMessages) s.violation_messages.push_back(*r.chain_violation);
        }
        if (r.divergent()) ++s.divergent_rows;
        if (r.fisher_term_qfi < r.speed_tr) ++s.fisher_term_below_speed;
        if (r.entropy_term_qfi < r.speed_tr) ++s.entropy_term_below_speed;
        if (r.speed_tr > kSpeedFloor && std::isfinite(r.fss)) {
            widen(s.fss_ratio, r.fss / r.speed_tr, first_ratio);
            widen(s.vs_ratio, r.vs / r.speed_tr, first_ratio);
            widen(s.qfi_ratio, r.qfi / r.speed_tr, first_ratio);
            widen(s.current_ratio, r.current_xprime / r.speed_tr, first_ratio);
            first_ratio = false;
        }
        out.reports.push_back(std::move(r));
    }
    s.rows = out.reports.size();
    s.runtime_seconds = seconds_since(start);
    return out;
}

std::filesystem::path summary_path(const std::filesystem::path& csv_path) {
    std::filesystem::path p = csv_path;
    p.replace_extension(".summary.json");
    return p;
}

RunSummary run_and_emit(const Scenario& scenario, const std::filesystem::path& out_path) {
    const auto start = Clock::now();
    RunResult result = run_scenario(scenario);

    std::ofstream csv = open_output(out_path);
    write_csv_header(csv);
    for (const auto& r : result.reports) write_csv_row(csv, r);
    finish(csv, out_path);

    result.summary.runtime_seconds = seconds_since(start);
    const auto sp = summary_path(out_path);
    std::ofstream js = open_output(sp);
    js << result.summary.to_json();
    finish(js, sp);
    return result.summary;
}

Scenario random_detailed_balance_model(Eigen::Index dim, std::mt19937_64& rng) {
    if (dim < 2 || dim > 6) throw Error(ErrorCode::Input, "sweep dimension must be in 2..6");
    std::uniform_real_distribution<double> beta_dist(0.2, 2.0);
    std::uniform_real_distribution<double> up_dist(0.2, 1.5);
    std::uniform_real_distribution<double> zero_dist(0.1, 1.0);

    Scenario s;
    s.name = "random-d" + std::to_string(dim);
    s.hamiltonian = random_hermitian(dim, rng);
    const HermitianOperator h(s.hamiltonian);

    // A Hermitian coupling has adjoint-paired components by construction; the
    // lowering channel keeps only omega > 0 and receives its partners on build.
    Matrix lowering = Matrix::Zero(dim, dim);
    for (const auto& [omega, comp] : bohr_components(h, ginibre(dim, dim, rng)))
        if (omega > tol::bohr) lowering += comp;
    s.jumps.push_back({"coupling", random_hermitian(dim, rng)});
    s.jumps.push_back({"lowering", lowering});

    const double beta = beta_dist(rng);
    s.beta = beta;
    for (const auto& jump : s.jumps) {
        for (const auto& [omega, comp] : bohr_components(h, jump.op)) {
            (void)comp;
            if (std::abs(omega) <= tol::bohr) {
                s.rates.push_back({jump.label, omega, zero_dist(rng)});
            } else if (omega > 0.0) {
                const double g = up_dist(rng);
                s.rates.push_back({jump.label, omega, g});
                s.rates.push_back({jump.label, -omega, g * std::exp(-beta * omega)});
            }
        }
    }

    const Matrix g = ginibre(dim, dim, rng);
    Matrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    s.initial_state = 0.5 * (rho + rho.adjoint());
    return s;
}

std::string SweepSummary::to_json() const {
    json j = json::object();
    j["models"] = models;
    j["failed_models"] = failed_models;
    j["chain_violations"] = chain_violations;
    j["min_sigma_dot"] = number_json(min_sigma_dot);
    j["median_tightness_ratio"] = {{"fss", number_json(median_fss_ratio)},
                                   {"vs", number_json(median_vs_ratio)},
                                   {"qfi", number_json(median_qfi_ratio)},
                                   {"current_xprime", number_json(median_current_ratio)}};
    json errors = json::array();
    for (const auto& r : results)
        if (!r.error.empty()) errors.push_back({{"model", r.index}, {"error", r.error}});
    j["errors"] = std::move(errors);
    j["runtime_seconds"] = runtime_seconds;
    return j.dump(2) + "\n";
}

namespace {

SweepModelResult evaluate_model(std::size_t index, Eigen::Index dim, std::uint64_t seed, const SweepConfig& cfg) {
    SweepModelResult res;
    res.index = index;
    res.dim = dim;
    res.seed = seed;
    try {
        std::mt19937_64 rng(seed);
        Scenario s = random_detailed_balance_model(dim, rng);
        s.t_span = {0.0, cfg.t_end};
        s.dt = cfg.dt;
        s.stride = cfg.stride;
        const RunResult run = run_scenario(s);
        res.points = run.reports.size();
        res.chain_violations = run.summary.chain_violations;
        res.min_sigma_dot = std::numeric_limits<double>::infinity();
        std::vector<double> fss, vs, qfi, cur;
        for (const auto& r : run.reports) {
            res.min_sigma_dot = std::min(res.min_sigma_dot, r.sigma_dot);
            if (std::isfinite(r.sigma_dot))
                res.max_sigma_form_gap = std::max(res.max_sigma_form_gap, std::abs(r.sigma_dot - r.sigma_dot_flux_form));
            if (r.speed_tr > kSpeedFloor && std::isfinite(r.fss)) {
                fss.push_back(r.fss / r.speed_tr);
                vs.push_back(r.vs / r.speed_tr);
                qfi.push_back(r.qfi / r.speed_tr);
                cur.push_back(r.current_xprime / r.speed_tr);
            }
        }
        res.fss_ratio = median(fss);
        res.vs_ratio = median(vs);
        res.qfi_ratio = median(qfi);
        res.current_ratio = median(cur);
    } catch (const Error& e) {
        res.error = e.what();
    }
    return res;
}

std::uint64_t model_seed(std::uint64_t seed, std::size_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index)};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

} // namespace

SweepSummary sweep(const SweepConfig& config) {
    if (config.dims.empty()) throw Error(ErrorCode::Input, "sweep needs at least one dimension");
    for (auto d : config.dims)
        if (d < 2 || d > 6) throw Error(ErrorCode::Input, "sweep dimension must be in 2..6");
    if (config.count < 1) throw Error(ErrorCode::Input, "sweep count must be >= 1");
    if (!(config.dt > 0.0) || !(config.t_end > 0.0)) throw Error(ErrorCode::Input, "sweep needs dt > 0 and t_end > 0");
    if (config.stride < 1) throw Error(ErrorCode::Input, "sweep stride must be >= 1");

    const auto start = Clock::now();
    struct Job {
        Eigen::Index dim;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (auto d : config.dims)
        for (std::size_t k = 0; k < config.count; ++k) jobs.push_back({d, model_seed(config.seed, jobs.size())});

    SweepSummary out;
    out.results.resize(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++)
            out.results[i] = evaluate_model(i, jobs[i].dim, jobs[i].seed, config);
    };
    std::size_t threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, jobs.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    out.models = jobs.size();
    out.min_sigma_dot = std::numeric_limits<double>::infinity();
    std::vector<double> fss, vs, qfi, cur;
    for (const auto& r : out.results) {
        if (!r.error.empty()) {
            ++out.failed_models;
            continue;
        }
        out.chain_violations += r.chain_violations;
        out.min_sigma_dot = std::min(out.min_sigma_dot, r.min_sigma_dot);
        if (std::isfinite(r.vs_ratio)) {
            fss.push_back(r.fss_ratio);
            vs.push_back(r.vs_ratio);
            qfi.push_back(r.qfi_ratio);
            cur.push_back(r.current_ratio);
        }
    }
    out.median_fss_ratio = median(fss);
    out.median_vs_ratio = median(vs);
    out.median_qfi_ratio = median(qfi);
    out.median_current_ratio = median(cur);
    out.runtime_seconds = seconds_since(start);
    return out;
}

void write_sweep_csv(std::ostream& out, const SweepSummary& summary) {
    out << "model,dim,seed,points,chain_violations,min_sigma_dot,max_sigma_form_gap,"
           "fss_ratio,vs_ratio,qfi_ratio,current_xprime_ratio,error\n";
    for (const auto& r : summary.results) {
        out << r.index << ',' << r.dim << ',' << r.seed << ',' << r.points << ',' << r.chain_violations << ','
            << format_number(r.min_sigma_dot) << ',' << format_number(r.max_sigma_form_gap) << ','
            << format_number(r.fss_ratio) << ',' << format_number(r.vs_ratio) << ','
            << format_number(r.qfi_ratio) << ',' << format_number(r.current_ratio) << ',';
        // Error text is quoted; embedded quotes are doubled.
        if (!r.error.empty()) {
            out << '"';
            for (char c : r.error) out << (c == '"' ? "\"\"" : std::string(1, c));
            out << '"';
        }
        out << '\n';
    }
}

SweepSummary sweep_and_emit(const SweepConfig& config, const std::filesystem::path& out_path) {
    SweepSummary summary = sweep(config);
    std::ofstream csv = open_output(out_path);
    write_sweep_csv(csv, summary);
    finish(csv, out_path);
    const auto sp = summary_path(out_path);
    std::ofstream js = open_output(sp);
    js << summary.to_json();
    finish(js, sp);
    return summary;
}

} // namespace qsl
