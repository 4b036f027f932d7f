#include "qsl/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qsl/error.hpp"

namespace qsl {

using json = nlohmann::ordered_json;

namespace {

constexpr const char* kSchema = "qsl-scenario/1";

[[noreturn]] void malformed(const std::string& path, const std::string& why) {
    throw Error(ErrorCode::MalformedFile, path + ": " + why);
}

const json& member(const json& j, const char* key, const std::string& path) {
    if (!j.is_object()) malformed(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) malformed(path + "/" + key, "missing field");
    return *it;
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) malformed(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) malformed(path, "expected a finite number");
    return v;
}

std::string text(const json& j, const std::string& path) {
    if (!j.is_string()) malformed(path, "expected a string");
    return j.get<std::string>();
}

Eigen::MatrixXd real_grid(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) malformed(path, "expected a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    Eigen::MatrixXd m(rows, rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j[static_cast<std::size_t>(r)];
        const std::string rp = path + "/" + std::to_string(r);
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != rows)
            malformed(rp, "expected a row of length " + std::to_string(rows));
        for (Eigen::Index c = 0; c < rows; ++c)
            m(r, c) = number(row[static_cast<std::size_t>(c)], rp + "/" + std::to_string(c));
    }
    return m;
}

Matrix complex_matrix(const json& j, const std::string& path) {
    const Eigen::MatrixXd re = real_grid(member(j, "re", path), path + "/re");
    Eigen::MatrixXd im = Eigen::MatrixXd::Zero(re.rows(), re.cols());
    if (j.contains("im")) {
        im = real_grid(j["im"], path + "/im");
        if (im.rows() != re.rows()) malformed(path + "/im", "shape differs from /re");
    }
    Matrix m(re.rows(), re.cols());
    m.real() = re;
    m.imag() = im;
    return m;
}

json grid_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

json matrix_json(const Matrix& m) {
    json out = json::object();
    out["re"] = grid_json(m.real());
    out["im"] = grid_json(m.imag());
    return out;
}

// Re-throws a validation error with the offending field path.
template <class Fn>
auto at_path(const std::string& path, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const Error& e) {
        throw Error(e.code(), path + ": " + e.what());
    }
}

} // namespace

double BathShorthand::beta() const {
    return std::log(emission_rate() / absorption_rate()) / omega0;
}

double Scenario::effective_beta() const {
    if (beta) return *beta;
    if (bath) return bath->beta();
    throw Error(ErrorCode::MalformedFile, "/beta: required when no bath shorthand is given");
}

std::vector<RateEntry> Scenario::effective_rates() const {
    if (!bath) return rates;
    std::vector<RateEntry> out;
    for (const auto& j : jumps) {
        out.push_back({j.label, bath->omega0, bath->emission_rate()});
        out.push_back({j.label, -bath->omega0, bath->absorption_rate()});
    }
    return out;
}

Scenario preset_two_level() {
    Scenario s;
    s.name = "two-level";
    s.hamiltonian = Matrix::Zero(2, 2);
    s.hamiltonian(0, 0) = 0.5;
    s.hamiltonian(1, 1) = -0.5;

    // Basis (|e>, |g>): sigma_- = |g><e|.
    Matrix sigma_minus = Matrix::Zero(2, 2);
    sigma_minus(1, 0) = 1.0;
    s.jumps.push_back({"sigma_minus", sigma_minus});
    s.bath = BathShorthand{0.5, 1.0, 3.0};

    s.initial_state.resize(2, 2);
    s.initial_state << cplx(0.7, 0.0), cplx(0.2, 0.1), cplx(0.2, -0.1), cplx(0.3, 0.0);
    s.t_span = {0.0, 5.0};
    s.dt = 1e-3;
    s.stride = 10;
    return s;
}

LindbladModel build_model(const Scenario& scenario) {
    const HermitianOperator h = at_path("/hamiltonian", [&] { return HermitianOperator(scenario.hamiltonian); });
    const double beta = scenario.effective_beta();
    return at_path(scenario.bath ? "/bath" : "/rates", [&] {
        return build_jump_decomposition(h, scenario.jumps, scenario.effective_rates(), beta);
    });
}

SpectralState initial_state(const Scenario& scenario) {
    return at_path("/initial_state", [&] {
        const Matrix& m = scenario.initial_state;
        if (m.rows() != m.cols() || m.rows() < 1) throw Error(ErrorCode::InvalidState, "not square");
        if (max_abs(m - m.adjoint()) > 1e-10) throw Error(ErrorCode::InvalidState, "not Hermitian");
        const double tr = m.trace().real();
        if (std::abs(tr - 1.0) > 1e-10)
            throw Error(ErrorCode::InvalidState, "trace " + std::to_string(tr) + " differs from 1");
        try {
            return SpectralState(HermitianOperator(m));
        } catch (const Error& e) {
            throw Error(ErrorCode::InvalidState, e.what());
        }
    });
}

void validate(const Scenario& s) {
    if (s.bath && !s.rates.empty()) malformed("/rates", "give either bath or rates, not both");
    if (!s.bath && s.rates.empty()) malformed("/rates", "either bath or rates is required");
    if (s.bath) {
        if (!(s.bath->gamma0 > 0.0)) malformed("/bath/gamma0", "must be > 0");
        if (!(s.bath->omega0 > 0.0)) malformed("/bath/omega0", "must be > 0");
        if (!(s.bath->occupation > 0.0)) malformed("/bath/occupation", "must be > 0");
    }
    if (!(s.dt > 0.0)) malformed("/dt", "must be > 0");
    if (!(s.t_span.t1 > s.t_span.t0)) malformed("/t_span", "must satisfy t0 < t1");
    if (s.stride < 1) malformed("/output/stride", "must be >= 1");
    if (s.initial_state.rows() != s.hamiltonian.rows())
        malformed("/initial_state", "dimension differs from /hamiltonian");
    (void)build_model(s);
    (void)initial_state(s);
}

std::string to_json(const Scenario& s) {
    json j = json::object();
    j["schema"] = kSchema;
    j["name"] = s.name;
    j["hamiltonian"] = matrix_json(s.hamiltonian);
    json jumps = json::array();
    for (const auto& rj : s.jumps) {
        json e = matrix_json(rj.op);
        json labelled = json::object();
        labelled["label"] = rj.label;
        labelled["re"] = e["re"];
        labelled["im"] = e["im"];
        jumps.push_back(std::move(labelled));
    }
    j["jumps"] = std::move(jumps);
    if (s.bath) {
        j["bath"] = {{"gamma0", s.bath->gamma0}, {"omega0", s.bath->omega0}, {"occupation", s.bath->occupation}};
    } else {
        json rates = json::array();
        for (const auto& r : s.rates) rates.push_back({{"channel", r.channel}, {"omega", r.omega}, {"gamma", r.gamma}});
        j["rates"] = std::move(rates);
    }
    if (s.beta) j["beta"] = *s.beta;
    j["initial_state"] = matrix_json(s.initial_state);
    j["t_span"] = json::array({s.t_span.t0, s.t_span.t1});
    j["dt"] = s.dt;
    j["output"] = {{"stride", s.stride}};
    j["seed"] = s.seed;
    return j.dump(2) + "\n";
}

Scenario scenario_from_json(const std::string& body) {
    json j;
    try {
        j = json::parse(body);
    } catch (const json::parse_error& e) {
        malformed("/", std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) malformed("/", "expected an object");

    Scenario s;
    if (j.contains("schema") && text(j["schema"], "/schema") != kSchema)
        malformed("/schema", std::string("unsupported schema, expected ") + kSchema);
    if (j.contains("name")) s.name = text(j["name"], "/name");
    s.hamiltonian = complex_matrix(member(j, "hamiltonian", ""), "/hamiltonian");

    const json& jumps = member(j, "jumps", "");
    if (!jumps.is_array()) malformed("/jumps", "expected an array");
    for (std::size_t k = 0; k < jumps.size(); ++k) {
        const std::string p = "/jumps/" + std::to_string(k);
        RawJump rj{text(member(jumps[k], "label", p), p + "/label"), complex_matrix(jumps[k], p)};
        if (rj.op.rows() != s.hamiltonian.rows()) malformed(p, "dimension differs from /hamiltonian");
        s.jumps.push_back(std::move(rj));
    }

    if (j.contains("bath")) {
        const json& b = j["bath"];
        s.bath = BathShorthand{number(member(b, "gamma0", "/bath"), "/bath/gamma0"),
                               number(member(b, "omega0", "/bath"), "/bath/omega0"),
                               number(member(b, "occupation", "/bath"), "/bath/occupation")};
    }
    if (j.contains("rates")) {
        const json& rates = j["rates"];
        if (!rates.is_array()) malformed("/rates", "expected an array");
        for (std::size_t k = 0; k < rates.size(); ++k) {
            const std::string p = "/rates/" + std::to_string(k);
            s.rates.push_back({text(member(rates[k], "channel", p), p + "/channel"),
                               number(member(rates[k], "omega", p), p + "/omega"),
                               number(member(rates[k], "gamma", p), p + "/gamma")});
        }
    }
    if (j.contains("beta")) s.beta = number(j["beta"], "/beta");

    s.initial_state = complex_matrix(member(j, "initial_state", ""), "/initial_state");
    if (j.contains("t_span")) {
        const json& ts = j["t_span"];
        if (!ts.is_array() || ts.size() != 2) malformed("/t_span", "expected [t0, t1]");
        s.t_span = {number(ts[0], "/t_span/0"), number(ts[1], "/t_span/1")};
    }
    if (j.contains("dt")) s.dt = number(j["dt"], "/dt");
    if (j.contains("output")) {
        const json& o = j["output"];
        if (o.contains("stride")) {
            if (!o["stride"].is_number_unsigned() || o["stride"].get<std::size_t>() < 1)
                malformed("/output/stride", "expected a positive integer");
            s.stride = o["stride"].get<std::size_t>();
        }
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) malformed("/seed", "expected a non-negative integer");
        s.seed = j["seed"].get<std::uint64_t>();
    }

    validate(s);
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return scenario_from_json(buf.str());
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << to_json(scenario);
    if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

} // namespace qsl
