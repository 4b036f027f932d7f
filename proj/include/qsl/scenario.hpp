// scenario.hpp: scenario configuration, its JSON form and the two-level preset.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qsl/lindblad.hpp"
#include "qsl/operator.hpp"

namespace qsl {

/// Thermal bath shorthand: gamma(+omega0) = gamma0 omega0 (N + 1) (emission),
/// gamma(-omega0) = gamma0 omega0 N (absorption).
struct BathShorthand {
    double gamma0 = 0.0;
    double omega0 = 0.0;
    double occupation = 0.0;  // N(omega0)

    double emission_rate() const { return gamma0 * omega0 * (occupation + 1.0); }
    double absorption_rate() const { return gamma0 * omega0 * occupation; }
    /// beta = ln(gamma_- / gamma_+) / omega0.
    double beta() const;
};

struct Scenario {
    std::string name;
    Matrix hamiltonian;
    std::vector<RawJump> jumps;
    std::optional<BathShorthand> bath;  // exclusive with explicit rates
    std::vector<RateEntry> rates;
    std::optional<double> beta;         // required with explicit rates; derived from the bath otherwise
    Matrix initial_state;
    TimeSpan t_span{0.0, 5.0};
    double dt = 1e-3;
    std::size_t stride = 10;
    std::uint64_t seed = 0;

    double effective_beta() const;
    std::vector<RateEntry> effective_rates() const;
};

/// H = diag(0.5, -0.5), sigma_- coupled to a bath with gamma0 = 0.5, omega0 = 1,
/// N = 3 (so gamma_- = 2, gamma_+ = 1.5), rho0 = [[0.7, 0.2+0.1i], [0.2-0.1i, 0.3]].
Scenario preset_two_level();

/// Builds and validates the model (Hermiticity, detailed balance).
LindbladModel build_model(const Scenario& scenario);

/// Validated initial density matrix.
SpectralState initial_state(const Scenario& scenario);

/// Validates everything load_scenario checks; throws Error with a field path.
void validate(const Scenario& scenario);

std::string to_json(const Scenario& scenario);
Scenario scenario_from_json(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

} // namespace qsl
