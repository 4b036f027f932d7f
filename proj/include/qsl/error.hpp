#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qsl {

enum class ErrorCode {
    Input,              // non-finite or otherwise unusable numeric input
    DimensionMismatch,
    NonHermitian,
    InvalidState,       // not a density matrix
    ModelConstruction,
    DetailedBalance,
    Degeneracy,
    Contract,           // basis handle / precondition mismatch
    Support,            // rho_dot leaves the support of rho
    Domain,
    PositivityLoss,
    Integration,
    MalformedFile,
    Io,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what);
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace qsl
