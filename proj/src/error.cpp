#include "qsl/error.hpp"

namespace qsl {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::Input: return "input";
    case ErrorCode::DimensionMismatch: return "dimension-mismatch";
    case ErrorCode::NonHermitian: return "non-hermitian";
    case ErrorCode::InvalidState: return "invalid-state";
    case ErrorCode::ModelConstruction: return "model-construction";
    case ErrorCode::DetailedBalance: return "detailed-balance";
    case ErrorCode::Degeneracy: return "degeneracy";
    case ErrorCode::Contract: return "contract";
    case ErrorCode::Support: return "support";
    case ErrorCode::Domain: return "domain";
    case ErrorCode::PositivityLoss: return "positivity-loss";
    case ErrorCode::Integration: return "integration";
    case ErrorCode::MalformedFile: return "malformed-file";
    case ErrorCode::Io: return "io";
    }
    return "unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

} // namespace qsl
