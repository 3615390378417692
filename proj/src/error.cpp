#include "busched/error.hpp"

namespace busched {

const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Capacity: return "capacity";
    case ErrorKind::Degeneracy: return "degeneracy";
    case ErrorKind::ModelCoverage: return "model_coverage";
    case ErrorKind::ContractViolation: return "contract_violation";
    case ErrorKind::Oracle: return "oracle";
    case ErrorKind::Io: return "io";
    }
    return "unknown";
}

} // namespace busched
