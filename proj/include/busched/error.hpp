#pragma once

#include <stdexcept>
#include <string>

namespace busched {

enum class ErrorKind {
    InvalidArgument,
    Parse,
    Validation,
    Capacity,
    Degeneracy,
    ModelCoverage,
    ContractViolation,
    Oracle,
    Io,
};

const char* to_string(ErrorKind kind);

// Base of every exception thrown by the library. The kind drives CLI exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

#define BUSCHED_DEFINE_ERROR(Name, Kind)                                       \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
    }

BUSCHED_DEFINE_ERROR(InvalidArgument, InvalidArgument);
BUSCHED_DEFINE_ERROR(ParseError, Parse);
BUSCHED_DEFINE_ERROR(ValidationError, Validation);
BUSCHED_DEFINE_ERROR(CapacityError, Capacity);
BUSCHED_DEFINE_ERROR(DegeneracyError, Degeneracy);
BUSCHED_DEFINE_ERROR(ModelCoverageError, ModelCoverage);
BUSCHED_DEFINE_ERROR(ContractViolation, ContractViolation);
BUSCHED_DEFINE_ERROR(OracleError, Oracle);
BUSCHED_DEFINE_ERROR(IoError, Io);

#undef BUSCHED_DEFINE_ERROR

} // namespace busched
