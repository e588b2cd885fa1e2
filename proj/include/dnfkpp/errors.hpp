#pragma once

#include <stdexcept>
#include <string>

namespace dnfkpp {

enum class ErrorKind {
    InvalidArgument,
    Resolution,
    DegenerateDenominator,
    NoTangency,
    NonUnique,
    NewtonDiverged,
    OutsideWedge,
    CollapsedToConstant,
    NonFiniteState,
    NotApplicable,
    UnsupportedExtension,
    EigenSolve,
    Config,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers (the CLI in
/// particular) can map it to an exit status without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Resolution: return "ResolutionError";
    case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorKind::NoTangency: return "NoTangency";
    case ErrorKind::NonUnique: return "NonUnique";
    case ErrorKind::NewtonDiverged: return "NewtonDiverged";
    case ErrorKind::OutsideWedge: return "OutsideWedge";
    case ErrorKind::CollapsedToConstant: return "CollapsedToConstant";
    case ErrorKind::NonFiniteState: return "NonFiniteState";
    case ErrorKind::NotApplicable: return "NotApplicable";
    case ErrorKind::UnsupportedExtension: return "UnsupportedExtension";
    case ErrorKind::EigenSolve: return "EigenSolveError";
    case ErrorKind::Config: return "ConfigError";
    }
    return "Error";
}

// Residuals that should vanish, and quantities that must stay away from zero.
inline constexpr double tol_root = 1e-10;
inline constexpr double tol_sep = 1e-8;

} // namespace dnfkpp
