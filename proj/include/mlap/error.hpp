#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mlap {

enum class ErrorKind {
    DimensionMismatch,
    NonFinite,
    AsymmetricCoupling,
    ZeroConductance,
    NonpositiveMass,
    NonpositiveWeight,
    NegativeWeight,
    NegativePower,
    EmptyTargetSet,
    IndexOutOfRange,
    UnbalancedSets,
    SingularSystem,
    SetMeetsBoundary,
    TrappedInterior,
    MissingBoundary,
    FamilyTooSmall,
    NegativeGamma,
    SymmetryViolation,
    NotMeasurePreserving,
    ParseError,
    SchemaVersionError,
    IOError,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::NonFinite: return "NonFinite";
        case ErrorKind::AsymmetricCoupling: return "AsymmetricCoupling";
        case ErrorKind::ZeroConductance: return "ZeroConductance";
        case ErrorKind::NonpositiveMass: return "NonpositiveMass";
        case ErrorKind::NonpositiveWeight: return "NonpositiveWeight";
        case ErrorKind::NegativeWeight: return "NegativeWeight";
        case ErrorKind::NegativePower: return "NegativePower";
        case ErrorKind::EmptyTargetSet: return "EmptyTargetSet";
        case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorKind::UnbalancedSets: return "UnbalancedSets";
        case ErrorKind::SingularSystem: return "SingularSystem";
        case ErrorKind::SetMeetsBoundary: return "SetMeetsBoundary";
        case ErrorKind::TrappedInterior: return "TrappedInterior";
        case ErrorKind::MissingBoundary: return "MissingBoundary";
        case ErrorKind::FamilyTooSmall: return "FamilyTooSmall";
        case ErrorKind::NegativeGamma: return "NegativeGamma";
        case ErrorKind::SymmetryViolation: return "SymmetryViolation";
        case ErrorKind::NotMeasurePreserving: return "NotMeasurePreserving";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::SchemaVersionError: return "SchemaVersionError";
        case ErrorKind::IOError: return "IOError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& detail)
        : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace mlap
