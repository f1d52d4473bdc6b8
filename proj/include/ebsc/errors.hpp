#pragma once

#include <stdexcept>
#include <string>

namespace ebsc {

// Failure taxonomy shared by all modules. The CLI maps ConfigError to exit
// code 1 and NumericalError to exit code 3.
enum class ErrorCode {
    NonPSD,
    NonSPD,
    ShapeMismatch,
    NonPositiveSigma,
    SingularResolvent,
    BlowUp,
    IllConditionedRegression,
    UnnormalizedDensity,
    DegenerateMass,
    NoConvergence,
    GridMismatch,
    NaNEncountered,
    InvalidArgument,
};

inline const char* to_string(ErrorCode c) {
    switch (c) {
        case ErrorCode::NonPSD: return "NonPSD";
        case ErrorCode::NonSPD: return "NonSPD";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::NonPositiveSigma: return "NonPositiveSigma";
        case ErrorCode::SingularResolvent: return "SingularResolvent";
        case ErrorCode::BlowUp: return "BlowUp";
        case ErrorCode::IllConditionedRegression: return "IllConditionedRegression";
        case ErrorCode::UnnormalizedDensity: return "UnnormalizedDensity";
        case ErrorCode::DegenerateMass: return "DegenerateMass";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::GridMismatch: return "GridMismatch";
        case ErrorCode::NaNEncountered: return "NaNEncountered";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

class NumericalError : public std::runtime_error {
  public:
    NumericalError(ErrorCode code, std::string origin, const std::string& what)
        : std::runtime_error(origin + ": " + to_string(code) + ": " + what),
          code_(code),
          origin_(std::move(origin)) {}

    ErrorCode code() const { return code_; }
    const std::string& origin() const { return origin_; }

  private:
    ErrorCode code_;
    std::string origin_;
};

class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ebsc
