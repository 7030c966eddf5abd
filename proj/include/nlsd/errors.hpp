#pragma once

#include <stdexcept>
#include <string>

namespace nlsd {

enum class ErrorClass {
    ConfigError,
    AssumptionViolation,
    UnderResolved,
    TooCloseToBoundary,
    PhaseUnderResolved,
    BoundUnachievable,
    NoConvergence,
    CollapseDetected,
    ChargeDrift,
    EnergyDrift,
    BoundaryMassExceeded,
    SpectralTailExceeded,
    BlowUpDetected,
    EscapeDetected,
    TimeMismatch,
    InsufficientPoints,
    IoError,
};

inline const char* to_string(ErrorClass c) {
    switch (c) {
        case ErrorClass::ConfigError:          return "ConfigError";
        case ErrorClass::AssumptionViolation:  return "AssumptionViolation";
        case ErrorClass::UnderResolved:        return "UnderResolved";
        case ErrorClass::TooCloseToBoundary:   return "TooCloseToBoundary";
        case ErrorClass::PhaseUnderResolved:   return "PhaseUnderResolved";
        case ErrorClass::BoundUnachievable:    return "BoundUnachievable";
        case ErrorClass::NoConvergence:        return "NoConvergence";
        case ErrorClass::CollapseDetected:     return "CollapseDetected";
        case ErrorClass::ChargeDrift:          return "ChargeDrift";
        case ErrorClass::EnergyDrift:          return "EnergyDrift";
        case ErrorClass::BoundaryMassExceeded: return "BoundaryMassExceeded";
        case ErrorClass::SpectralTailExceeded: return "SpectralTailExceeded";
        case ErrorClass::BlowUpDetected:       return "BlowUpDetected";
        case ErrorClass::EscapeDetected:       return "EscapeDetected";
        case ErrorClass::TimeMismatch:         return "TimeMismatch";
        case ErrorClass::InsufficientPoints:   return "InsufficientPoints";
        case ErrorClass::IoError:              return "IoError";
    }
    return "Unknown";
}

/// Process exit code per failure class (documented in the README).
inline int exit_code(ErrorClass c) {
    switch (c) {
        case ErrorClass::ConfigError:          return 2;
        case ErrorClass::AssumptionViolation:  return 3;
        case ErrorClass::UnderResolved:
        case ErrorClass::TooCloseToBoundary:
        case ErrorClass::PhaseUnderResolved:
        case ErrorClass::BoundUnachievable:    return 4;
        case ErrorClass::NoConvergence:
        case ErrorClass::CollapseDetected:     return 5;
        case ErrorClass::ChargeDrift:
        case ErrorClass::EnergyDrift:
        case ErrorClass::BoundaryMassExceeded:
        case ErrorClass::SpectralTailExceeded:
        case ErrorClass::BlowUpDetected:       return 6;
        case ErrorClass::IoError:              return 7;
        case ErrorClass::EscapeDetected:
        case ErrorClass::TimeMismatch:
        case ErrorClass::InsufficientPoints:   return 8;
    }
    return 1;
}

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, const std::string& msg)
        : std::runtime_error(std::string(to_string(cls)) + ": " + msg), cls_(cls) {}

    ErrorClass error_class() const { return cls_; }

private:
    ErrorClass cls_;
};

}  // namespace nlsd
