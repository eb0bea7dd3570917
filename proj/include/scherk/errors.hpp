#pragma once

#include <stdexcept>
#include <string>

namespace scherk {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidParams : Error { using Error::Error; };

// Evaluation refused at or too near a singular point of the Weierstrass data.
struct BranchPointHit : Error { using Error::Error; };
struct EndPointHit : Error { using Error::Error; };
struct PoleHit : Error { using Error::Error; };

// Branch continuation.
struct StepTooLarge : Error { using Error::Error; };
struct SingularityClearance : Error { using Error::Error; };

struct ToleranceNotMet : Error {
    double achieved;
    ToleranceNotMet(const std::string& what, double err) : Error(what), achieved(err) {}
};

struct BoundViolation : Error { using Error::Error; };
struct NoBracket : Error { using Error::Error; };
struct GridDegenerate : Error { using Error::Error; };

struct WeldMismatch : Error {
    double residual;
    WeldMismatch(const std::string& what, double r) : Error(what), residual(r) {}
};

struct ConfigError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace scherk
