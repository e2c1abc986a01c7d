#pragma once

#include <stdexcept>
#include <string>

namespace nlc {

/// Base for all library errors. Subclasses mirror the failure classes of the
/// public operations so callers can distinguish misuse from numerical trouble.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Evaluation outside a function's domain (e.g. a singular kernel at r = 0).
struct DomainError : Error {
    using Error::Error;
};

/// Operation not defined for the given object (e.g. mass of a non-integrable kernel).
struct UnsupportedError : Error {
    using Error::Error;
};

/// Point off the surface, frame construction failure, bad chart.
struct GeometryError : Error {
    using Error::Error;
};

/// Invalid discretization parameters (R below resolution, empty schedule, ...).
struct ParameterError : Error {
    using Error::Error;
};

/// Non-finite or undefined integrand value at a retained node; message names the node.
struct IntegrandError : Error {
    using Error::Error;
};

/// Divergent tail: kernel decay does not beat the surface growth certificate.
struct DivergentTailError : Error {
    using Error::Error;
};

/// Missing analytic data (third-order surface data, gradients, ...).
struct CapabilityError : Error {
    using Error::Error;
};

/// A theorem hypothesis fails numerically (H_E != 0 where required, degenerate gradient, ...).
struct HypothesisError : Error {
    using Error::Error;
};

/// Failed finite-difference stencil or other numeric breakdown.
struct NumericError : Error {
    using Error::Error;
};

/// Bad experiment configuration.
struct ConfigError : Error {
    using Error::Error;
};

} // namespace nlc
