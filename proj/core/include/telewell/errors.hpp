#pragma once

#include <stdexcept>
#include <string>

namespace telewell {

/// Base of all library errors. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --- configuration / input shape (CLI exit code 2) ---

class ConfigError : public Error {
public:
    using Error::Error;
};

class NotDoubleWellError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class DegenerateCurvatureError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

// --- regime / geometry (CLI exit code 3) ---

class GeometryError : public Error {
public:
    using Error::Error;
};

/// c0 or c1 within tolerance of a slope extremum; the caller must perturb.
class DegenerateError : public GeometryError {
public:
    using GeometryError::GeometryError;
};

class DegenerateRootError : public GeometryError {
public:
    using GeometryError::GeometryError;
};

class WrongRegimeError : public GeometryError {
public:
    using GeometryError::GeometryError;
};

class OutOfIntervalError : public GeometryError {
public:
    using GeometryError::GeometryError;
};

class OutOfBranchError : public GeometryError {
public:
    using GeometryError::GeometryError;
};

class OutOfDomainError : public GeometryError {
public:
    using GeometryError::GeometryError;
};

class PoleAtCriticalPointError : public GeometryError {
public:
    using GeometryError::GeometryError;
};

/// (x, y) geometry for which the passage time is almost surely infinite.
class InfiniteMeanError : public GeometryError {
public:
    using GeometryError::GeometryError;
};

/// (x, y) matches no case with a proven closed form; see module notes.
class AmbiguousCaseError : public GeometryError {
public:
    using GeometryError::GeometryError;
};

// --- numerics (CLI exit code 4) ---

class NumericError : public Error {
public:
    using Error::Error;
};

class NonConvergentError : public NumericError {
public:
    using NumericError::NumericError;
};

/// A computed quantity violated a structural identity beyond its reported
/// error (sign flips, probabilities far outside [0,1], ...).
class ConsistencyError : public NumericError {
public:
    using NumericError::NumericError;
};

// --- validation verdict (CLI exit code 5) ---

class ValidationFailure : public Error {
public:
    using Error::Error;
};

} // namespace telewell
