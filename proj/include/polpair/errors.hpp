#pragma once

#include <stdexcept>
#include <string>

namespace polpair {

// Root of every error raised by the library. Subclasses map one-to-one onto
// the failure categories callers are expected to distinguish.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerical failures (CLI exit code 3).
class NumericError : public Error {
public:
    using Error::Error;
};

class PoleProximity : public NumericError {
public:
    using NumericError::NumericError;
};

class EvanescentBand : public NumericError {
public:
    using NumericError::NumericError;
};

class RootSolverFailure : public NumericError {
public:
    using NumericError::NumericError;
};

class ToleranceNotMet : public NumericError {
public:
    using NumericError::NumericError;
};

class WindowTooShort : public NumericError {
public:
    using NumericError::NumericError;
};

class DegenerateJacobian : public NumericError {
public:
    using NumericError::NumericError;
};

// Bad input values (CLI exit code 2 when they come from a config file).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

class InvalidCoefficient : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace polpair
