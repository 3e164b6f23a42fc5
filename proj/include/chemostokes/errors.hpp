#pragma once

#include <stdexcept>
#include <string>

namespace chemostokes {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameters, configuration or initial data violate a model hypothesis.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A field holds NaN/Inf where a finite value is required.
class NonFiniteError : public Error {
public:
    using Error::Error;
};

/// A linear solve failed (incompatible data or no convergence).
class SolverError : public Error {
public:
    using Error::Error;
};

/// A time step broke a scheme invariant; the simulation cannot continue.
class SimulationAborted : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace chemostokes
