#pragma once

#include <stdexcept>
#include <string>

namespace fuchs {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent user input (files, masses, parameters).
class InputError : public Error {
public:
    using Error::Error;
};

/// A computation that could not be carried out to the requested accuracy,
/// or whose numerical preconditions failed.
class NumericError : public Error {
public:
    using Error::Error;
};

class ParseError : public InputError {
public:
    using InputError::InputError;
};

class ValidationError : public InputError {
public:
    using InputError::InputError;
};

class NonPositiveMass : public InputError {
public:
    using InputError::InputError;
};

class SigmaOutOfRange : public InputError {
public:
    using InputError::InputError;
};

/// Supplied residue data does not match the closed-form singularity layout.
class InputMismatch : public InputError {
public:
    using InputError::InputError;
};

class EvaluationAtSingularity : public NumericError {
public:
    using NumericError::NumericError;
};

class PathTooCloseToSingularity : public NumericError {
public:
    using NumericError::NumericError;
};

class ToleranceNotMet : public NumericError {
public:
    using NumericError::NumericError;
};

class NoClearPath : public NumericError {
public:
    using NumericError::NumericError;
};

class IllConditioned : public NumericError {
public:
    using NumericError::NumericError;
};

class SingularMatrix : public NumericError {
public:
    using NumericError::NumericError;
};

class SpectrumShapeMismatch : public NumericError {
public:
    using NumericError::NumericError;
};

class CommutationViolated : public NumericError {
public:
    using NumericError::NumericError;
};

class PreconditionFailed : public NumericError {
public:
    using NumericError::NumericError;
};

} // namespace fuchs
