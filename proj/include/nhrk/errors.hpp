#pragma once

#include <stdexcept>
#include <string>

namespace nhrk {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class InvalidStageCount : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class DegenerateBasis : public Error {
public:
    using Error::Error;
};

class ConjugateUndefined : public Error {
public:
    using Error::Error;
};

class LimitUndefined : public Error {
public:
    using Error::Error;
};

class SingularMatrix : public Error {
public:
    using Error::Error;
};

class SingularJacobian : public Error {
public:
    SingularJacobian(const std::string& what, int iteration)
        : Error(what), iteration_(iteration) {}
    int iteration() const { return iteration_; }

private:
    int iteration_;
};

class Divergence : public Error {
public:
    Divergence(const std::string& what, int iteration)
        : Error(what), iteration_(iteration) {}
    int iteration() const { return iteration_; }

private:
    int iteration_;
};

class RegularityViolation : public Error {
public:
    using Error::Error;
};

class CompatibilityViolation : public Error {
public:
    using Error::Error;
};

class InconsistentInitialState : public Error {
public:
    using Error::Error;
};

class HypothesisViolation : public Error {
public:
    using Error::Error;
};

class RetractionDomain : public Error {
public:
    using Error::Error;
};

/// Raised by a stepper when the stage system cannot be solved.
class StepFailure : public Error {
public:
    StepFailure(const std::string& what, int iterations, double residual)
        : Error(what), iterations_(iterations), residual_(residual) {}
    int iterations() const { return iterations_; }
    double residual() const { return residual_; }

private:
    int iterations_;
    double residual_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace nhrk
