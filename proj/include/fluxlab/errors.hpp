#pragma once

#include <stdexcept>
#include <string>

namespace fluxlab {

// Error classes map onto CLI exit codes: 2 = configuration / schema,
// 3 = bundled-example assertion, 4 = numeric failure.
enum class ErrorKind : int { Config = 2, Assertion = 3, Numeric = 4 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what_arg)
        : std::runtime_error(what_arg), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

struct ConfigInvalid : Error {
    explicit ConfigInvalid(const std::string& w) : Error(ErrorKind::Config, "config invalid: " + w) {}
};

struct LengthMismatch : Error {
    explicit LengthMismatch(const std::string& w) : Error(ErrorKind::Config, "length mismatch: " + w) {}
};

struct NotConstant : Error {
    explicit NotConstant(const std::string& w) : Error(ErrorKind::Numeric, "not constant: " + w) {}
};

struct DegenerateFiber : Error {
    explicit DegenerateFiber(const std::string& w) : Error(ErrorKind::Numeric, "degenerate fiber: " + w) {}
};

struct ObstructionNonzero : Error {
    explicit ObstructionNonzero(const std::string& w) : Error(ErrorKind::Numeric, "obstruction nonzero: " + w) {}
};

struct BoundaryTooClose : Error {
    explicit BoundaryTooClose(const std::string& w) : Error(ErrorKind::Numeric, "boundary too close: " + w) {}
};

struct StepTooLarge : Error {
    explicit StepTooLarge(const std::string& w) : Error(ErrorKind::Numeric, "step too large: " + w) {}
};

struct Unclassified : Error {
    explicit Unclassified(const std::string& w) : Error(ErrorKind::Numeric, "unclassified: " + w) {}
};

struct PreconditionViolated : Error {
    explicit PreconditionViolated(const std::string& w) : Error(ErrorKind::Numeric, "precondition violated: " + w) {}
};

struct NumericFailure : Error {
    explicit NumericFailure(const std::string& w) : Error(ErrorKind::Numeric, w) {}
};

struct ExampleAssertionFailed : Error {
    explicit ExampleAssertionFailed(const std::string& w) : Error(ErrorKind::Assertion, "example assertion failed: " + w) {}
};

} // namespace fluxlab
