#pragma once

#include <stdexcept>
#include <string>

namespace symp {

// The numeric values double as CLI exit codes.
enum class ErrorKind { Input = 1, Exhausted = 2, Verification = 3, Numerical = 4 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

struct InputError : Error {
    explicit InputError(const std::string& w) : Error(ErrorKind::Input, w) {}
};

struct ExhaustedError : Error {
    explicit ExhaustedError(const std::string& w) : Error(ErrorKind::Exhausted, w) {}
};

struct VerificationError : Error {
    explicit VerificationError(const std::string& w) : Error(ErrorKind::Verification, w) {}
};

struct NumericalError : Error {
    explicit NumericalError(const std::string& w) : Error(ErrorKind::Numerical, w) {}
};

// Eigenvalue clusters that cannot be separated, or a degenerate crossing / endpoint.
struct DegeneracyError : NumericalError {
    explicit DegeneracyError(const std::string& w) : NumericalError(w) {}
};

// Consecutive rho samples too far apart to lift the argument.
struct UnwrapError : NumericalError {
    explicit UnwrapError(const std::string& w) : NumericalError(w) {}
};

// Irrational rotation number numerically indistinguishable from a resonance.
struct NearResonanceError : NumericalError {
    explicit NearResonanceError(const std::string& w) : NumericalError(w) {}
};

}  // namespace symp
