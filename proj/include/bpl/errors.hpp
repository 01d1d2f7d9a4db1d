#pragma once

#include <stdexcept>
#include <string>

namespace bpl {

// Failure taxonomy shared by the whole toolkit. The CLI maps Degeneracy to
// exit code 3 and every other kind to exit code 2.
enum class ErrorKind {
    Parameter,   // invalid argument value
    Shape,       // mismatched grid specs
    Domain,      // support-safety or domain-size violation
    Resolution,  // grid too coarse for the requested construction
    Truncation,  // spectral tail above the retained band
    Budget,      // enumeration exceeds cap without subsampling
    Degeneracy,  // numerical rank/factorization failure
    Fit,         // not enough usable points for a regression
    Config,      // malformed experiment configuration
    Io,          // file read/write failure
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, double detail = 0.0)
        : std::runtime_error(message), kind_(kind), detail_(detail) {}

    ErrorKind kind() const { return kind_; }
    // carries e.g. the measured tail mass for Truncation errors
    double detail() const { return detail_; }

private:
    ErrorKind kind_;
    double detail_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message, double detail = 0.0) {
    throw Error(kind, message, detail);
}

inline int exit_code_for(const Error& e) {
    return e.kind() == ErrorKind::Degeneracy ? 3 : 2;
}

}  // namespace bpl
