#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace levyou {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed coefficient expression. offset is the byte position in the source.
class SyntaxError : public Error {
public:
    SyntaxError(const std::string& what, std::size_t offset)
        : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

// Division by zero or a non-finite value while evaluating an expression.
class EvalError : public Error {
public:
    using Error::Error;
};

// A precondition on arguments (ordering of times, dimensions, ranges) failed.
class DomainError : public Error {
public:
    using Error::Error;
};

// The operation is not available for the given noise model or dimension.
class Unsupported : public Error {
public:
    using Error::Error;
};

// The exponential stability bound on U(t,s) could not be established, so
// improper time integrals are refused.
class DecayUnavailable : public Error {
public:
    using Error::Error;
};

// One of the existence conditions for the evolution system failed.
class ConditionsFailed : public Error {
public:
    using Error::Error;
};

class NotGaussian : public Error {
public:
    using Error::Error;
};

// FFT inversion lost too much mass; the grid is too small or too coarse.
class MassDeficit : public Error {
public:
    using Error::Error;
};

// Scenario configuration did not validate. Carries (key, message) pairs.
class ConfigError : public Error {
public:
    using Issue = std::pair<std::string, std::string>;

    explicit ConfigError(std::vector<Issue> issues)
        : Error(render(issues)), issues_(std::move(issues)) {}
    ConfigError(std::string key, std::string message)
        : ConfigError(std::vector<Issue>{{std::move(key), std::move(message)}}) {}

    const std::vector<Issue>& issues() const noexcept { return issues_; }

private:
    static std::string render(const std::vector<Issue>& issues) {
        std::string out = "invalid scenario config:";
        for (const auto& [key, msg] : issues) {
            out += "\n  ";
            out += key;
            out += ": ";
            out += msg;
        }
        return out;
    }

    std::vector<Issue> issues_;
};

}  // namespace levyou
