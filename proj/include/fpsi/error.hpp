#pragma once

#include <stdexcept>
#include <string>

namespace fpsi {

// Thrown when an input violates a documented invariant (bad parameter, bad mesh request).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& key, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + (key.empty() ? "" : " [" + key + "]") + ": " + what),
          line_(line), key_(key) {}
    int line() const { return line_; }
    const std::string& key() const { return key_; }

private:
    int line_;
    std::string key_;
};

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual)
        : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

}  // namespace fpsi
