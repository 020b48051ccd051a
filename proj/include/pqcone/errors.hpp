#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pqcone {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent problem input (bad radii, missing fields, invalid domain).
class SpecError : public Error {
public:
    using Error::Error;
};

/// A nonlinear or eigenvalue solve that did not reach its tolerance.
class SolverError : public Error {
public:
    SolverError(const std::string& what, double best_residual)
        : Error(what + " (best residual " + std::to_string(best_residual) + ")"),
          best_residual_(best_residual) {}
    double best_residual() const { return best_residual_; }

private:
    double best_residual_;
};

/// A parameter search (bracketing, bisection) that ran out of room.
class SearchError : public Error {
public:
    using Error::Error;
};

/// Raised when a function that must lie in the cone has negative values.
class ConeError : public Error {
public:
    using Error::Error;
};

/// Monotone iteration observed a step against the declared order.
class MonotonicityError : public Error {
public:
    using Error::Error;
};

/// Abstract-lab validation asked for a theorem whose hypotheses were not met.
class HypothesisError : public Error {
public:
    using Error::Error;
};

// Expression errors

class ExprError : public Error {
public:
    using Error::Error;
};

class ParseError : public ExprError {
public:
    ParseError(const std::string& what, std::size_t offset)
        : ExprError(what + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

class UnknownIdentifierError : public ExprError {
public:
    UnknownIdentifierError(const std::string& name, std::size_t offset)
        : ExprError("unknown identifier '" + name + "' at offset " + std::to_string(offset)),
          name_(name), offset_(offset) {}
    const std::string& name() const { return name_; }
    std::size_t offset() const { return offset_; }

private:
    std::string name_;
    std::size_t offset_;
};

class ArityError : public ExprError {
public:
    ArityError(const std::string& fn, std::size_t expected, std::size_t got, std::size_t offset)
        : ExprError("function '" + fn + "' expects " + std::to_string(expected) +
                    " argument(s), got " + std::to_string(got) + " at offset " +
                    std::to_string(offset)),
          offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

class MissingBindingError : public ExprError {
public:
    explicit MissingBindingError(const std::string& name)
        : ExprError("no value bound for variable '" + name + "'"), name_(name) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

class DomainError : public ExprError {
public:
    DomainError(const std::string& what, std::string subexpr)
        : ExprError(what + " in '" + subexpr + "'"), subexpr_(std::move(subexpr)) {}
    /// Same error with the evaluation point appended to the message.
    DomainError(const DomainError& inner, const std::string& where)
        : ExprError(std::string(inner.what()) + " at " + where), subexpr_(inner.subexpr_) {}
    const std::string& subexpression() const { return subexpr_; }

private:
    std::string subexpr_;
};

} // namespace pqcone
