#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gck {

// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Invalid model parameters, malformed location sets, bad configuration.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double partial_sum, std::size_t terms)
        : std::runtime_error(what), partial_sum_(partial_sum), terms_(terms) {}
    double partial_sum() const noexcept { return partial_sum_; }
    std::size_t terms() const noexcept { return terms_; }

private:
    double partial_sum_;
    std::size_t terms_;
};

class NotPositiveDefinite : public std::runtime_error {
public:
    explicit NotPositiveDefinite(std::size_t pivot)
        : std::runtime_error("matrix is not positive definite (pivot " + std::to_string(pivot) + ")"),
          pivot_(pivot) {}
    std::size_t pivot() const noexcept { return pivot_; }

private:
    std::size_t pivot_;
};

class CalibrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerical quadrature did not reach its target; carries the best estimate.
class EvaluationError : public std::runtime_error {
public:
    EvaluationError(const std::string& what, double estimate, double abs_error)
        : std::runtime_error(what), estimate_(estimate), abs_error_(abs_error) {}
    double estimate() const noexcept { return estimate_; }
    double abs_error() const noexcept { return abs_error_; }

private:
    double estimate_;
    double abs_error_;
};

// The Hankel oracle could not certify its answer; callers treat the result as
// inconclusive.
class OracleInconclusive : public EvaluationError {
public:
    using EvaluationError::EvaluationError;
};

// Every likelihood evaluation in a search failed.
class FitFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace gck
