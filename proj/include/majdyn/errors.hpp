#ifndef MAJDYN_ERRORS_HPP
#define MAJDYN_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace majdyn {

/// A weighted vote summed to exactly zero at `vertex` (or a zero sum is
/// achievable there, when thrown from regularity validation).
class TieError : public std::runtime_error {
public:
    TieError(std::int64_t vertex, std::string msg, std::vector<std::int8_t> pattern = {})
        : std::runtime_error(std::move(msg)), vertex_(vertex), pattern_(std::move(pattern)) {}

    std::int64_t vertex() const { return vertex_; }
    /// Witness sign pattern over the effective voters, empty if runtime tie.
    const std::vector<std::int8_t>& pattern() const { return pattern_; }

private:
    std::int64_t vertex_;
    std::vector<std::int8_t> pattern_;
};

/// A retry budget (e.g. pairing-model rejection) was exhausted.
class BudgetError : public std::runtime_error {
public:
    BudgetError(std::int64_t budget, std::string msg)
        : std::runtime_error(std::move(msg)), budget_(budget) {}
    std::int64_t budget() const { return budget_; }

private:
    std::int64_t budget_;
};

/// Malformed text input; line() is 1-based, 0 if not applicable.
class ParseError : public std::runtime_error {
public:
    ParseError(std::int64_t line, std::string msg)
        : std::runtime_error(std::move(msg)), line_(line) {}
    std::int64_t line() const { return line_; }

private:
    std::int64_t line_;
};

/// Iterative estimation did not converge within its cap.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(double residual, std::string msg)
        : std::runtime_error(std::move(msg)), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

/// A runtime-checked proof invariant failed (potential identity, flip bound).
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace majdyn

#endif
