#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace aniso {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on user input was violated (bad interval, ε outside (0,1], ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Expression or configuration text could not be parsed.
class ParseError : public Error {
public:
    ParseError(const std::string& message, int line, int column)
        : Error(format(message, line, column)), line_(line), column_(column), message_(message) {}

    [[nodiscard]] int line() const noexcept { return line_; }
    [[nodiscard]] int column() const noexcept { return column_; }
    [[nodiscard]] const std::string& bare_message() const noexcept { return message_; }

private:
    static std::string format(const std::string& message, int line, int column) {
        return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message;
    }

    int line_;
    int column_;
    std::string message_;
};

/// An iterative method ran out of iterations. Carries the best iterate found.
class NonConvergence : public Error {
public:
    NonConvergence(const std::string& message, std::vector<double> best_iterate, double residual)
        : Error(message), best_iterate_(std::move(best_iterate)), residual_(residual) {}

    [[nodiscard]] const std::vector<double>& best_iterate() const noexcept { return best_iterate_; }
    [[nodiscard]] double residual() const noexcept { return residual_; }

private:
    std::vector<double> best_iterate_;
    double residual_;
};

/// CG hit a non-positive curvature direction; the system is not SPD.
class SolverBreakdown : public Error {
public:
    using Error::Error;
};

/// A study was requested whose hypotheses are not declared satisfied.
class HypothesisRefused : public Error {
public:
    HypothesisRefused(const std::string& hypothesis, const std::string& reason)
        : Error("refused: hypothesis " + hypothesis + " not satisfied (" + reason + ")"),
          hypothesis_(hypothesis), reason_(reason) {}

    [[nodiscard]] const std::string& hypothesis() const noexcept { return hypothesis_; }
    [[nodiscard]] const std::string& reason() const noexcept { return reason_; }

private:
    std::string hypothesis_;
    std::string reason_;
};

}  // namespace aniso
