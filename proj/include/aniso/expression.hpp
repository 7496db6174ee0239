#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace aniso {

/// Values bound to the free variables of an expression.
struct Variables {
    double x1 = 0.0;
    double x2 = 0.0;
    double t = 0.0;
    double eps = 1.0;
    double s = 0.0;
};

/// A parsed closed-form scalar expression.
///
/// Grammar (whitespace ignored):
///
///     expr   := term (('+' | '-') term)*
///     term   := unary (('*' | '/') unary)*
///     unary  := ('-' | '+') unary | power
///     power  := atom ('^' unary)?
///     atom   := number | name | name '(' expr ')' | '(' expr ')'
///
/// Names: the variables x1, x2, t, eps, s; the constant pi; the functions
/// sin, cos, exp, sqrt, atan, tanh, abs. Expressions are immutable and
/// cheap to copy; evaluation is reentrant.
class Expression {
public:
    /// The constant zero.
    Expression();

    /// Throws ParseError (line 1, column of the offending token).
    static Expression parse(std::string_view text);
    static Expression constant(double value);

    [[nodiscard]] double operator()(const Variables& vars) const;
    [[nodiscard]] double operator()(double x1, double x2) const { return (*this)({x1, x2}); }

    [[nodiscard]] const std::string& source() const noexcept { return source_; }

    /// True when the expression does not reference the named variable.
    [[nodiscard]] bool independent_of(std::string_view variable) const;
    [[nodiscard]] bool is_constant() const;

    enum class Op : unsigned char {
        Number, X1, X2, T, Eps, S,
        Add, Sub, Mul, Div, Pow, Neg,
        Sin, Cos, Exp, Sqrt, Atan, Tanh, Abs
    };

    struct Node {
        Op op;
        double value = 0.0;
        int lhs = -1;
        int rhs = -1;
    };

private:
    Expression(std::shared_ptr<const std::vector<Node>> nodes, int root, std::string source);

    [[nodiscard]] double eval(int index, const Variables& vars) const;

    std::shared_ptr<const std::vector<Node>> nodes_;
    int root_ = 0;
    std::string source_;
};

}  // namespace aniso
