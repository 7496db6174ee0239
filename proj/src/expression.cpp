#include "aniso/expression.hpp"

#include "aniso/errors.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace aniso {

namespace {

using Op = Expression::Op;
using Node = Expression::Node;

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    std::vector<Node> run(int& root) {
        root = expr();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return std::move(nodes_);
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg + " in expression '" + std::string(text_) + "'", 1,
                         static_cast<int>(pos_) + 1);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    int push(Op op, int lhs = -1, int rhs = -1, double value = 0.0) {
        nodes_.push_back({op, value, lhs, rhs});
        return static_cast<int>(nodes_.size()) - 1;
    }

    int expr() {
        int lhs = term();
        for (;;) {
            if (accept('+')) lhs = push(Op::Add, lhs, term());
            else if (accept('-')) lhs = push(Op::Sub, lhs, term());
            else return lhs;
        }
    }

    int term() {
        int lhs = unary();
        for (;;) {
            if (accept('*')) lhs = push(Op::Mul, lhs, unary());
            else if (accept('/')) lhs = push(Op::Div, lhs, unary());
            else return lhs;
        }
    }

    int unary() {
        if (accept('-')) return push(Op::Neg, unary());
        if (accept('+')) return unary();
        return power();
    }

    int power() {
        int base = atom();
        if (accept('^')) return push(Op::Pow, base, unary());
        return base;
    }

    int atom() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            int inner = expr();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return name();
        fail(std::string("unexpected character '") + c + "'");
    }

    int number() {
        const char* begin = text_.data() + pos_;
        const char* end = text_.data() + text_.size();
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc()) fail("malformed number");
        pos_ += static_cast<std::size_t>(ptr - begin);
        return push(Op::Number, -1, -1, value);
    }

    int name() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string_view id = text_.substr(start, pos_ - start);
        if (id == "x1") return push(Op::X1);
        if (id == "x2") return push(Op::X2);
        if (id == "t") return push(Op::T);
        if (id == "eps") return push(Op::Eps);
        if (id == "s") return push(Op::S);
        if (id == "pi") return push(Op::Number, -1, -1, std::numbers::pi);

        Op fn;
        if (id == "sin") fn = Op::Sin;
        else if (id == "cos") fn = Op::Cos;
        else if (id == "exp") fn = Op::Exp;
        else if (id == "sqrt") fn = Op::Sqrt;
        else if (id == "atan") fn = Op::Atan;
        else if (id == "tanh") fn = Op::Tanh;
        else if (id == "abs") fn = Op::Abs;
        else {
            pos_ = start;
            fail("unknown name '" + std::string(id) + "'");
        }
        if (!accept('(')) fail("expected '(' after function name");
        int arg = expr();
        if (!accept(')')) fail("expected ')'");
        return push(fn, arg);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::vector<Node> nodes_;
};

bool references(const std::vector<Node>& nodes, Op op) {
    for (const auto& n : nodes)
        if (n.op == op) return true;
    return false;
}

}  // namespace

Expression::Expression() : Expression(constant(0.0)) {}

Expression::Expression(std::shared_ptr<const std::vector<Node>> nodes, int root, std::string source)
    : nodes_(std::move(nodes)), root_(root), source_(std::move(source)) {}

Expression Expression::parse(std::string_view text) {
    Parser parser(text);
    int root = 0;
    auto nodes = parser.run(root);
    return Expression(std::make_shared<const std::vector<Node>>(std::move(nodes)), root,
                      std::string(text));
}

Expression Expression::constant(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    std::vector<Node> nodes{{Op::Number, value, -1, -1}};
    return Expression(std::make_shared<const std::vector<Node>>(std::move(nodes)), 0, buf);
}

double Expression::operator()(const Variables& vars) const { return eval(root_, vars); }

double Expression::eval(int index, const Variables& v) const {
    const Node& n = (*nodes_)[static_cast<std::size_t>(index)];
    switch (n.op) {
        case Op::Number: return n.value;
        case Op::X1: return v.x1;
        case Op::X2: return v.x2;
        case Op::T: return v.t;
        case Op::Eps: return v.eps;
        case Op::S: return v.s;
        case Op::Add: return eval(n.lhs, v) + eval(n.rhs, v);
        case Op::Sub: return eval(n.lhs, v) - eval(n.rhs, v);
        case Op::Mul: return eval(n.lhs, v) * eval(n.rhs, v);
        case Op::Div: return eval(n.lhs, v) / eval(n.rhs, v);
        case Op::Pow: return std::pow(eval(n.lhs, v), eval(n.rhs, v));
        case Op::Neg: return -eval(n.lhs, v);
        case Op::Sin: return std::sin(eval(n.lhs, v));
        case Op::Cos: return std::cos(eval(n.lhs, v));
        case Op::Exp: return std::exp(eval(n.lhs, v));
        case Op::Sqrt: return std::sqrt(eval(n.lhs, v));
        case Op::Atan: return std::atan(eval(n.lhs, v));
        case Op::Tanh: return std::tanh(eval(n.lhs, v));
        case Op::Abs: return std::abs(eval(n.lhs, v));
    }
    return 0.0;
}

bool Expression::independent_of(std::string_view variable) const {
    if (variable == "x1") return !references(*nodes_, Op::X1);
    if (variable == "x2") return !references(*nodes_, Op::X2);
    if (variable == "t") return !references(*nodes_, Op::T);
    if (variable == "eps") return !references(*nodes_, Op::Eps);
    if (variable == "s") return !references(*nodes_, Op::S);
    return true;
}

bool Expression::is_constant() const {
    return independent_of("x1") && independent_of("x2") && independent_of("t") &&
           independent_of("eps") && independent_of("s");
}

}  // namespace aniso
