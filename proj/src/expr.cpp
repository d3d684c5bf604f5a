#include "delaylab/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <utility>

#include "delaylab/error.hpp"

namespace delaylab::expr {
namespace {

using NodePtr = std::unique_ptr<Node>;

struct NamedFunction {
    std::string_view name;
    Function function;
};

constexpr std::array<NamedFunction, 6> kFunctions{{
    {"exp", Function::Exp},
    {"log", Function::Log},
    {"sin", Function::Sin},
    {"cos", Function::Cos},
    {"sqrt", Function::Sqrt},
    {"abs", Function::Abs},
}};

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    NodePtr parse_all() {
        skip_space();
        if (pos_ == src_.size()) throw ParseError("empty expression", pos_);
        auto root = parse_expr();
        skip_space();
        if (pos_ != src_.size()) {
            if (src_[pos_] == ')') throw ParseError("unbalanced ')'", pos_);
            throw ParseError(std::string("unexpected '") + src_[pos_] + "'", pos_);
        }
        return root;
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;

    void skip_space() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    static NodePtr binary(BinaryOp op, NodePtr lhs, NodePtr rhs) {
        auto n = std::make_unique<Node>();
        n->kind = Node::Kind::Binary;
        n->op = op;
        n->begin = lhs->begin;
        n->end = rhs->end;
        n->lhs = std::move(lhs);
        n->rhs = std::move(rhs);
        return n;
    }

    NodePtr parse_expr() {
        auto lhs = parse_term();
        for (;;) {
            if (accept('+')) {
                lhs = binary(BinaryOp::Add, std::move(lhs), parse_term());
            } else if (accept('-')) {
                lhs = binary(BinaryOp::Sub, std::move(lhs), parse_term());
            } else {
                return lhs;
            }
        }
    }

    NodePtr parse_term() {
        auto lhs = parse_unary();
        for (;;) {
            if (accept('*')) {
                lhs = binary(BinaryOp::Mul, std::move(lhs), parse_unary());
            } else if (accept('/')) {
                lhs = binary(BinaryOp::Div, std::move(lhs), parse_unary());
            } else {
                return lhs;
            }
        }
    }

    NodePtr parse_unary() {
        skip_space();
        const std::size_t start = pos_;
        if (accept('-')) {
            auto n = std::make_unique<Node>();
            n->kind = Node::Kind::Negate;
            n->lhs = parse_unary();
            n->begin = start;
            n->end = n->lhs->end;
            return n;
        }
        return parse_power();
    }

    NodePtr parse_power() {
        auto base = parse_primary();
        if (accept('^')) return binary(BinaryOp::Pow, std::move(base), parse_unary());
        return base;
    }

    NodePtr parse_primary() {
        skip_space();
        if (pos_ == src_.size()) throw ParseError("unexpected end of input", pos_);
        const std::size_t start = pos_;
        const char c = src_[pos_];

        if (c == '(') {
            ++pos_;
            auto inner = parse_expr();
            if (!accept(')')) throw ParseError("unbalanced '(' opened", start);
            // widen the span to include the parentheses
            inner->begin = start;
            inner->end = pos_;
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        if (c == ')') throw ParseError("unbalanced ')'", pos_);
        throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }

    NodePtr parse_number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                ++pos_;
                ++n;
            }
            return n;
        };
        std::size_t mantissa = digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            mantissa += digits();
        }
        if (mantissa == 0) throw ParseError("malformed number", start);
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            const std::size_t mark = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (digits() == 0) throw ParseError("malformed exponent", mark);
        }
        double value = 0.0;
        const char* first = src_.data() + start;
        const char* last = src_.data() + pos_;
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
            throw ParseError("number out of range", start);
        }
        // "2x": a number glued to an identifier is not implicit multiplication
        if (pos_ < src_.size() &&
            (std::isalpha(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
            throw ParseError("identifier directly after number", pos_);
        }
        auto n = std::make_unique<Node>();
        n->kind = Node::Kind::Constant;
        n->value = value;
        n->begin = start;
        n->end = pos_;
        return n;
    }

    NodePtr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
            ++pos_;
        }
        const std::string_view name = src_.substr(start, pos_ - start);

        for (const auto& fn : kFunctions) {
            if (fn.name != name) continue;
            if (!accept('(')) throw ParseError("expected '(' after " + std::string(name), pos_);
            const std::size_t open = pos_ - 1;
            auto n = std::make_unique<Node>();
            n->kind = Node::Kind::Call;
            n->function = fn.function;
            n->lhs = parse_expr();
            if (!accept(')')) throw ParseError("unbalanced '(' opened", open);
            n->begin = start;
            n->end = pos_;
            return n;
        }

        auto n = std::make_unique<Node>();
        n->kind = Node::Kind::Variable;
        n->begin = start;
        n->end = pos_;
        if (name == "x") {
            n->variable = Variable::X;
        } else if (name == "z") {
            n->variable = Variable::Z;
        } else if (name == "eps") {
            n->variable = Variable::Eps;
        } else {
            throw ParseError("unknown identifier '" + std::string(name) +
                                 "' (variables: x, z, eps; functions: exp, log, sin, cos, sqrt, abs)",
                             start);
        }
        return n;
    }
};

struct Evaluator {
    const std::string& source;
    double x, z, eps;

    [[noreturn]] void fault(const Node& n, const char* what) const {
        throw DomainFault(what, source.substr(n.begin, n.end - n.begin));
    }

    double checked(const Node& n, double v) const {
        if (!std::isfinite(v)) fault(n, "non-finite value");
        return v;
    }

    double operator()(const Node& n) const {
        switch (n.kind) {
            case Node::Kind::Constant:
                return n.value;
            case Node::Kind::Variable:
                switch (n.variable) {
                    case Variable::X: return x;
                    case Variable::Z: return z;
                    case Variable::Eps: return eps;
                }
                break;
            case Node::Kind::Negate:
                return -(*this)(*n.lhs);
            case Node::Kind::Binary: {
                const double a = (*this)(*n.lhs);
                const double b = (*this)(*n.rhs);
                switch (n.op) {
                    case BinaryOp::Add: return checked(n, a + b);
                    case BinaryOp::Sub: return checked(n, a - b);
                    case BinaryOp::Mul: return checked(n, a * b);
                    case BinaryOp::Div:
                        if (b == 0.0) fault(n, "division by zero");
                        return checked(n, a / b);
                    case BinaryOp::Pow:
                        if (a == 0.0 && b < 0.0) fault(n, "division by zero");
                        if (a < 0.0 && std::trunc(b) != b) fault(n, "negative base with fractional exponent");
                        return checked(n, std::pow(a, b));
                }
                break;
            }
            case Node::Kind::Call: {
                const double a = (*this)(*n.lhs);
                switch (n.function) {
                    case Function::Exp: return checked(n, std::exp(a));
                    case Function::Log:
                        if (a <= 0.0) fault(n, "log of non-positive value");
                        return std::log(a);
                    case Function::Sin: return std::sin(a);
                    case Function::Cos: return std::cos(a);
                    case Function::Sqrt:
                        if (a < 0.0) fault(n, "sqrt of negative value");
                        return std::sqrt(a);
                    case Function::Abs: return std::abs(a);
                }
                break;
            }
        }
        fault(n, "corrupt expression node");
    }
};

}  // namespace

double Expr::operator()(double x, double z, double eps) const {
    return Evaluator{source_, x, z, eps}(*root_);
}

Expr parse(std::string_view source) {
    NodePtr root = Parser(source).parse_all();
    return Expr(std::shared_ptr<const Node>(std::move(root)), std::string(source));
}

}  // namespace delaylab::expr
