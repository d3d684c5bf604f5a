#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

namespace delaylab::expr {

enum class Variable { X, Z, Eps };
enum class Function { Exp, Log, Sin, Cos, Sqrt, Abs };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };

struct Node {
    enum class Kind { Constant, Variable, Negate, Binary, Call };

    Kind kind = Kind::Constant;
    double value = 0.0;
    Variable variable = Variable::X;
    Function function = Function::Exp;
    BinaryOp op = BinaryOp::Add;
    std::unique_ptr<const Node> lhs;  // operand of Negate and Call, left of Binary
    std::unique_ptr<const Node> rhs;
    // byte range [begin, end) in the source text, used for fault reports
    std::size_t begin = 0;
    std::size_t end = 0;
};

/// Immutable parsed expression in the variables x, z and eps.
///
/// Copies share the tree. Evaluation touches no mutable state, so one Expr
/// may be evaluated from many threads at once.
class Expr {
public:
    Expr(std::shared_ptr<const Node> root, std::string source)
        : root_(std::move(root)), source_(std::move(source)) {}

    /// Throws DomainFault naming the offending subexpression when a function
    /// leaves its domain or any intermediate value is not finite.
    double operator()(double x, double z, double eps) const;

    const Node& root() const noexcept { return *root_; }
    const std::string& source() const noexcept { return source_; }

private:
    std::shared_ptr<const Node> root_;
    std::string source_;
};

/// Parses `source` under the grammar
///
///     expr    := term (('+' | '-') term)*
///     term    := unary (('*' | '/') unary)*
///     unary   := '-' unary | power
///     power   := primary ('^' unary)?
///     primary := number | variable | function '(' expr ')' | '(' expr ')'
///
/// so '^' is right-associative and binds tighter than unary minus
/// ("-x^2" is -(x^2)). Throws ParseError carrying the byte offset.
Expr parse(std::string_view source);

inline double eval(const Expr& e, double x, double z, double eps) { return e(x, z, eps); }

}  // namespace delaylab::expr
