#ifndef DARBOUX_EXPR_HPP
#define DARBOUX_EXPR_HPP

#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "darboux/errors.hpp"

namespace darboux {

/// Immutable expression tree in a single real variable.
///
/// Grammar (lowest to highest precedence):
///
///     sum     := product (('+' | '-') product)*
///     product := unary (('*' | '/') unary)*
///     unary   := '-' unary | power
///     power   := primary ('^' unary)?          right-associative
///     primary := number | name | func '(' sum ')' | '(' sum ')'
///
/// `func` is one of exp, ln, sin, cos, sqrt, abs. Names resolve to the
/// variable, the constants `pi` and `e`, or caller-supplied constants.
/// Nodes are shared between trees, so copies are cheap and thread-safe.
class Expr {
public:
    enum class Kind { Number, Variable, Add, Sub, Mul, Div, Pow, Neg, Call };
    enum class Function { Exp, Ln, Sin, Cos, Sqrt, Abs };

    struct Node {
        Kind kind;
        double value = 0.0;
        Function fn = Function::Exp;
        std::shared_ptr<const Node> lhs;
        std::shared_ptr<const Node> rhs;
    };
    using NodePtr = std::shared_ptr<const Node>;

    Expr() = default;
    Expr(NodePtr root, std::string variable) : root_(std::move(root)), variable_(std::move(variable)) {}

    static Expr constant(double value, std::string variable = "x");

    double operator()(double x) const;

    const NodePtr& root() const noexcept { return root_; }
    const std::string& variable() const noexcept { return variable_; }
    bool empty() const noexcept { return root_ == nullptr; }
    /// True when the variable occurs anywhere in the tree.
    bool depends_on_variable() const;

private:
    NodePtr root_;
    std::string variable_ = "x";
};

using Constants = std::map<std::string, double, std::less<>>;

/// Throws ParseError on malformed input or unknown identifiers.
Expr parse(std::string_view text, std::string_view variable = "x", const Constants& constants = {});

/// Throws DomainError naming the offending subexpression.
double eval(const Expr& e, double x);

/// Exact symbolic derivative. Only trivial 0/1 folding is applied.
Expr differentiate(const Expr& e);

/// Fully parenthesized text that parses back to an identical tree.
std::string unparse(const Expr& e);

}  // namespace darboux

#endif  // DARBOUX_EXPR_HPP
