#include "darboux/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <system_error>

namespace darboux {

namespace {

using Kind = Expr::Kind;
using Function = Expr::Function;
using NodePtr = Expr::NodePtr;
using Node = Expr::Node;

constexpr std::array<std::pair<std::string_view, Function>, 6> kFunctions{{
    {"exp", Function::Exp},
    {"ln", Function::Ln},
    {"sin", Function::Sin},
    {"cos", Function::Cos},
    {"sqrt", Function::Sqrt},
    {"abs", Function::Abs},
}};

std::string_view function_name(Function f) {
    for (const auto& [name, fn] : kFunctions)
        if (fn == f) return name;
    return "?";
}

NodePtr number(double v) { return std::make_shared<const Node>(Node{Kind::Number, v, Function::Exp, nullptr, nullptr}); }
NodePtr variable() { return std::make_shared<const Node>(Node{Kind::Variable, 0.0, Function::Exp, nullptr, nullptr}); }
NodePtr binary(Kind k, NodePtr a, NodePtr b) {
    return std::make_shared<const Node>(Node{k, 0.0, Function::Exp, std::move(a), std::move(b)});
}
NodePtr negate(NodePtr a) {
    return std::make_shared<const Node>(Node{Kind::Neg, 0.0, Function::Exp, std::move(a), nullptr});
}
NodePtr call(Function f, NodePtr a) {
    return std::make_shared<const Node>(Node{Kind::Call, 0.0, f, std::move(a), nullptr});
}

std::string format_number(double v) {
    std::array<char, 32> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
public:
    Parser(std::string_view text, std::string_view var, const Constants& constants)
        : text_(text), var_(var), constants_(constants) {}

    NodePtr run() {
        skip_space();
        if (pos_ == text_.size()) throw ParseError("empty expression", pos_);
        NodePtr root = sum();
        skip_space();
        if (pos_ != text_.size())
            throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
        return root;
    }

private:
    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= text_.size())
                throw ParseError(std::string("expected '") + c + "' but input ended", pos_);
            throw ParseError(std::string("expected '") + c + "'", pos_);
        }
    }

    NodePtr sum() {
        NodePtr lhs = product();
        for (;;) {
            if (accept('+'))
                lhs = binary(Kind::Add, lhs, product());
            else if (accept('-'))
                lhs = binary(Kind::Sub, lhs, product());
            else
                return lhs;
        }
    }

    NodePtr product() {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*'))
                lhs = binary(Kind::Mul, lhs, unary());
            else if (accept('/'))
                lhs = binary(Kind::Div, lhs, unary());
            else
                return lhs;
        }
    }

    NodePtr unary() {
        if (accept('-')) return negate(unary());
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (accept('^')) return binary(Kind::Pow, base, unary());
        return base;
    }

    NodePtr primary() {
        skip_space();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr inner = sum();
            expect(')');
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return literal();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
        throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }

    NodePtr literal() {
        const std::size_t start = pos_;
        auto digits = [&] {
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        };
        digits();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            digits();
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t save = pos_++;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                digits();
            else
                pos_ = save;  // bare 'e' is not an exponent
        }
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
        if (ec != std::errc() || ptr != text_.data() + pos_)
            throw ParseError("malformed number", start);
        return number(value);
    }

    NodePtr name() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string_view id = text_.substr(start, pos_ - start);

        for (const auto& [fname, fn] : kFunctions) {
            if (id == fname) {
                if (!accept('(')) throw ParseError("expected '(' after " + std::string(id), pos_);
                NodePtr arg = sum();
                expect(')');
                return call(fn, arg);
            }
        }
        if (id == var_) return variable();
        if (auto it = constants_.find(id); it != constants_.end()) return number(it->second);
        if (id == "pi") return number(std::numbers::pi);
        if (id == "e") return number(std::numbers::e);
        throw ParseError("unknown identifier '" + std::string(id) + "'", start);
    }

    std::string_view text_;
    std::string_view var_;
    const Constants& constants_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Printing

void print(const Node& n, const std::string& var, std::string& out) {
    switch (n.kind) {
    case Kind::Number:
        if (std::signbit(n.value)) {
            out += "(-(" + format_number(-n.value) + "))";
        } else {
            out += format_number(n.value);
        }
        return;
    case Kind::Variable:
        out += var;
        return;
    case Kind::Neg:
        out += "(-";
        print(*n.lhs, var, out);
        out += ')';
        return;
    case Kind::Call:
        out += function_name(n.fn);
        out += '(';
        print(*n.lhs, var, out);
        out += ')';
        return;
    default:
        break;
    }
    static constexpr char ops[] = {'+', '-', '*', '/', '^'};
    const char op = ops[static_cast<int>(n.kind) - static_cast<int>(Kind::Add)];
    out += '(';
    print(*n.lhs, var, out);
    out += op;
    print(*n.rhs, var, out);
    out += ')';
}

std::string to_text(const Node& n, const std::string& var) {
    std::string s;
    print(n, var, s);
    return s;
}

// ---------------------------------------------------------------------------
// Evaluation

double evaluate(const Node& n, double x, const std::string& var) {
    switch (n.kind) {
    case Kind::Number:
        return n.value;
    case Kind::Variable:
        return x;
    case Kind::Neg:
        return -evaluate(*n.lhs, x, var);
    case Kind::Add:
        return evaluate(*n.lhs, x, var) + evaluate(*n.rhs, x, var);
    case Kind::Sub:
        return evaluate(*n.lhs, x, var) - evaluate(*n.rhs, x, var);
    case Kind::Mul:
        return evaluate(*n.lhs, x, var) * evaluate(*n.rhs, x, var);
    case Kind::Div: {
        const double num = evaluate(*n.lhs, x, var);
        const double den = evaluate(*n.rhs, x, var);
        if (den == 0.0) throw DomainError("division by zero", to_text(n, var));
        return num / den;
    }
    case Kind::Pow: {
        const double b = evaluate(*n.lhs, x, var);
        const double p = evaluate(*n.rhs, x, var);
        if (b < 0.0 && p != std::trunc(p))
            throw DomainError("negative base with non-integer exponent", to_text(n, var));
        if (b == 0.0 && p < 0.0) throw DomainError("division by zero", to_text(n, var));
        return std::pow(b, p);
    }
    case Kind::Call: {
        const double a = evaluate(*n.lhs, x, var);
        switch (n.fn) {
        case Function::Exp:
            return std::exp(a);
        case Function::Ln:
            if (a <= 0.0) throw DomainError("logarithm of non-positive value", to_text(n, var));
            return std::log(a);
        case Function::Sin:
            return std::sin(a);
        case Function::Cos:
            return std::cos(a);
        case Function::Sqrt:
            if (a < 0.0) throw DomainError("square root of negative value", to_text(n, var));
            return std::sqrt(a);
        case Function::Abs:
            return std::abs(a);
        }
    }
    }
    return 0.0;
}

bool contains_variable(const Node& n) {
    if (n.kind == Kind::Variable) return true;
    if (n.lhs && contains_variable(*n.lhs)) return true;
    if (n.rhs && contains_variable(*n.rhs)) return true;
    return false;
}

// ---------------------------------------------------------------------------
// Differentiation, with 0/1 folding only.

bool is_number(const NodePtr& n, double v) { return n->kind == Kind::Number && n->value == v; }

NodePtr add(NodePtr a, NodePtr b) {
    if (is_number(a, 0.0)) return b;
    if (is_number(b, 0.0)) return a;
    return binary(Kind::Add, std::move(a), std::move(b));
}

NodePtr sub(NodePtr a, NodePtr b) {
    if (is_number(b, 0.0)) return a;
    if (is_number(a, 0.0)) return negate(std::move(b));
    return binary(Kind::Sub, std::move(a), std::move(b));
}

NodePtr mul(NodePtr a, NodePtr b) {
    if (is_number(a, 0.0) || is_number(b, 0.0)) return number(0.0);
    if (is_number(a, 1.0)) return b;
    if (is_number(b, 1.0)) return a;
    return binary(Kind::Mul, std::move(a), std::move(b));
}

NodePtr div(NodePtr a, NodePtr b) {
    if (is_number(a, 0.0)) return number(0.0);
    if (is_number(b, 1.0)) return a;
    return binary(Kind::Div, std::move(a), std::move(b));
}

NodePtr derive(const NodePtr& n) {
    switch (n->kind) {
    case Kind::Number:
        return number(0.0);
    case Kind::Variable:
        return number(1.0);
    case Kind::Neg: {
        NodePtr d = derive(n->lhs);
        return is_number(d, 0.0) ? d : negate(d);
    }
    case Kind::Add:
        return add(derive(n->lhs), derive(n->rhs));
    case Kind::Sub:
        return sub(derive(n->lhs), derive(n->rhs));
    case Kind::Mul:
        return add(mul(derive(n->lhs), n->rhs), mul(n->lhs, derive(n->rhs)));
    case Kind::Div: {
        // (u'v - uv') / v^2
        NodePtr num = sub(mul(derive(n->lhs), n->rhs), mul(n->lhs, derive(n->rhs)));
        return div(num, binary(Kind::Pow, n->rhs, number(2.0)));
    }
    case Kind::Pow: {
        const NodePtr& u = n->lhs;
        const NodePtr& v = n->rhs;
        const bool u_var = contains_variable(*u);
        const bool v_var = contains_variable(*v);
        if (!v_var) {
            if (!u_var) return number(0.0);
            NodePtr lowered = v->kind == Kind::Number ? number(v->value - 1.0) : sub(v, number(1.0));
            return mul(mul(v, binary(Kind::Pow, u, lowered)), derive(u));
        }
        if (!u_var) return mul(mul(n, call(Function::Ln, u)), derive(v));
        // u^v (v' ln u + v u'/u)
        NodePtr inner = add(mul(derive(v), call(Function::Ln, u)), div(mul(v, derive(u)), u));
        return mul(n, inner);
    }
    case Kind::Call: {
        const NodePtr& u = n->lhs;
        NodePtr du = derive(u);
        if (is_number(du, 0.0)) return du;
        switch (n->fn) {
        case Function::Exp:
            return mul(n, du);
        case Function::Ln:
            return div(du, u);
        case Function::Sin:
            return mul(call(Function::Cos, u), du);
        case Function::Cos:
            return mul(negate(call(Function::Sin, u)), du);
        case Function::Sqrt:
            return div(du, mul(number(2.0), n));
        case Function::Abs:
            // sign(u) u'; undefined at u = 0, which surfaces as 0/0 at evaluation.
            return mul(div(u, n), du);
        }
    }
    }
    return number(0.0);
}

}  // namespace

Expr Expr::constant(double value, std::string variable) { return Expr(number(value), std::move(variable)); }

double Expr::operator()(double x) const { return eval(*this, x); }

bool Expr::depends_on_variable() const { return root_ && contains_variable(*root_); }

Expr parse(std::string_view text, std::string_view variable, const Constants& constants) {
    Parser p(text, variable, constants);
    return Expr(p.run(), std::string(variable));
}

double eval(const Expr& e, double x) {
    if (e.empty()) throw std::invalid_argument("evaluating an empty expression");
    return evaluate(*e.root(), x, e.variable());
}

Expr differentiate(const Expr& e) {
    if (e.empty()) throw std::invalid_argument("differentiating an empty expression");
    return Expr(derive(e.root()), e.variable());
}

std::string unparse(const Expr& e) {
    if (e.empty()) return {};
    return to_text(*e.root(), e.variable());
}

}  // namespace darboux
