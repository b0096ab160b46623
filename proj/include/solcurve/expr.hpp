#ifndef SOLCURVE_EXPR_HPP
#define SOLCURVE_EXPR_HPP

/// \file expr.hpp
/// Arithmetic expression trees with parsing, evaluation and symbolic
/// differentiation. Grammar: +, -, *, /, ^ (right-associative), unary
/// minus, parentheses, numeric literals, named variables, and the
/// functions sin, cos, exp, log, abs. The derivative of abs at 0 is
/// defined as 0.

#include <cctype>
#include <cmath>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace solcurve::expr {

enum class Op {
    Num,
    Var,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Neg,
    Sin,
    Cos,
    Exp,
    Log,
    Abs,
    Sign  // internal: produced by differentiating Abs, not parseable
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    Op op;
    double value = 0.0;   // Op::Num
    std::string name;     // Op::Var
    NodePtr a, b;         // children (unary ops use a only)
};

/// Thrown on malformed input; position is a 0-based offset into the text.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t position)
        : std::runtime_error(what + " (at position " + std::to_string(position) + ")"),
          position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

// --- smart constructors (fold the trivial cases so printed trees re-parse
// --- to the same structure; no further simplification is attempted) ------

inline NodePtr num(double v) { return std::make_shared<Node>(Node{Op::Num, v, {}, nullptr, nullptr}); }
inline NodePtr var(std::string name) {
    return std::make_shared<Node>(Node{Op::Var, 0.0, std::move(name), nullptr, nullptr});
}

inline bool is_num(const NodePtr& n, double v) { return n->op == Op::Num && n->value == v; }

inline NodePtr neg(NodePtr x) {
    if (x->op == Op::Num) return num(-x->value);
    return std::make_shared<Node>(Node{Op::Neg, 0.0, {}, std::move(x), nullptr});
}

inline NodePtr add(NodePtr l, NodePtr r) {
    if (is_num(l, 0.0)) return r;
    if (is_num(r, 0.0)) return l;
    if (l->op == Op::Num && r->op == Op::Num) return num(l->value + r->value);
    return std::make_shared<Node>(Node{Op::Add, 0.0, {}, std::move(l), std::move(r)});
}

inline NodePtr sub(NodePtr l, NodePtr r) {
    if (is_num(r, 0.0)) return l;
    if (l->op == Op::Num && r->op == Op::Num) return num(l->value - r->value);
    if (is_num(l, 0.0)) return neg(std::move(r));
    return std::make_shared<Node>(Node{Op::Sub, 0.0, {}, std::move(l), std::move(r)});
}

inline NodePtr mul(NodePtr l, NodePtr r) {
    if (is_num(l, 0.0) || is_num(r, 0.0)) return num(0.0);
    if (is_num(l, 1.0)) return r;
    if (is_num(r, 1.0)) return l;
    if (l->op == Op::Num && r->op == Op::Num) return num(l->value * r->value);
    return std::make_shared<Node>(Node{Op::Mul, 0.0, {}, std::move(l), std::move(r)});
}

inline NodePtr div(NodePtr l, NodePtr r) {
    if (is_num(l, 0.0)) return num(0.0);
    if (is_num(r, 1.0)) return l;
    return std::make_shared<Node>(Node{Op::Div, 0.0, {}, std::move(l), std::move(r)});
}

inline NodePtr pow(NodePtr l, NodePtr r) {
    if (is_num(r, 1.0)) return l;
    if (is_num(r, 0.0)) return num(1.0);
    return std::make_shared<Node>(Node{Op::Pow, 0.0, {}, std::move(l), std::move(r)});
}

inline NodePtr unary(Op op, NodePtr x) {
    return std::make_shared<Node>(Node{op, 0.0, {}, std::move(x), nullptr});
}

// --- evaluation ----------------------------------------------------------

/// Binds variable names to values; unknown names never reach evaluation
/// because the parser checks them against the allowed set.
struct Bindings {
    std::vector<std::pair<std::string, double>> vars;
    double lookup(const std::string& name) const {
        for (const auto& [k, v] : vars)
            if (k == name) return v;
        throw std::logic_error("unbound variable: " + name);
    }
};

inline double evaluate(const Node& n, const Bindings& env) {
    switch (n.op) {
        case Op::Num: return n.value;
        case Op::Var: return env.lookup(n.name);
        case Op::Add: return evaluate(*n.a, env) + evaluate(*n.b, env);
        case Op::Sub: return evaluate(*n.a, env) - evaluate(*n.b, env);
        case Op::Mul: return evaluate(*n.a, env) * evaluate(*n.b, env);
        case Op::Div: return evaluate(*n.a, env) / evaluate(*n.b, env);
        case Op::Pow: return std::pow(evaluate(*n.a, env), evaluate(*n.b, env));
        case Op::Neg: return -evaluate(*n.a, env);
        case Op::Sin: return std::sin(evaluate(*n.a, env));
        case Op::Cos: return std::cos(evaluate(*n.a, env));
        case Op::Exp: return std::exp(evaluate(*n.a, env));
        case Op::Log: return std::log(evaluate(*n.a, env));
        case Op::Abs: return std::abs(evaluate(*n.a, env));
        case Op::Sign: {
            double x = evaluate(*n.a, env);
            return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
        }
    }
    return 0.0;
}

inline bool references(const Node& n, const std::string& name) {
    switch (n.op) {
        case Op::Num: return false;
        case Op::Var: return n.name == name;
        default:
            if (n.a && references(*n.a, name)) return true;
            return n.b && references(*n.b, name);
    }
}

// --- symbolic differentiation -------------------------------------------

inline NodePtr derivative(const NodePtr& n, const std::string& v) {
    switch (n->op) {
        case Op::Num: return num(0.0);
        case Op::Var: return num(n->name == v ? 1.0 : 0.0);
        case Op::Add: return add(derivative(n->a, v), derivative(n->b, v));
        case Op::Sub: return sub(derivative(n->a, v), derivative(n->b, v));
        case Op::Mul:
            return add(mul(derivative(n->a, v), n->b), mul(n->a, derivative(n->b, v)));
        case Op::Div:
            return div(sub(mul(derivative(n->a, v), n->b), mul(n->a, derivative(n->b, v))),
                       pow(n->b, num(2.0)));
        case Op::Pow: {
            // General rule d(f^g) = f^g (g' log f + g f'/f); the common
            // constant-exponent case folds to g f^(g-1) f'.
            if (n->b->op == Op::Num) {
                double e = n->b->value;
                return mul(mul(num(e), pow(n->a, num(e - 1.0))), derivative(n->a, v));
            }
            NodePtr gp = derivative(n->b, v);
            NodePtr fp = derivative(n->a, v);
            return mul(pow(n->a, n->b),
                       add(mul(gp, unary(Op::Log, n->a)), div(mul(n->b, fp), n->a)));
        }
        case Op::Neg: return neg(derivative(n->a, v));
        case Op::Sin: return mul(unary(Op::Cos, n->a), derivative(n->a, v));
        case Op::Cos: return neg(mul(unary(Op::Sin, n->a), derivative(n->a, v)));
        case Op::Exp: return mul(unary(Op::Exp, n->a), derivative(n->a, v));
        case Op::Log: return div(derivative(n->a, v), n->a);
        case Op::Abs:
            // sign(x) * x'; sign evaluates to 0 at x = 0, which fixes
            // d|x|/dx at the kink to 0.
            return mul(unary(Op::Sign, n->a), derivative(n->a, v));
        case Op::Sign:
            return num(0.0);  // derivative a.e.; the jump at 0 is dropped
    }
    return num(0.0);
}

// --- printing -------------------------------------------------------------

inline int precedence(Op op) {
    switch (op) {
        case Op::Add:
        case Op::Sub: return 1;
        case Op::Mul:
        case Op::Div: return 2;
        case Op::Neg: return 3;
        case Op::Pow: return 4;
        default: return 5;
    }
}

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string to_string(const NodePtr& n);

inline std::string child_string(const NodePtr& child, int parent_prec, bool tight) {
    std::string s = to_string(child);
    int cp = precedence(child->op);
    // a negative literal prints with a leading '-', i.e. like a Neg node
    if (child->op == Op::Num && child->value < 0) cp = precedence(Op::Neg);
    if (cp < parent_prec || (tight && cp == parent_prec)) return "(" + s + ")";
    return s;
}

inline std::string to_string(const NodePtr& n) {
    switch (n->op) {
        // +, -, *, / parse left-associative, so right children of equal
        // precedence need parentheses for the tree to survive a re-parse
        case Op::Num: return format_number(n->value);
        case Op::Var: return n->name;
        case Op::Add: return child_string(n->a, 1, false) + " + " + child_string(n->b, 1, true);
        case Op::Sub: return child_string(n->a, 1, false) + " - " + child_string(n->b, 1, true);
        case Op::Mul: return child_string(n->a, 2, false) + "*" + child_string(n->b, 2, true);
        case Op::Div: return child_string(n->a, 2, false) + "/" + child_string(n->b, 2, true);
        case Op::Neg: return "-" + child_string(n->a, 3, false);
        case Op::Pow:
            // right-associative: parenthesize a left child of equal precedence
            return child_string(n->a, 4, true) + "^" + child_string(n->b, 3, false);
        case Op::Sin: return "sin(" + to_string(n->a) + ")";
        case Op::Cos: return "cos(" + to_string(n->a) + ")";
        case Op::Exp: return "exp(" + to_string(n->a) + ")";
        case Op::Log: return "log(" + to_string(n->a) + ")";
        case Op::Abs: return "abs(" + to_string(n->a) + ")";
        case Op::Sign: return "sign(" + to_string(n->a) + ")";
    }
    return {};
}

inline bool equal(const NodePtr& x, const NodePtr& y) {
    if (x->op != y->op) return false;
    switch (x->op) {
        case Op::Num: return x->value == y->value;
        case Op::Var: return x->name == y->name;
        default:
            if ((x->a == nullptr) != (y->a == nullptr)) return false;
            if ((x->b == nullptr) != (y->b == nullptr)) return false;
            if (x->a && !equal(x->a, y->a)) return false;
            if (x->b && !equal(x->b, y->b)) return false;
            return true;
    }
}

// --- recursive-descent parser ---------------------------------------------

class Parser {
public:
    Parser(std::string_view text, std::vector<std::string> allowed_vars)
        : text_(text), vars_(std::move(allowed_vars)) {}

    NodePtr parse() {
        NodePtr e = parse_expr();
        skip_ws();
        if (pos_ != text_.size()) throw ParseError("unexpected trailing input", pos_);
        return e;
    }

private:
    std::string_view text_;
    std::vector<std::string> vars_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool peek(char c) {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == c;
    }
    bool accept(char c) {
        if (peek(c)) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        for (;;) {
            if (accept('+')) lhs = add(lhs, parse_term());
            else if (accept('-')) lhs = sub(lhs, parse_term());
            else return lhs;
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_unary();
        for (;;) {
            if (accept('*')) lhs = mul(lhs, parse_unary());
            else if (accept('/')) lhs = div(lhs, parse_unary());
            else return lhs;
        }
    }

    NodePtr parse_unary() {
        if (accept('-')) return neg(parse_unary());
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_primary();
        if (accept('^')) return pow(base, parse_unary());  // right-associative
        return base;
    }

    NodePtr parse_primary() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = parse_expr();
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    NodePtr parse_number() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
            ++pos_;
        // exponent part
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t mark = pos_++;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    ++pos_;
            } else {
                pos_ = mark;  // "e" was an identifier boundary, not an exponent
            }
        }
        std::string tok(text_.substr(start, pos_ - start));
        try {
            std::size_t used = 0;
            double v = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            return num(v);
        } catch (const std::exception&) {
            throw ParseError("malformed number '" + tok + "'", start);
        }
    }

    NodePtr parse_ident() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        std::string name(text_.substr(start, pos_ - start));
        if (peek('(')) {
            Op op;
            if (name == "sin") op = Op::Sin;
            else if (name == "cos") op = Op::Cos;
            else if (name == "exp") op = Op::Exp;
            else if (name == "log") op = Op::Log;
            else if (name == "abs") op = Op::Abs;
            else throw ParseError("unknown function '" + name + "'", start);
            ++pos_;  // consume '('
            NodePtr arg = parse_expr();
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            return unary(op, arg);
        }
        for (const auto& v : vars_)
            if (v == name) return var(name);
        throw ParseError("unknown identifier '" + name + "'", start);
    }
};

inline NodePtr parse(std::string_view text, std::vector<std::string> allowed_vars) {
    return Parser(text, std::move(allowed_vars)).parse();
}

}  // namespace solcurve::expr

#endif  // SOLCURVE_EXPR_HPP
