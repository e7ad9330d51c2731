#pragma once

#include <memory>
#include <vector>

#include "hjq/expr.hpp"

namespace hjq::ast {

/// Raw expression tree as produced by parsers and test builders, before
/// canonical normalization. Only +, -, *, /, integer powers, rationals and
/// symbols appear; anything outside the polynomial fragment is rejected by
/// normalize().
struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    enum class Kind { Num, Sym, Add, Mul, Div, Neg, Pow };
    Kind kind;
    Rational num;                 // Num
    Symbol symbol;                // Sym
    std::vector<NodePtr> kids;    // Add, Mul (n-ary); Div (2); Neg (1); Pow (1)
    int exponent = 0;             // Pow
};

inline NodePtr num(Rational r) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Num;
    n->num = std::move(r);
    return n;
}
inline NodePtr num(long long v) { return num(Rational(v)); }
inline NodePtr sym(Symbol s) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Sym;
    n->symbol = std::move(s);
    return n;
}
inline NodePtr add(std::vector<NodePtr> kids) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Add;
    n->kids = std::move(kids);
    return n;
}
inline NodePtr mul(std::vector<NodePtr> kids) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Mul;
    n->kids = std::move(kids);
    return n;
}
inline NodePtr div(NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Div;
    n->kids = {std::move(a), std::move(b)};
    return n;
}
inline NodePtr neg(NodePtr a) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Neg;
    n->kids = {std::move(a)};
    return n;
}
inline NodePtr pow(NodePtr base, int e) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Pow;
    n->kids = {std::move(base)};
    n->exponent = e;
    return n;
}
inline NodePtr sub(NodePtr a, NodePtr b) { return add({std::move(a), neg(std::move(b))}); }

/// Canonical normal form of a raw tree. Idempotent on the result; throws
/// UnsupportedExpressionError for division by a non-constant or negative
/// powers of non-constants.
inline Expr normalize(const NodePtr& n) {
    switch (n->kind) {
        case Node::Kind::Num:
            return Expr::constant(n->num);
        case Node::Kind::Sym:
            return Expr::sym(n->symbol);
        case Node::Kind::Add: {
            Expr acc;
            for (const auto& k : n->kids) acc += normalize(k);
            return acc;
        }
        case Node::Kind::Mul: {
            Expr acc = Expr::one();
            for (const auto& k : n->kids) acc *= normalize(k);
            return acc;
        }
        case Node::Kind::Neg:
            return -normalize(n->kids[0]);
        case Node::Kind::Div: {
            Expr denom = normalize(n->kids[1]);
            if (!denom.is_constant())
                throw UnsupportedExpressionError("division by a non-constant expression");
            Rational d = denom.constant_value();
            if (is_zero(d)) throw UnsupportedExpressionError("division by zero");
            return Rational(Rational(1) / d) * normalize(n->kids[0]);
        }
        case Node::Kind::Pow: {
            Expr base = normalize(n->kids[0]);
            if (n->exponent >= 0) return base.pow(n->exponent);
            if (!base.is_constant())
                throw UnsupportedExpressionError("negative power of a non-constant expression");
            Rational b = base.constant_value();
            if (is_zero(b)) throw UnsupportedExpressionError("division by zero");
            Rational inv = Rational(1) / b;
            Expr acc = Expr::one();
            for (int i = 0; i < -n->exponent; ++i) acc = acc * Expr::constant(inv);
            return acc;
        }
    }
    throw Error("corrupt expression tree");
}

} // namespace hjq::ast
