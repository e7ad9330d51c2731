#pragma once

#include <random>
#include <vector>

#include "hjq/ast.hpp"
#include "hjq/expr.hpp"

namespace hjq::testing {

inline Rational random_rational(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> num(-9, 9);
    std::uniform_int_distribution<int> den(1, 4);
    return Rational(num(rng), den(rng));
}

/// Random polynomial with bounded degree and term count.
inline Expr random_expr(std::mt19937_64& rng, const std::vector<Symbol>& syms, int max_terms,
                        int max_degree) {
    std::uniform_int_distribution<int> nterms(0, max_terms);
    std::uniform_int_distribution<int> deg(0, max_degree);
    std::uniform_int_distribution<size_t> pick(0, syms.size() - 1);
    Expr acc;
    const int t = nterms(rng);
    for (int k = 0; k < t; ++k) {
        Expr term = Expr::constant(random_rational(rng));
        const int d = deg(rng);
        for (int j = 0; j < d; ++j) term = term * Expr::sym(syms[pick(rng)]);
        acc += term;
    }
    return acc;
}

/// A raw tree for the given monomials with random term order and random
/// association, for normal-form uniqueness checks.
inline ast::NodePtr random_tree(std::mt19937_64& rng, std::vector<ast::NodePtr> monomials) {
    if (monomials.empty()) return ast::num(0);
    std::shuffle(monomials.begin(), monomials.end(), rng);
    while (monomials.size() > 1) {
        std::uniform_int_distribution<size_t> pick(0, monomials.size() - 2);
        size_t i = pick(rng);
        ast::NodePtr merged = ast::add({monomials[i], monomials[i + 1]});
        monomials[i] = merged;
        monomials.erase(monomials.begin() + i + 1);
    }
    return monomials[0];
}

inline ast::NodePtr random_monomial_tree(std::mt19937_64& rng, const std::vector<Symbol>& syms,
                                         int max_degree) {
    std::uniform_int_distribution<int> deg(0, max_degree);
    std::uniform_int_distribution<size_t> pick(0, syms.size() - 1);
    std::vector<ast::NodePtr> factors{ast::num(random_rational(rng))};
    const int d = deg(rng);
    for (int j = 0; j < d; ++j) factors.push_back(ast::sym(syms[pick(rng)]));
    std::shuffle(factors.begin(), factors.end(), rng);
    while (factors.size() > 1) {
        std::uniform_int_distribution<size_t> at(0, factors.size() - 2);
        size_t i = at(rng);
        factors[i] = ast::mul({factors[i], factors[i + 1]});
        factors.erase(factors.begin() + i + 1);
    }
    return factors[0];
}

} // namespace hjq::testing
