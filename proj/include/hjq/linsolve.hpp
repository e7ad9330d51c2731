#pragma once

#include <map>
#include <string>
#include <vector>

#include "hjq/expr.hpp"
#include "hjq/reduce.hpp"

namespace hjq {

/// Split e = sum_u coeff[u]*u + rest over the given unknowns. Requires e to
/// be jointly affine: no monomial may contain more than one unknown factor
/// (counting multiplicity).
inline std::pair<std::map<Symbol, Expr>, Expr> collect_linear(
    const Expr& e, const std::vector<Symbol>& unknowns) {
    std::map<Symbol, Expr> coeffs;
    std::vector<Monomial> rest;
    std::set<Symbol> uset(unknowns.begin(), unknowns.end());
    for (const auto& m : e.terms()) {
        const Symbol* found = nullptr;
        for (const auto& [s, exp] : m.factors) {
            if (!uset.count(s)) continue;
            if (found || exp > 1)
                throw UnsupportedExpressionError(
                    "equation is not affine in the unknowns (monomial " +
                    Expr::from_terms({m}).str() + ")");
            found = &s;
        }
        if (!found) {
            rest.push_back(m);
            continue;
        }
        Monomial stripped = m;
        std::erase_if(stripped.factors, [&](const auto& f) { return f.first == *found; });
        coeffs[*found] += Expr::from_terms({stripped});
    }
    return {std::move(coeffs), Expr::from_terms(std::move(rest))};
}

struct LinearSolveResult {
    std::map<Symbol, Expr> solved;      // unknown -> expression free of unknowns
    std::vector<Symbol> unsolved;       // unknowns no equation determines
    std::vector<Expr> relations;        // equations left with no unknowns
    bool generic_rank_warning = false;  // some pivot vanishes at special symbol values
};

/// Gaussian elimination over symbolic coefficients with deterministic
/// pivoting: unknowns in declaration order, equations in declaration order,
/// pivot = first nonzero coefficient Expr. Elimination is fraction-free;
/// back substitution divides exactly and rejects non-polynomial solutions.
/// Rank statements hold generically: a non-constant pivot sets the warning.
inline LinearSolveResult solve_linear_symbolic(std::vector<Expr> equations,
                                               const std::vector<Symbol>& unknowns) {
    LinearSolveResult out;
    // coefficient table per equation, kept in sync with eliminations
    struct Row {
        std::map<Symbol, Expr> coeff;
        Expr rest;
        bool used_as_pivot = false;
    };
    std::vector<Row> rows;
    for (const auto& e : equations) {
        auto [c, r] = collect_linear(e, unknowns);
        rows.push_back({std::move(c), std::move(r), false});
    }

    std::vector<std::pair<Symbol, size_t>> pivots;  // unknown -> row index
    for (const auto& u : unknowns) {
        size_t pivot_row = rows.size();
        for (size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].used_as_pivot) continue;
            auto it = rows[i].coeff.find(u);
            if (it != rows[i].coeff.end() && !it->second.is_zero()) {
                pivot_row = i;
                break;
            }
        }
        if (pivot_row == rows.size()) {
            out.unsolved.push_back(u);
            continue;
        }
        Row& p = rows[pivot_row];
        p.used_as_pivot = true;
        pivots.push_back({u, pivot_row});
        const Expr a = p.coeff[u];
        if (!a.is_constant()) out.generic_rank_warning = true;
        for (size_t i = 0; i < rows.size(); ++i) {
            if (i == pivot_row) continue;
            auto it = rows[i].coeff.find(u);
            if (it == rows[i].coeff.end() || it->second.is_zero()) continue;
            const Expr b = it->second;
            // row_i := a*row_i - b*row_pivot eliminates u from row_i
            for (auto& [s, c] : rows[i].coeff) c = a * c;
            rows[i].rest = a * rows[i].rest;
            for (const auto& [s, c] : p.coeff) rows[i].coeff[s] -= b * c;
            rows[i].rest -= b * p.rest;
            rows[i].coeff[u] = Expr();
        }
    }

    // Back substitution, last pivot first. Free (unsolved) unknowns may
    // remain on the right: the solution is parametric in them.
    for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
        const auto& [u, ri] = *it;
        Row& row = rows[ri];
        Expr rhs = -row.rest;
        for (const auto& [s, c] : row.coeff) {
            if (s == u || c.is_zero()) continue;
            auto sol = out.solved.find(s);
            rhs -= c * (sol != out.solved.end() ? sol->second : Expr::sym(s));
        }
        const Expr& a = row.coeff[u];
        if (a.is_constant()) {
            out.solved[u] = Rational(Rational(1) / a.constant_value()) * rhs;
        } else {
            auto q = exact_divide(rhs, a);
            if (!q)
                throw UnsupportedExpressionError(
                    "solution for " + u.str() + " is not polynomial (pivot " + a.str() + ")");
            out.solved[u] = *q;
        }
    }

    for (auto& row : rows) {
        if (row.used_as_pivot) continue;
        for (const auto& [s, c] : row.coeff)
            if (!c.is_zero())
                throw InternalError("elimination left unknown " + s.str() + " in a relation");
        if (!row.rest.is_zero()) out.relations.push_back(row.rest);
    }
    return out;
}

} // namespace hjq
