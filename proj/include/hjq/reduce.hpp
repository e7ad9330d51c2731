#pragma once

#include <optional>
#include <vector>

#include "hjq/expr.hpp"

namespace hjq {

/// Outcome of dividing an expression by an ordered set of divisors:
/// e = sum_i quotient[i] * divisor[i] + remainder. The quotients are the
/// membership certificate when the remainder is zero.
struct ReductionResult {
    Expr remainder;
    std::vector<Expr> quotients;  // parallel to the divisor list

    bool reduced_to_zero() const { return remainder.is_zero(); }
};

namespace detail {

/// m / lt where lt is the leading monomial of a divisor; nullopt when the
/// factor powers of lt do not divide m.
inline std::optional<Monomial> divide_key(const Monomial& m, const Monomial& lt) {
    Monomial q;
    q.coeff = m.coeff / lt.coeff;
    size_t i = 0;
    for (const auto& [s, e] : lt.factors) {
        while (i < m.factors.size() && m.factors[i].first < s) {
            q.factors.push_back(m.factors[i]);
            ++i;
        }
        if (i == m.factors.size() || m.factors[i].first != s || m.factors[i].second < e)
            return std::nullopt;
        if (m.factors[i].second > e) q.factors.push_back({s, m.factors[i].second - e});
        ++i;
    }
    for (; i < m.factors.size(); ++i) q.factors.push_back(m.factors[i]);
    return q;
}

} // namespace detail

/// Fixed-order multivariate polynomial division. Divisors are tried in the
/// order given; the caller fixes that order (sort_for_reduction below is the
/// canonical choice). Not a complete ideal-membership test: a nonzero
/// remainder only means this division order found no representation.
inline ReductionResult reduce_modulo(const Expr& e, const std::vector<Expr>& divisors) {
    ReductionResult out;
    out.quotients.assign(divisors.size(), Expr());
    Expr work = e;
    std::vector<Monomial> remainder_terms;
    while (!work.is_zero()) {
        const Monomial& lead = work.leading();
        bool divided = false;
        for (size_t i = 0; i < divisors.size(); ++i) {
            if (divisors[i].is_zero()) continue;
            auto q = detail::divide_key(lead, divisors[i].leading());
            if (!q) continue;
            Expr qe = Expr::from_terms({*q});
            out.quotients[i] += qe;
            work -= qe * divisors[i];
            divided = true;
            break;
        }
        if (!divided) {
            remainder_terms.push_back(lead);
            work -= Expr::from_terms({lead});
        }
    }
    out.remainder = Expr::from_terms(std::move(remainder_terms));
    return out;
}

/// Canonical divisor order: leading monomial descending under the term
/// order, full-expression compare as tie break.
inline std::vector<Expr> sort_for_reduction(std::vector<Expr> set) {
    std::erase_if(set, [](const Expr& e) { return e.is_zero(); });
    std::stable_sort(set.begin(), set.end(), [](const Expr& a, const Expr& b) {
        if (auto c = monomial_key_order(a.leading(), b.leading()); c != 0)
            return c == std::strong_ordering::greater;
        return a > b;
    });
    return set;
}

/// Exact division: returns e/d when the division algorithm leaves no
/// remainder, nullopt otherwise.
inline std::optional<Expr> exact_divide(const Expr& e, const Expr& d) {
    if (d.is_zero()) return std::nullopt;
    auto r = reduce_modulo(e, {d});
    if (!r.reduced_to_zero()) return std::nullopt;
    return r.quotients[0];
}

/// Division-based auto-reduction: rewrite each member modulo the others
/// until stable, dropping members that reduce to zero. For linear sets this
/// is Gaussian elimination to a canonical echelon basis, which makes
/// span-equality detectable by plain division afterwards.
inline std::vector<Expr> inter_reduce(std::vector<Expr> set) {
    set = sort_for_reduction(std::move(set));
    bool changed = true;
    int sweeps = 0;
    while (changed) {
        if (++sweeps > 1000) throw InternalError("inter-reduction did not stabilize");
        changed = false;
        for (size_t i = 0; i < set.size(); ++i) {
            std::vector<Expr> others;
            others.reserve(set.size() - 1);
            for (size_t j = 0; j < set.size(); ++j)
                if (j != i) others.push_back(set[j]);
            Expr r = reduce_modulo(set[i], others).remainder;
            if (r != set[i]) {
                changed = true;
                if (r.is_zero()) {
                    set.erase(set.begin() + i);
                    --i;
                } else {
                    set[i] = r;
                }
            }
        }
        if (changed) set = sort_for_reduction(std::move(set));
    }
    return set;
}

} // namespace hjq
