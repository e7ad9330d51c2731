#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hjq/errors.hpp"
#include "hjq/rational.hpp"
#include "hjq/symbol.hpp"

namespace hjq {

/// One term of a polynomial: exact rational coefficient times a product of
/// symbol powers. Factors are kept sorted by the Symbol order with exponents
/// >= 1; the empty factor list is the constant monomial.
struct Monomial {
    Rational coeff;
    std::vector<std::pair<Symbol, int>> factors;

    int degree() const {
        int d = 0;
        for (const auto& [s, e] : factors) d += e;
        return d;
    }
};

/// Graded-lexicographic order on the factor lists (the term order): higher
/// total degree first, ties broken by the exponent on the smallest Symbol.
inline std::strong_ordering monomial_key_order(const Monomial& a, const Monomial& b) {
    if (auto c = a.degree() <=> b.degree(); c != 0) return c;
    size_t i = 0, j = 0;
    while (i < a.factors.size() && j < b.factors.size()) {
        const auto& [sa, ea] = a.factors[i];
        const auto& [sb, eb] = b.factors[j];
        if (sa < sb) return std::strong_ordering::greater;
        if (sb < sa) return std::strong_ordering::less;
        if (ea != eb) return ea <=> eb;
        ++i, ++j;
    }
    if (i < a.factors.size()) return std::strong_ordering::greater;
    if (j < b.factors.size()) return std::strong_ordering::less;
    return std::strong_ordering::equal;
}

inline bool same_key(const Monomial& a, const Monomial& b) {
    return a.factors == b.factors;
}

/// Immutable multivariate polynomial over exact rationals in canonical
/// normal form: terms sorted descending by the term order, like terms
/// merged, zero coefficients pruned. Two mathematically equal polynomials
/// always compare equal with operator==.
class Expr {
public:
    Expr() = default;

    static Expr zero() { return Expr(); }
    static Expr one() { return constant(Rational(1)); }
    static Expr constant(Rational r) {
        Expr e;
        if (!hjq::is_zero(r)) e.terms_.push_back({std::move(r), {}});
        return e;
    }
    static Expr integer(long long n) { return constant(Rational(n)); }
    static Expr sym(Symbol s) {
        Expr e;
        e.terms_.push_back({Rational(1), {{std::move(s), 1}}});
        return e;
    }
    static Expr from_terms(std::vector<Monomial> ms) {
        Expr e;
        e.terms_ = std::move(ms);
        e.canonicalize();
        return e;
    }

    const std::vector<Monomial>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && terms_[0].factors.empty());
    }
    Rational constant_value() const {
        if (terms_.empty()) return Rational(0);
        if (!is_constant()) throw Error("expression is not constant");
        return terms_[0].coeff;
    }
    const Monomial& leading() const {
        if (terms_.empty()) throw Error("zero polynomial has no leading term");
        return terms_[0];
    }

    friend Expr operator-(const Expr& a) {
        Expr r = a;
        for (auto& m : r.terms_) m.coeff = -m.coeff;
        return r;
    }
    friend Expr operator+(const Expr& a, const Expr& b) {
        std::vector<Monomial> ms = a.terms_;
        ms.insert(ms.end(), b.terms_.begin(), b.terms_.end());
        return from_terms(std::move(ms));
    }
    friend Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }
    friend Expr operator*(const Expr& a, const Expr& b) {
        std::vector<Monomial> ms;
        ms.reserve(a.terms_.size() * b.terms_.size());
        for (const auto& ma : a.terms_)
            for (const auto& mb : b.terms_) ms.push_back(mul_monomials(ma, mb));
        return from_terms(std::move(ms));
    }
    friend Expr operator*(const Rational& c, const Expr& a) {
        if (hjq::is_zero(c)) return Expr();
        Expr r = a;
        for (auto& m : r.terms_) m.coeff *= c;
        return r;
    }
    friend Expr operator*(const Expr& a, const Rational& c) { return c * a; }
    Expr& operator+=(const Expr& o) { return *this = *this + o; }
    Expr& operator-=(const Expr& o) { return *this = *this - o; }
    Expr& operator*=(const Expr& o) { return *this = *this * o; }

    Expr pow(int n) const {
        if (n < 0) throw UnsupportedExpressionError("negative power of a non-constant expression");
        Expr result = one();
        Expr base = *this;
        while (n > 0) {
            if (n & 1) result = result * base;
            base = (n >>= 1) ? base * base : base;
        }
        return result;
    }

    friend bool operator==(const Expr& a, const Expr& b) {
        if (a.terms_.size() != b.terms_.size()) return false;
        for (size_t i = 0; i < a.terms_.size(); ++i)
            if (a.terms_[i].coeff != b.terms_[i].coeff ||
                a.terms_[i].factors != b.terms_[i].factors)
                return false;
        return true;
    }

    /// Arbitrary but fixed total order, for deterministic containers.
    friend std::strong_ordering operator<=>(const Expr& a, const Expr& b) {
        size_t n = std::min(a.terms_.size(), b.terms_.size());
        for (size_t i = 0; i < n; ++i) {
            if (auto c = monomial_key_order(a.terms_[i], b.terms_[i]); c != 0) return c;
            if (auto c = a.terms_[i].coeff.compare(b.terms_[i].coeff); c != 0)
                return c <=> 0;
        }
        return a.terms_.size() <=> b.terms_.size();
    }

    /// Formal partial derivative; all other symbols are independent.
    Expr diff(const Symbol& v) const {
        std::vector<Monomial> out;
        for (const auto& m : terms_) {
            for (size_t k = 0; k < m.factors.size(); ++k) {
                if (m.factors[k].first != v) continue;
                Monomial d = m;
                d.coeff *= m.factors[k].second;
                if (--d.factors[k].second == 0) d.factors.erase(d.factors.begin() + k);
                out.push_back(std::move(d));
                break;
            }
        }
        return from_terms(std::move(out));
    }

    /// Simultaneous substitution: every bound symbol replaced in one pass.
    Expr substitute(const std::map<Symbol, Expr>& bindings) const {
        Expr total;
        for (const auto& m : terms_) {
            Expr acc = constant(m.coeff);
            for (const auto& [s, e] : m.factors) {
                auto it = bindings.find(s);
                acc = acc * (it != bindings.end() ? it->second.pow(e) : sym(s).pow(e));
            }
            total += acc;
        }
        return total;
    }

    int degree_in(const Symbol& v) const {
        int d = 0;
        for (const auto& m : terms_)
            for (const auto& [s, e] : m.factors)
                if (s == v) d = std::max(d, e);
        return d;
    }

    int total_degree() const {
        int d = 0;
        for (const auto& m : terms_) d = std::max(d, m.degree());
        return d;
    }

    bool contains(const Symbol& v) const {
        for (const auto& m : terms_)
            for (const auto& [s, e] : m.factors)
                if (s == v) return true;
        return false;
    }

    std::set<Symbol> symbols() const {
        std::set<Symbol> out;
        for (const auto& m : terms_)
            for (const auto& [s, e] : m.factors) out.insert(s);
        return out;
    }

    /// Straightforward per-monomial evaluation with a symbol valuation.
    double eval(const std::map<Symbol, double>& vals) const {
        double acc = 0.0;
        for (const auto& m : terms_) {
            double term = to_double(m.coeff);
            for (const auto& [s, e] : m.factors) {
                auto it = vals.find(s);
                if (it == vals.end()) throw Error("eval: no value for symbol " + s.str());
                for (int k = 0; k < e; ++k) term *= it->second;
            }
            acc += term;
        }
        return acc;
    }

    Rational eval_exact(const std::map<Symbol, Rational>& vals) const {
        Rational acc(0);
        for (const auto& m : terms_) {
            Rational term = m.coeff;
            for (const auto& [s, e] : m.factors) {
                auto it = vals.find(s);
                if (it == vals.end()) throw Error("eval: no value for symbol " + s.str());
                for (int k = 0; k < e; ++k) term *= it->second;
            }
            acc += term;
        }
        return acc;
    }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::string out;
        for (size_t i = 0; i < terms_.size(); ++i) {
            const Monomial& m = terms_[i];
            const bool neg = m.coeff < 0;
            Rational mag = neg ? Rational(-m.coeff) : m.coeff;
            if (i == 0)
                out += neg ? "-" : "";
            else
                out += neg ? " - " : " + ";
            std::string factors;
            for (size_t k = 0; k < m.factors.size(); ++k) {
                if (k) factors += '*';
                factors += m.factors[k].first.str();
                if (m.factors[k].second != 1)
                    factors += '^' + std::to_string(m.factors[k].second);
            }
            if (factors.empty())
                out += to_string(mag);
            else if (mag == 1)
                out += factors;
            else
                out += to_string(mag) + '*' + factors;
        }
        return out;
    }

    friend std::ostream& operator<<(std::ostream& os, const Expr& e) {
        return os << e.str();
    }

    static Monomial mul_monomials(const Monomial& a, const Monomial& b) {
        Monomial r;
        r.coeff = a.coeff * b.coeff;
        r.factors.reserve(a.factors.size() + b.factors.size());
        size_t i = 0, j = 0;
        while (i < a.factors.size() && j < b.factors.size()) {
            if (a.factors[i].first < b.factors[j].first)
                r.factors.push_back(a.factors[i++]);
            else if (b.factors[j].first < a.factors[i].first)
                r.factors.push_back(b.factors[j++]);
            else {
                r.factors.push_back({a.factors[i].first,
                                     a.factors[i].second + b.factors[j].second});
                ++i, ++j;
            }
        }
        for (; i < a.factors.size(); ++i) r.factors.push_back(a.factors[i]);
        for (; j < b.factors.size(); ++j) r.factors.push_back(b.factors[j]);
        return r;
    }

private:
    void canonicalize() {
        std::sort(terms_.begin(), terms_.end(), [](const Monomial& a, const Monomial& b) {
            return monomial_key_order(a, b) == std::strong_ordering::greater;
        });
        std::vector<Monomial> merged;
        merged.reserve(terms_.size());
        for (auto& m : terms_) {
            if (!merged.empty() && same_key(merged.back(), m))
                merged.back().coeff += m.coeff;
            else
                merged.push_back(std::move(m));
        }
        std::erase_if(merged, [](const Monomial& m) { return hjq::is_zero(m.coeff); });
        terms_ = std::move(merged);
    }

    std::vector<Monomial> terms_;
};

inline Expr operator+(const Expr& a, long long n) { return a + Expr::integer(n); }
inline Expr operator-(const Expr& a, long long n) { return a - Expr::integer(n); }
inline Expr operator*(long long n, const Expr& a) { return Rational(n) * a; }

} // namespace hjq
