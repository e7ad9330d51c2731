#pragma once

#include <string>
#include <vector>

#include "hjq/hamiltonian.hpp"
#include "hjq/reduce.hpp"

namespace hjq {

struct Constraint {
    enum class Class { First, Second, Unresolved };
    Expr expression;
    int generation = 0;
    std::string provenance;
    Class klass = Class::Unresolved;
};

/// One reduction certificate: candidate = sum_i quotient_i * constraint_i
/// (+ remainder, zero when stored as a dependency).
struct ReductionCertificate {
    Expr candidate;   // the raw bracket value
    Expr remainder;   // zero for dependencies
    std::string source;
    Symbol direction;
    std::vector<std::pair<Expr, Expr>> combination;  // (quotient, constraint expr)
};

/// A consistency demand that no phase-space surface can satisfy: the
/// candidate contains no canonical variable. Along the time direction this
/// means inconsistent dynamics; along a parameter direction it freezes that
/// parameter (the hallmark of a second-class pair).
struct ObstructionEvent {
    Expr value;
    std::string source;
    Symbol direction;
    bool time_direction = false;
};

struct ConstraintChain {
    std::vector<Constraint> constraints;
    bool closed = false;
    bool inconsistent = false;
    int closed_at = -1;  // generation index whose scan found nothing new
    std::vector<ReductionCertificate> certificates;
    std::vector<ObstructionEvent> obstructions;
    std::vector<std::vector<Expr>> bracket_matrix;  // filled by classify()
    bool classified = false;

    std::vector<Expr> exprs() const {
        std::vector<Expr> out;
        for (const auto& c : constraints) out.push_back(c.expression);
        return out;
    }
    std::vector<Expr> generation_exprs(int g) const {
        std::vector<Expr> out;
        for (const auto& c : constraints)
            if (c.generation == g) out.push_back(c.expression);
        return out;
    }
    int max_generation() const {
        int g = -1;
        for (const auto& c : constraints) g = std::max(g, c.generation);
        return g;
    }
    bool all_first_class() const {
        for (const auto& c : constraints)
            if (c.klass != Constraint::Class::First) return false;
        return true;
    }
};

struct CandidateRecord {
    Expr raw;      // {X, H'_alpha}, nonzero
    Expr reduced;  // remainder modulo the current chain
    std::string source;
    Symbol direction;
    std::vector<std::pair<Expr, Expr>> combination;
};

namespace detail {

inline bool has_canonical_symbol(const Expr& e, const HamiltonianSet& hs) {
    for (const auto& [q, p] : hs.full.pairs)
        if (e.contains(q) || e.contains(p)) return true;
    return false;
}

inline std::vector<std::pair<Expr, Expr>> certificate_pairs(const ReductionResult& red,
                                                            const std::vector<Expr>& divisors) {
    std::vector<std::pair<Expr, Expr>> out;
    for (size_t i = 0; i < divisors.size(); ++i)
        if (!red.quotients[i].is_zero()) out.push_back({red.quotients[i], divisors[i]});
    return out;
}

} // namespace detail

/// One consistency sweep: the variation of every generator and every chain
/// constraint along every parameter direction, dX = sum_alpha {X, H'_alpha}
/// dt_alpha, each coefficient reduced modulo the chain. Every nonzero
/// bracket is reported; the ones with nonzero remainder are the candidate
/// constraints of the next generation.
inline std::vector<CandidateRecord> integrability_step(const HamiltonianSet& hs,
                                                       const ConstraintChain& chain) {
    std::vector<CandidateRecord> records;
    const std::vector<Expr> divisors = sort_for_reduction(chain.exprs());

    std::vector<std::pair<std::string, Expr>> tested;
    tested.push_back({"H'[t]", hs.generators[0].second});
    for (const auto& c : chain.constraints) {
        std::string label = c.generation == 0 ? "H'[" + c.provenance + "]"
                                              : "constraint " + c.expression.str();
        tested.push_back({label, c.expression});
    }

    for (const auto& [label, x] : tested) {
        for (const auto& [param, gen] : hs.generators) {
            Expr raw = poisson_bracket(x, gen, hs.full);
            if (raw.is_zero()) continue;
            ReductionResult red = reduce_modulo(raw, divisors);
            records.push_back({raw, red.remainder, label, param,
                               detail::certificate_pairs(red, divisors)});
        }
    }
    return records;
}

/// Iterate the consistency conditions until no candidate survives reduction
/// (closed) or the generation cap is hit. Candidates that reduce to zero,
/// against the chain or against candidates accepted earlier in the same
/// generation, are recorded as dependencies with their certificates.
inline ConstraintChain run_chain(const HamiltonianSet& hs, int max_generations = 10) {
    if (max_generations < 1) throw Error("max_generations must be >= 1");
    ConstraintChain chain;
    for (size_t mu = 1; mu < hs.generators.size(); ++mu)
        chain.constraints.push_back({hs.generators[mu].second, 0,
                                     hs.generators[mu].first.str(),
                                     Constraint::Class::Unresolved});

    for (int gen = 1; gen <= max_generations; ++gen) {
        std::vector<CandidateRecord> records = integrability_step(hs, chain);
        int accepted = 0;
        for (const auto& rec : records) {
            if (rec.reduced.is_zero()) {
                chain.certificates.push_back(
                    {rec.raw, Expr(), rec.source, rec.direction, rec.combination});
                continue;
            }
            // re-reduce against the chain grown by this generation's acceptances
            ReductionResult red;
            Expr remainder = rec.reduced;
            std::vector<Expr> divisors;
            if (accepted > 0) {
                divisors = sort_for_reduction(chain.exprs());
                red = reduce_modulo(rec.reduced, divisors);
                remainder = red.remainder;
            }
            if (remainder.is_zero()) {
                auto pairs = rec.combination;
                auto extra = detail::certificate_pairs(red, divisors);
                pairs.insert(pairs.end(), extra.begin(), extra.end());
                chain.certificates.push_back({rec.raw, Expr(), rec.source, rec.direction, pairs});
                continue;
            }
            if (!detail::has_canonical_symbol(remainder, hs)) {
                bool is_time = rec.direction == Symbol::time();
                chain.obstructions.push_back({remainder, rec.source, rec.direction, is_time});
                if (is_time) chain.inconsistent = true;
                continue;
            }
            chain.constraints.push_back({remainder, gen,
                                         "d" + rec.source + " along d" + rec.direction.str(),
                                         Constraint::Class::Unresolved});
            ++accepted;
        }
        if (accepted == 0) {
            chain.closed = true;
            chain.closed_at = chain.max_generation() + 1;
            return chain;
        }
    }
    chain.closed = false;
    return chain;
}

/// First class iff the bracket with every chain member reduces to zero
/// modulo the chain. The full bracket matrix is retained for reporting.
inline ConstraintChain classify(ConstraintChain chain, const PhaseSpaceSignature& sig) {
    if (!chain.closed) throw Error("classification requires a closed constraint chain");
    const std::vector<Expr> divisors = sort_for_reduction(chain.exprs());
    const size_t n = chain.constraints.size();
    chain.bracket_matrix.assign(n, std::vector<Expr>(n));
    std::vector<bool> first(n, true);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            Expr b = poisson_bracket(chain.constraints[i].expression,
                                     chain.constraints[j].expression, sig);
            chain.bracket_matrix[i][j] = b;
            if (!b.is_zero() && !reduce_modulo(b, divisors).reduced_to_zero())
                first[i] = false;
        }
    for (size_t i = 0; i < n; ++i)
        chain.constraints[i].klass =
            first[i] ? Constraint::Class::First : Constraint::Class::Second;
    chain.classified = true;
    return chain;
}

/// Closure in the sense of the integrability conditions: every pairwise
/// generator bracket reduces to zero modulo the chain.
inline bool generators_close(const HamiltonianSet& hs, const ConstraintChain& chain) {
    const std::vector<Expr> divisors = sort_for_reduction(chain.exprs());
    for (size_t a = 0; a < hs.generators.size(); ++a)
        for (size_t b = 0; b < hs.generators.size(); ++b) {
            Expr br = poisson_bracket(hs.generators[a].second, hs.generators[b].second, hs.full);
            if (!br.is_zero() && !reduce_modulo(br, divisors).reduced_to_zero()) return false;
        }
    return true;
}

} // namespace hjq
