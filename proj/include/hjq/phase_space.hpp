#pragma once

#include <vector>

#include "hjq/expr.hpp"

namespace hjq {

/// Which symbols are canonically paired and which are external parameters.
/// Parameters (time, promoted coordinates) have vanishing brackets with
/// everything; brackets are the sum over the conjugate pairs only.
struct PhaseSpaceSignature {
    std::vector<std::pair<Symbol, Symbol>> pairs;  // (coordinate, momentum)
    std::vector<Symbol> parameters;

    void validate() const {
        for (const auto& p : parameters)
            for (const auto& [q, mom] : pairs)
                if (p == q || p == mom)
                    throw ModelError("symbol " + p.str() +
                                     " is both a parameter and a member of a conjugate pair");
    }
};

/// {f, g} = sum_a (df/dq_a dg/dp_a - df/dp_a dg/dq_a), exact.
inline Expr poisson_bracket(const Expr& f, const Expr& g, const PhaseSpaceSignature& sig) {
    Expr acc;
    for (const auto& [q, p] : sig.pairs) {
        const bool f_has = f.contains(q) || f.contains(p);
        const bool g_has = g.contains(q) || g.contains(p);
        if (!f_has || !g_has) continue;
        acc += f.diff(q) * g.diff(p) - f.diff(p) * g.diff(q);
    }
    return acc;
}

} // namespace hjq
