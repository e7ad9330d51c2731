#pragma once

#include <vector>

#include "hjq/legendre.hpp"
#include "hjq/phase_space.hpp"

namespace hjq {

/// The family of generators H'_alpha: H'_0 = pt + H0 attached to time, and
/// one H'_mu per promoted coordinate, attached to that coordinate as
/// parameter. Carries both the reduced signature (the canonical pairs of
/// the analysis) and the full one (every conjugate pair, used for bracket
/// computations involving the promoted pairs).
struct HamiltonianSet {
    Expr h0;
    std::vector<std::pair<Symbol, Expr>> generators;  // (parameter, H'_alpha)
    PhaseSpaceSignature reduced;
    PhaseSpaceSignature full;
    Symbol time_momentum;

    /// H_alpha = H'_alpha - p_alpha (the non-momentum part of a generator).
    Expr h_part(size_t alpha) const {
        if (alpha == 0) return h0;
        const auto& [param, gen] = generators.at(alpha);
        return gen - Expr::sym(momentum_of_parameter(param));
    }

    const Symbol& momentum_of_parameter(const Symbol& param) const {
        if (param == Symbol::time()) return time_momentum;
        for (const auto& [q, p] : full.pairs)
            if (q == param) return p;
        throw Error("no conjugate momentum for parameter " + param.str());
    }
};

inline HamiltonianSet build_hjpde(const LegendreResult& leg, const Expr& h0,
                                  const FlatModel& model) {
    HamiltonianSet hs;
    hs.h0 = h0;
    hs.time_momentum = Symbol::momentum("pt");

    hs.generators.push_back({Symbol::time(), Expr::sym(hs.time_momentum) + h0});
    for (const auto& [q, gen] : leg.primary_constraints) hs.generators.push_back({q, gen});

    hs.reduced.parameters.push_back(Symbol::time());
    for (const auto& q : leg.unsolved_coordinates) hs.reduced.parameters.push_back(q);
    for (const auto& q : model.coordinates) {
        const bool promoted =
            std::find(leg.unsolved_coordinates.begin(), leg.unsolved_coordinates.end(), q) !=
            leg.unsolved_coordinates.end();
        if (!promoted) hs.reduced.pairs.push_back({q, model.momentum(q)});
        hs.full.pairs.push_back({q, model.momentum(q)});
    }
    hs.full.pairs.push_back({Symbol::time(), hs.time_momentum});
    hs.reduced.validate();
    return hs;
}

} // namespace hjq
