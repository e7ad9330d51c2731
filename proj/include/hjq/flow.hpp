#pragma once

#include <map>
#include <vector>

#include "hjq/hamiltonian.hpp"

namespace hjq {

/// Equations of motion as total differential equations: for each canonical
/// variable x, dx = sum_alpha coeff[alpha] dt_alpha with
/// dq = dH'_alpha/dp dt_alpha and dp = -dH'_alpha/dq dt_alpha.
struct TotalDifferentialSystem {
    std::vector<Symbol> parameters;  // direction order: t, then promoted coordinates
    std::vector<std::pair<Symbol, std::map<Symbol, Expr>>> rows;

    const std::map<Symbol, Expr>* row(const Symbol& x) const {
        for (const auto& [s, m] : rows)
            if (s == x) return &m;
        return nullptr;
    }
    Expr coefficient(const Symbol& x, const Symbol& direction) const {
        const auto* m = row(x);
        if (!m) throw Error("no flow row for " + x.str());
        auto it = m->find(direction);
        return it == m->end() ? Expr() : it->second;
    }
};

inline TotalDifferentialSystem derive_flow(const HamiltonianSet& hs) {
    TotalDifferentialSystem flow;
    for (const auto& [param, gen] : hs.generators) flow.parameters.push_back(param);

    const auto add_row = [&](const Symbol& x, bool is_coordinate, const Symbol& conj) {
        std::map<Symbol, Expr> coeffs;
        for (const auto& [param, gen] : hs.generators)
            coeffs[param] = is_coordinate ? gen.diff(conj) : -gen.diff(conj);
        flow.rows.push_back({x, std::move(coeffs)});
    };

    for (const auto& [q, p] : hs.full.pairs) {
        if (q != Symbol::time()) add_row(q, true, p);
        add_row(p, false, q);
    }
    return flow;
}

} // namespace hjq
