#pragma once

#include <map>
#include <vector>

#include "hjq/linsolve.hpp"
#include "hjq/model.hpp"

namespace hjq {

/// Result of the (possibly singular) Legendre transform: which velocities
/// the momentum definitions determine, which coordinates get promoted to
/// parameters, and the primary constraints attached to them.
struct LegendreResult {
    // momentum symbol -> dL/d(velocity), in coordinate order
    std::vector<std::pair<Symbol, Expr>> momentum_definitions;
    // velocity symbol -> solution (may be parametric in free velocities)
    std::map<Symbol, Expr> solved_velocities;
    std::vector<Symbol> unsolved_coordinates;  // promoted to parameters, sorted
    // (promoted coordinate, generator p_mu - phi_mu) in coordinate order
    std::vector<std::pair<Symbol, Expr>> primary_constraints;
    int rank = 0;
    bool generic_rank_warning = false;
};

inline LegendreResult legendre(const FlatModel& model) {
    const std::vector<Symbol> vels = model.velocities();

    for (const auto& m : model.lagrangian.terms()) {
        int vdeg = 0;
        for (const auto& [s, e] : m.factors)
            for (const auto& v : vels)
                if (s == v) vdeg += e;
        if (vdeg > 2)
            throw UnsupportedExpressionError(
                "Lagrangian has degree > 2 in the velocities; momentum equations "
                "would not be affine");
    }

    LegendreResult out;
    std::vector<Expr> equations;
    for (const auto& q : model.coordinates) {
        const Symbol& p = model.momentum(q);
        const Symbol& v = model.velocity(q);
        Expr def = model.lagrangian.diff(v);
        out.momentum_definitions.push_back({p, def});
        equations.push_back(Expr::sym(p) - def);
    }

    LinearSolveResult vel = solve_linear_symbolic(equations, vels);
    out.solved_velocities = std::move(vel.solved);
    out.generic_rank_warning = vel.generic_rank_warning;
    out.rank = static_cast<int>(out.solved_velocities.size());

    std::vector<Symbol> unsolved_momenta;
    for (const auto& q : model.coordinates)
        for (const auto& uv : vel.unsolved)
            if (model.velocity(q) == uv) {
                out.unsolved_coordinates.push_back(q);
                unsolved_momenta.push_back(model.momentum(q));
            }

    if (vel.relations.size() != unsolved_momenta.size())
        throw InternalError("rank mismatch in the Legendre transform: " +
                            std::to_string(vel.relations.size()) + " relations for " +
                            std::to_string(unsolved_momenta.size()) + " undetermined velocities");

    if (!unsolved_momenta.empty()) {
        LinearSolveResult rel = solve_linear_symbolic(vel.relations, unsolved_momenta);
        out.generic_rank_warning |= rel.generic_rank_warning;
        if (!rel.unsolved.empty() || !rel.relations.empty())
            throw InternalError("primary constraints are not solvable for the momenta of "
                                "the promoted coordinates");
        for (size_t k = 0; k < out.unsolved_coordinates.size(); ++k) {
            const Symbol& p = unsolved_momenta[k];
            Expr generator = Expr::sym(p) - rel.solved.at(p);
            out.primary_constraints.push_back({out.unsolved_coordinates[k], generator});
        }
    }
    return out;
}

/// H0 = sum_a p_a w_a + sum_mu p_mu dot(q_mu) - L, with the solved
/// velocities substituted and every promoted momentum replaced by its
/// constraint value. The result is a function of the reduced phase space
/// and the parameters only.
inline Expr build_h0(const LegendreResult& leg, const FlatModel& model) {
    Expr h;
    for (const auto& q : model.coordinates)
        h += Expr::sym(model.momentum(q)) * Expr::sym(model.velocity(q));
    h -= model.lagrangian;

    h = h.substitute(leg.solved_velocities);

    std::map<Symbol, Expr> momentum_sub;
    for (const auto& [q, gen] : leg.primary_constraints) {
        const Symbol& p = model.momentum(q);
        momentum_sub[p] = Expr::sym(p) - gen;  // p_mu -> phi_mu
    }
    h = h.substitute(momentum_sub);

    for (const auto& q : model.coordinates) {
        if (h.contains(model.velocity(q)))
            throw InternalError("velocity " + model.velocity(q).str() +
                                " survived into the canonical Hamiltonian");
    }
    for (const auto& q : leg.unsolved_coordinates)
        if (h.contains(model.momentum(q)))
            throw InternalError("promoted momentum " + model.momentum(q).str() +
                                " survived into the canonical Hamiltonian");
    return h;
}

} // namespace hjq
