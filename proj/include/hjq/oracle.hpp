#pragma once

#include <string>
#include <vector>

#include "hjq/chain.hpp"
#include "hjq/legendre.hpp"
#include "hjq/linsolve.hpp"

namespace hjq {

/// Dirac-Bergmann consistency analysis via the total Hamiltonian
/// H_T = H_c + sum_m lambda_m phi_m with multiplier symbols. Independent of
/// the Hamilton-Jacobi iteration: primaries come straight from the momentum
/// relations, consistency is {phi, H_T} on the surface, and a bracket that
/// fixes a multiplier never spawns a constraint. Used as the
/// cross-validation oracle for the engine's chains.
inline ConstraintChain dirac_oracle(const FlatModel& model, int max_sweeps = 10) {
    const std::vector<Symbol> vels = model.velocities();
    std::vector<Expr> equations;
    for (const auto& q : model.coordinates)
        equations.push_back(Expr::sym(model.momentum(q)) - model.lagrangian.diff(model.velocity(q)));
    LinearSolveResult vel = solve_linear_symbolic(equations, vels);

    // canonical Hamiltonian with the undetermined velocities set to zero;
    // the difference to any other choice is a multiple of the primaries
    Expr hc;
    for (const auto& q : model.coordinates)
        hc += Expr::sym(model.momentum(q)) * Expr::sym(model.velocity(q));
    hc -= model.lagrangian;
    hc = hc.substitute(vel.solved);
    std::map<Symbol, Expr> kill_free;
    for (const auto& v : vel.unsolved) kill_free[v] = Expr();
    hc = hc.substitute(kill_free);
    for (const auto& v : vels)
        if (hc.contains(v))
            throw InternalError("velocity " + v.str() + " survived into the oracle Hamiltonian");

    ConstraintChain chain;
    std::vector<Symbol> multipliers;
    Expr ht = hc;
    for (size_t m = 0; m < vel.relations.size(); ++m) {
        chain.constraints.push_back(
            {vel.relations[m], 0, "momentum relation", Constraint::Class::Unresolved});
        Symbol lam = Symbol::parameter("lam", {static_cast<int>(m + 1)});
        multipliers.push_back(lam);
        ht += Expr::sym(lam) * vel.relations[m];
    }

    PhaseSpaceSignature sig;
    for (const auto& q : model.coordinates) sig.pairs.push_back({q, model.momentum(q)});

    for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
        int added = 0;
        const std::vector<Expr> divisors = sort_for_reduction(chain.exprs());
        const size_t count = chain.constraints.size();
        for (size_t k = 0; k < count; ++k) {
            Expr raw = poisson_bracket(chain.constraints[k].expression, ht, sig);
            if (raw.is_zero()) continue;
            Expr red = reduce_modulo(raw, divisors).remainder;
            if (red.is_zero()) continue;
            auto [lam_coeffs, rest] = collect_linear(red, multipliers);
            bool fixes_multiplier = false;
            for (const auto& [lam, coeff] : lam_coeffs)
                if (!coeff.is_zero()) fixes_multiplier = true;
            if (fixes_multiplier) continue;  // consistency determines a multiplier
            if (rest.is_zero()) continue;
            bool canonical = false;
            for (const auto& [q, p] : sig.pairs)
                if (rest.contains(q) || rest.contains(p)) canonical = true;
            if (!canonical) {
                chain.inconsistent = true;
                chain.obstructions.push_back({rest, "oracle consistency", Symbol::time(), true});
                continue;
            }
            chain.constraints.push_back({rest, sweep, "consistency of " +
                                         chain.constraints[k].expression.str(),
                                         Constraint::Class::Unresolved});
            ++added;
        }
        if (added == 0) {
            chain.closed = true;
            chain.closed_at = chain.max_generation() + 1;
            return chain;
        }
    }
    chain.closed = false;
    return chain;
}

/// Surface equivalence by mutual reduction: every member of each chain must
/// reduce to zero modulo the other chain's inter-reduced basis.
struct ChainComparison {
    bool equivalent = false;
    std::vector<Expr> unmatched_in_a;  // members of a not in span of b
    std::vector<Expr> unmatched_in_b;
};

inline ChainComparison compare_chains(const ConstraintChain& a, const ConstraintChain& b) {
    if (!a.closed || !b.closed)
        throw Error("compare_chains requires two closed chains");
    ChainComparison out;
    const std::vector<Expr> basis_a = inter_reduce(a.exprs());
    const std::vector<Expr> basis_b = inter_reduce(b.exprs());
    for (const auto& e : a.exprs())
        if (!reduce_modulo(e, basis_b).reduced_to_zero()) out.unmatched_in_a.push_back(e);
    for (const auto& e : b.exprs())
        if (!reduce_modulo(e, basis_a).reduced_to_zero()) out.unmatched_in_b.push_back(e);
    out.equivalent = out.unmatched_in_a.empty() && out.unmatched_in_b.empty();
    return out;
}

} // namespace hjq
