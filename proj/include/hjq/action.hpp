#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hjq/chain.hpp"
#include "hjq/flow.hpp"

namespace hjq {

/// The canonical action one-form dz = sum_alpha (-H_alpha +
/// sum_a p_a dH'_alpha/dp_a) dt_alpha, with a as the reduced canonical
/// pairs. The kinetic presentation keeps the time direction in the familiar
/// sum_a p_a dq_a/dt - H0 shape.
struct CanonicalAction {
    std::vector<std::pair<Symbol, Expr>> integrand;  // parameter -> coefficient of dt_alpha
    std::vector<std::pair<Symbol, Expr>> kinetic;    // momentum -> dq/dt coefficient
    Expr h0;

    Expr time_integrand() const {
        for (const auto& [p, e] : integrand)
            if (p == Symbol::time()) return e;
        throw Error("canonical action has no time direction");
    }
};

inline CanonicalAction canonical_action(const HamiltonianSet& hs,
                                        const TotalDifferentialSystem& flow) {
    CanonicalAction act;
    act.h0 = hs.h0;
    for (size_t alpha = 0; alpha < hs.generators.size(); ++alpha) {
        const auto& [param, gen] = hs.generators[alpha];
        Expr coeff = -hs.h_part(alpha);
        for (const auto& [q, p] : hs.reduced.pairs)
            coeff += Expr::sym(p) * gen.diff(p);
        act.integrand.push_back({param, coeff});
    }
    for (const auto& [q, p] : hs.reduced.pairs)
        act.kinetic.push_back({p, flow.coefficient(q, Symbol::time())});
    return act;
}

/// The structural content of the gauge-free path integral: which variables
/// are integrated, which stay external parameters, and the action phase.
/// No gauge conditions, delta factors or determinants are attached when the
/// system is integrable; when it is not, the report says so instead of
/// claiming a measure.
struct PathIntegralReport {
    std::vector<std::pair<Symbol, Symbol>> integration_variables;  // canonical pairs
    std::vector<Symbol> external_parameters;
    Expr action_integrand;  // time direction
    bool integrable = false;
    bool chain_closed = false;
    std::vector<std::string> notes;

    size_t gauge_condition_count = 0;   // gauge-free by construction
    size_t delta_factor_count = 0;
    size_t determinant_factor_count = 0;
};

inline PathIntegralReport path_integral_report(const CanonicalAction& act,
                                               const HamiltonianSet& hs,
                                               const ConstraintChain& chain) {
    PathIntegralReport rep;
    rep.integration_variables = hs.reduced.pairs;
    rep.external_parameters = hs.reduced.parameters;
    rep.action_integrand = act.time_integrand();
    rep.chain_closed = chain.closed;
    rep.integrable = chain.closed && !chain.inconsistent && chain.obstructions.empty();
    if (!chain.closed)
        rep.notes.push_back("NOT-INTEGRABLE: consistency iteration still open; no measure claim");
    if (chain.inconsistent)
        rep.notes.push_back("NOT-INTEGRABLE: dynamics inconsistent along the time direction");
    for (const auto& o : chain.obstructions)
        if (!o.time_direction)
            rep.notes.push_back("NOT-INTEGRABLE: direction d" + o.direction.str() +
                                " frozen by consistency of " + o.source +
                                " (value " + o.value.str() + ")");
    if (rep.integrable)
        rep.notes.push_back("integration over the canonical pairs only; no gauge conditions, "
                            "delta factors or determinants");
    rep.notes.push_back("finite mechanical model: no spatial boundary terms arise");
    return rep;
}

// ---------------------------------------------------------------------------

/// The conventional gauge-fixed measure, emitted for side-by-side
/// comparison: det|{phi,chi}| prod_alpha delta(chi) delta(phi) prod dq dp.
struct GaugeMeasureReport {
    std::vector<Expr> constraints;
    std::vector<Expr> gauges;
    std::vector<std::vector<Expr>> bracket_matrix;  // {phi_i, chi_j}
    Expr determinant;
    std::vector<std::string> delta_factors;
    std::string liouville_factor;
};

namespace detail {

inline Expr cofactor_determinant(const std::vector<std::vector<Expr>>& m, size_t along_row) {
    const size_t n = m.size();
    if (n == 0) return Expr::one();
    if (n == 1) return m[0][0];
    std::vector<size_t> cols(n);
    for (size_t i = 0; i < n; ++i) cols[i] = i;

    // recursive expansion over a column subset, always along the first of
    // the remaining rows except at the top level
    const std::function<Expr(std::vector<size_t>, std::vector<size_t>)> det =
        [&](std::vector<size_t> rows, std::vector<size_t> cs) -> Expr {
        if (rows.size() == 1) return m[rows[0]][cs[0]];
        size_t pick = 0;
        for (size_t k = 0; k < rows.size(); ++k)
            if (rows[k] == along_row) pick = k;
        Expr acc;
        std::vector<size_t> sub_rows;
        for (size_t k = 0; k < rows.size(); ++k)
            if (k != pick) sub_rows.push_back(rows[k]);
        for (size_t j = 0; j < cs.size(); ++j) {
            const Expr& entry = m[rows[pick]][cs[j]];
            if (entry.is_zero()) continue;
            std::vector<size_t> sub_cols;
            for (size_t k = 0; k < cs.size(); ++k)
                if (k != j) sub_cols.push_back(cs[k]);
            Expr minor = det(sub_rows, sub_cols);
            Expr term = entry * minor;
            if ((pick + j) % 2 == 1) term = -term;
            acc += term;
        }
        return acc;
    };
    std::vector<size_t> rows(n);
    for (size_t i = 0; i < n; ++i) rows[i] = i;
    return det(rows, cols);
}

} // namespace detail

/// Bracket matrix, symbolic determinant (cofactor expansion, cross-checked
/// along a second row) and the delta-factor bookkeeping of the gauge-fixed
/// measure. Requires a closed all-first-class chain and one gauge per
/// constraint; an identically vanishing determinant is an inadmissible
/// gauge choice.
inline GaugeMeasureReport faddeev_measure(const ConstraintChain& chain,
                                          const std::vector<Expr>& gauges,
                                          const PhaseSpaceSignature& sig) {
    if (!chain.classified)
        throw Error("faddeev_measure requires a classified chain");
    if (!chain.all_first_class()) {
        std::string detail;
        for (const auto& c : chain.constraints)
            if (c.klass == Constraint::Class::Second)
                detail += (detail.empty() ? "" : ", ") + c.expression.str();
        throw Error("gauge-fixed measure requires first-class constraints only; "
                    "second class: " + detail);
    }
    if (chain.constraints.empty())
        throw Error("no constraints to gauge-fix");
    if (gauges.size() != chain.constraints.size())
        throw Error("need exactly " + std::to_string(chain.constraints.size()) +
                    " gauge conditions, got " + std::to_string(gauges.size()));

    GaugeMeasureReport rep;
    rep.constraints = chain.exprs();
    rep.gauges = gauges;
    const size_t n = gauges.size();
    rep.bracket_matrix.assign(n, std::vector<Expr>(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            rep.bracket_matrix[i][j] = poisson_bracket(rep.constraints[i], gauges[j], sig);

    rep.determinant = detail::cofactor_determinant(rep.bracket_matrix, 0);
    if (n > 1) {
        Expr check = detail::cofactor_determinant(rep.bracket_matrix, 1);
        if (check != rep.determinant)
            throw InternalError("cofactor expansions along different rows disagree");
    }
    if (rep.determinant.is_zero())
        throw Error("inadmissible gauge: det|{phi,chi}| vanishes identically");

    for (size_t i = 0; i < n; ++i) {
        rep.delta_factors.push_back("delta(" + gauges[i].str() + ")");
        rep.delta_factors.push_back("delta(" + rep.constraints[i].str() + ")");
    }
    std::string pairs;
    for (const auto& [q, p] : sig.pairs) {
        if (q == Symbol::time()) continue;
        if (!pairs.empty()) pairs += " ";
        pairs += "d" + q.str() + " d" + p.str();
    }
    rep.liouville_factor = pairs;
    return rep;
}

} // namespace hjq
