// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Each criterion pins its tolerances in code.

#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "hjq/analysis.hpp"
#include "test_support.hpp"

using namespace hjq;

namespace {

Expr S(const Symbol& s) { return Expr::sym(s); }
const Symbol g = Symbol::coupling("g");
Symbol A(int i, int a) { return Symbol::coordinate("A", {i, a}); }
Symbol Pi(int i, int a) { return Symbol::momentum("pi", {i, a}); }
Symbol A0(int a) { return Symbol::coordinate("A0", {a}); }
Symbol Pi0(int a) { return Symbol::momentum("pi0", {a}); }

int eps(int a, int b, int c) {
    if (a == b || b == c || a == c) return 0;
    return ((b - a + 3) % 3 == 1) ? 1 : -1;
}

Expr gauss(int a) {
    Expr acc;
    for (int i = 1; i <= 3; ++i)
        for (int b = 1; b <= 3; ++b)
            for (int c = 1; c <= 3; ++c)
                if (eps(a, b, c))
                    acc += Rational(-eps(a, b, c)) * S(g) * S(A(i, b)) * S(Pi(i, c));
    return acc;
}

Expr field_strength_squared_quarter() {
    Expr acc;
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j)
            for (int a = 1; a <= 3; ++a) {
                Expr fij;
                for (int b = 1; b <= 3; ++b)
                    for (int c = 1; c <= 3; ++c)
                        if (eps(a, b, c))
                            fij += Rational(eps(a, b, c)) * S(g) * S(A(i, b)) * S(A(j, c));
                acc += Rational(1, 4) * fij * fij;
            }
    return acc;
}

struct Criterion {
    std::string label;
    std::function<std::string()> run;  // empty string = pass, else failure detail
};

#define REQUIRE_OR_FAIL(cond, msg)                                   \
    do {                                                             \
        if (!(cond)) return std::string(msg);                        \
    } while (0)

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

} // namespace

int main() {
    AnalysisResult ym = analyze_model(builtin_model("yang-mills-su2-homogeneous"));
    AnalysisResult toy = analyze_model(builtin_model("toy-singular"));

    std::vector<Criterion> criteria;

    criteria.push_back({"1. primary constraints of the homogeneous gauge model", [&] {
        auto gen0 = ym.chain.generation_exprs(0);
        REQUIRE_OR_FAIL(gen0.size() == 3, "expected 3 generation-0 constraints");
        for (int a = 1; a <= 3; ++a)
            REQUIRE_OR_FAIL(gen0[a - 1] == S(Pi0(a)),
                            "generation 0 member " + std::to_string(a) + " is " +
                                gen0[a - 1].str() + ", expected " + Pi0(a).str());
        return std::string();
    }});

    criteria.push_back({"2. secondary constraints are the Gauss generators, "
                        "with the dependent combination certified", [&] {
        auto gen1 = ym.chain.generation_exprs(1);
        REQUIRE_OR_FAIL(gen1.size() == 3, "expected 3 generation-1 constraints");
        for (int a = 1; a <= 3; ++a)
            REQUIRE_OR_FAIL(gen1[a - 1] == gauss(a),
                            "generation 1 member " + std::to_string(a) + " is " +
                                gen1[a - 1].str());
        const std::vector<Expr> divisors = sort_for_reduction(ym.chain.exprs());
        for (int a = 1; a <= 3; ++a) {
            Expr combo;
            for (int b = 1; b <= 3; ++b)
                for (int c = 1; c <= 3; ++c)
                    if (eps(a, b, c))
                        combo += Rational(eps(a, b, c)) * S(g) * S(A0(b)) * gauss(c);
            auto red = reduce_modulo(combo, divisors);
            REQUIRE_OR_FAIL(red.reduced_to_zero(),
                            "combination for a=" + std::to_string(a) + " left remainder " +
                                red.remainder.str());
            bool nonzero_quotient = false;
            for (const auto& q : red.quotients)
                if (!q.is_zero()) nonzero_quotient = true;
            REQUIRE_OR_FAIL(nonzero_quotient, "no certificate coefficients recorded");
        }
        int stored = 0;
        for (const auto& cert : ym.chain.certificates)
            if (cert.direction == Symbol::time() && cert.source.find("constraint") == 0)
                ++stored;
        REQUIRE_OR_FAIL(stored >= 3, "engine stored no generation-2 dependency certificates");
        return std::string();
    }});

    criteria.push_back({"3. canonical Hamiltonian matches the reduced field form exactly", [&] {
        Expr expected = field_strength_squared_quarter();
        for (int i = 1; i <= 3; ++i)
            for (int a = 1; a <= 3; ++a)
                expected += Rational(1, 2) * S(Pi(i, a)).pow(2);
        for (int a = 1; a <= 3; ++a) {
            Expr div_pi;  // g eps_abc A[i,b] pi[i,c]
            for (int i = 1; i <= 3; ++i)
                for (int b = 1; b <= 3; ++b)
                    for (int c = 1; c <= 3; ++c)
                        if (eps(a, b, c))
                            div_pi += Rational(eps(a, b, c)) * S(g) * S(A(i, b)) * S(Pi(i, c));
            expected -= div_pi * S(A0(a));
        }
        REQUIRE_OR_FAIL(ym.h0 == expected, "canonical Hamiltonian differs from the "
                                           "independently assembled form");
        return std::string();
    }});

    criteria.push_back({"4. canonical action integrand matches the first-order form exactly", [&] {
        Expr expected = -field_strength_squared_quarter();
        for (int i = 1; i <= 3; ++i)
            for (int a = 1; a <= 3; ++a)
                expected += Rational(1, 2) * S(Pi(i, a)).pow(2);
        for (int a = 1; a <= 3; ++a) {
            Expr div_pi;
            for (int i = 1; i <= 3; ++i)
                for (int b = 1; b <= 3; ++b)
                    for (int c = 1; c <= 3; ++c)
                        if (eps(a, b, c))
                            div_pi += Rational(eps(a, b, c)) * S(g) * S(A(i, b)) * S(Pi(i, c));
            expected += div_pi * S(A0(a));
        }
        for (int i = 1; i <= 3; ++i)
            for (int a = 1; a <= 3; ++a)
                expected += S(Pi(i, a)) * ym.flow.coefficient(A(i, a), Symbol::time());
        REQUIRE_OR_FAIL(ym.action.time_integrand() == expected,
                        "time-direction integrand differs from the assembled form");
        return std::string();
    }});

    criteria.push_back({"5. path integral runs over the nine spatial pairs only, gauge-free", [&] {
        const auto& rep = ym.path_integral;
        REQUIRE_OR_FAIL(rep.integration_variables.size() == 9, "expected 9 canonical pairs");
        for (int i = 1; i <= 3; ++i)
            for (int a = 1; a <= 3; ++a) {
                auto pair = std::make_pair(A(i, a), Pi(i, a));
                REQUIRE_OR_FAIL(std::find(rep.integration_variables.begin(),
                                          rep.integration_variables.end(),
                                          pair) != rep.integration_variables.end(),
                                "missing pair (" + A(i, a).str() + ", " + Pi(i, a).str() + ")");
            }
        std::vector<Symbol> expected_ext{Symbol::time(), A0(1), A0(2), A0(3)};
        REQUIRE_OR_FAIL(rep.external_parameters == expected_ext,
                        "external parameters are not {t, A0[a]}");
        REQUIRE_OR_FAIL(rep.gauge_condition_count == 0, "gauge conditions attached");
        REQUIRE_OR_FAIL(rep.delta_factor_count == 0, "delta factors attached");
        REQUIRE_OR_FAIL(rep.determinant_factor_count == 0, "determinant factors attached");
        REQUIRE_OR_FAIL(rep.integrable, "report not marked integrable");
        return std::string();
    }});

    criteria.push_back({"6. chain closes at generation 2; on-surface probe <= 1e-10", [&] {
        REQUIRE_OR_FAIL(ym.chain.closed, "chain open");
        REQUIRE_OR_FAIL(ym.chain.closed_at == 2,
                        "closed at generation " + std::to_string(ym.chain.closed_at));
        ProbeReport probe = integrability_probe(ym.hset, ym.chain, 100, 42, ym.model);
        REQUIRE_OR_FAIL(probe.max_residual <= 1e-10,
                        "probe residual " + fmt(probe.max_residual));
        return std::string();
    }});

    criteria.push_back({"7. drift gates at dt=1e-3, t<=10, unit-scale data", [&] {
        NumericState init = ym_on_surface_state(ym.model, 7);
        std::map<Symbol, Expr> paths;
        for (const auto& q : ym.legendre_result.unsolved_coordinates) paths[q] = Expr();
        DriftReport rep = drift_with_halving(ym.flow, ym.chain, ym.h0, init, paths, 1e-3, 10.0);
        double gauss_drift = 0.0;
        for (const auto& [name, v] : rep.constraint_max)
            if (name.find("pi0") == std::string::npos) gauss_drift = std::max(gauss_drift, v);
        REQUIRE_OR_FAIL(gauss_drift <= 1e-8, "Gauss drift " + fmt(gauss_drift));
        REQUIRE_OR_FAIL(rep.energy_drift_rel <= 1e-8,
                        "energy drift " + fmt(rep.energy_drift_rel));
        REQUIRE_OR_FAIL(rep.halving_ratio.has_value(), "no halving ratio computed");
        REQUIRE_OR_FAIL(*rep.halving_ratio >= 12.0 && *rep.halving_ratio <= 20.0,
                        "halving ratio " + fmt(*rep.halving_ratio) + " outside [12, 20]");
        return std::string();
    }});

    criteria.push_back({"8. engine chain equals the total-Hamiltonian oracle chain "
                        "on all builtin models", [&] {
        for (const auto& name : builtin_model_names()) {
            AnalysisResult ar = analyze_model(builtin_model(name));
            ConstraintChain oracle = dirac_oracle(ar.model);
            auto cmp = compare_chains(ar.chain, oracle);
            REQUIRE_OR_FAIL(cmp.equivalent, "chains differ for " + name);
        }
        return std::string();
    }});

    criteria.push_back({"9. bracket algebra on 500 random instances each", [&] {
        std::mt19937_64 rng(20240521);
        const Symbol q1 = Symbol::coordinate("q1"), p1 = Symbol::momentum("p1");
        const Symbol q2 = Symbol::coordinate("q2"), p2 = Symbol::momentum("p2");
        const Symbol c = Symbol::parameter("c");
        PhaseSpaceSignature sig{{{q1, p1}, {q2, p2}}, {c}};
        std::vector<Symbol> syms{q1, p1, q2, p2, c};
        for (int k = 0; k < 500; ++k) {
            Expr f = testing::random_expr(rng, syms, 5, 4);
            Expr gg = testing::random_expr(rng, syms, 5, 4);
            Expr h = testing::random_expr(rng, syms, 5, 4);
            REQUIRE_OR_FAIL((poisson_bracket(f, gg, sig) + poisson_bracket(gg, f, sig)).is_zero(),
                            "antisymmetry failed at instance " + std::to_string(k));
            Expr jac = poisson_bracket(f, poisson_bracket(gg, h, sig), sig) +
                       poisson_bracket(gg, poisson_bracket(h, f, sig), sig) +
                       poisson_bracket(h, poisson_bracket(f, gg, sig), sig);
            REQUIRE_OR_FAIL(jac.is_zero(), "Jacobi failed at instance " + std::to_string(k));
            Expr leib = poisson_bracket(f, gg * h, sig) -
                        (poisson_bracket(f, gg, sig) * h + gg * poisson_bracket(f, h, sig));
            REQUIRE_OR_FAIL(leib.is_zero(), "Leibniz failed at instance " + std::to_string(k));
        }
        return std::string();
    }});

    criteria.push_back({"10. singular toy model end to end, all values exact", [&] {
        const Symbol p1 = Symbol::momentum("p1"), p2 = Symbol::momentum("p2");
        const Symbol q2 = Symbol::coordinate("q2");
        REQUIRE_OR_FAIL(toy.chain.constraints.size() == 2, "chain size");
        REQUIRE_OR_FAIL(toy.chain.constraints[0].expression == S(p2), "generation 0");
        REQUIRE_OR_FAIL(toy.chain.constraints[1].expression == S(p1), "generation 1");
        REQUIRE_OR_FAIL(toy.chain.all_first_class(), "classes");
        REQUIRE_OR_FAIL(toy.h0 == Rational(1, 2) * S(p1).pow(2) + S(p1) * S(q2),
                        "canonical Hamiltonian " + toy.h0.str());
        REQUIRE_OR_FAIL(toy.action.time_integrand() == Rational(1, 2) * S(p1).pow(2),
                        "action integrand " + toy.action.time_integrand().str());
        ConstraintChain oracle = dirac_oracle(toy.model);
        REQUIRE_OR_FAIL(compare_chains(toy.chain, oracle).equivalent, "oracle disagrees");
        return std::string();
    }});

    criteria.push_back({"11. gauge-fixed measure vs the gauge-free report", [&] {
        const Symbol q1 = Symbol::coordinate("q1"), q2 = Symbol::coordinate("q2");
        GaugeMeasureReport m = faddeev_measure(toy.chain, {S(q2), S(q1)}, toy.hset.full);
        REQUIRE_OR_FAIL(m.determinant == Expr::one(),
                        "determinant " + m.determinant.str());
        std::vector<std::string> expected{"delta(q2)", "delta(p2)", "delta(q1)", "delta(p1)"};
        REQUIRE_OR_FAIL(m.delta_factors == expected, "delta factor list");
        REQUIRE_OR_FAIL(!m.liouville_factor.empty(), "no Liouville factor");
        // the canonical report of the same model carries none of this
        const auto& rep = toy.path_integral;
        REQUIRE_OR_FAIL(rep.gauge_condition_count == 0 && rep.delta_factor_count == 0 &&
                            rep.determinant_factor_count == 0,
                        "canonical report is not gauge-free");
        REQUIRE_OR_FAIL(rep.integrable, "canonical report not integrable");
        return std::string();
    }});

    int failures = 0;
    for (const auto& c : criteria) {
        std::string detail;
        try {
            detail = c.run();
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        if (detail.empty()) {
            std::cout << "PASS  " << c.label << "\n";
        } else {
            std::cout << "FAIL  " << c.label << " -- " << detail << "\n";
            ++failures;
        }
    }
    if (failures) std::cout << failures << " criterion(s) failed\n";
    return failures == 0 ? 0 : 1;
}
