#include <catch2/catch_amalgamated.hpp>

#include "hjq/analysis.hpp"

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
    return ((b - a + 3) % 3 == 1) ? 1 : -1;  // cyclic of (1,2,3) -> +1
}

/// Gauss generator G_a = -g eps_{abc} A[i,b] pi[i,c], summed over i.
Expr gauss(int a) {
    Expr acc;
    for (int i = 1; i <= 3; ++i)
        for (int b = 1; b <= 3; ++b)
            for (int c = 1; c <= 3; ++c)
                if (eps(a, b, c))
                    acc += Rational(-eps(a, b, c)) * S(g) * S(A(i, b)) * S(Pi(i, c));
    return acc;
}

AnalysisResult analyze_builtin(const std::string& name) {
    return analyze_model(builtin_model(name));
}

} // namespace

TEST_CASE("legendre: regular system inverts completely") {
    FlatModel flat = expand_indices(builtin_model("free-particle"));
    LegendreResult leg = legendre(flat);
    CHECK(leg.rank == 1);
    CHECK(leg.unsolved_coordinates.empty());
    CHECK(leg.primary_constraints.empty());
    const Symbol q = Symbol::coordinate("q");
    CHECK(leg.solved_velocities.at(flat.velocity(q)) == S(flat.momentum(q)));
}

TEST_CASE("legendre: singular toy model") {
    FlatModel flat = expand_indices(builtin_model("toy-singular"));
    LegendreResult leg = legendre(flat);
    const Symbol q1 = Symbol::coordinate("q1"), q2 = Symbol::coordinate("q2");
    const Symbol p1 = Symbol::momentum("p1"), p2 = Symbol::momentum("p2");
    CHECK(leg.rank == 1);
    CHECK(leg.unsolved_coordinates == std::vector<Symbol>{q2});
    CHECK(leg.solved_velocities.at(flat.velocity(q1)) == S(p1) + S(q2));
    REQUIRE(leg.primary_constraints.size() == 1);
    CHECK(leg.primary_constraints[0].first == q2);
    CHECK(leg.primary_constraints[0].second == S(p2));
}

TEST_CASE("legendre: homogeneous gauge model") {
    FlatModel flat = expand_indices(builtin_model("yang-mills-su2-homogeneous"));
    LegendreResult leg = legendre(flat);
    CHECK(leg.rank == 9);
    REQUIRE(leg.unsolved_coordinates.size() == 3);
    REQUIRE(leg.primary_constraints.size() == 3);
    for (int a = 1; a <= 3; ++a) {
        CHECK(leg.unsolved_coordinates[a - 1] == A0(a));
        CHECK(leg.primary_constraints[a - 1].second == S(Pi0(a)));
    }
    // dot(A[1,1]) = pi[1,1] - g (A0[2] A[1,3] - A0[3] A[1,2])
    Expr expected = S(Pi(1, 1)) - S(g) * (S(A0(2)) * S(A(1, 3)) - S(A0(3)) * S(A(1, 2)));
    CHECK(leg.solved_velocities.at(flat.velocity(A(1, 1))) == expected);
}

TEST_CASE("legendre round-trip: solved velocities satisfy their definitions") {
    for (const auto& name : builtin_model_names()) {
        INFO(name);
        FlatModel flat = expand_indices(builtin_model(name));
        LegendreResult leg = legendre(flat);
        for (const auto& q : flat.coordinates) {
            const Symbol v = flat.velocity(q);
            if (!leg.solved_velocities.count(v)) continue;
            Expr eq = S(flat.momentum(q)) - flat.lagrangian.diff(v);
            CHECK(eq.substitute(leg.solved_velocities).is_zero());
        }
    }
}

TEST_CASE("legendre rejects cubic velocity terms") {
    auto spec = parse_model(R"(
model "cubic"
coordinates: q
lagrangian: dot(q)^3
)");
    CHECK_THROWS_AS(legendre(expand_indices(spec)), UnsupportedExpressionError);
}

TEST_CASE("build_h0: frozen values for the builtin models") {
    SECTION("free particle") {
        auto ar = analyze_builtin("free-particle");
        CHECK(ar.h0 == Rational(1, 2) * S(Symbol::momentum("p")).pow(2));
    }
    SECTION("toy-singular") {
        auto ar = analyze_builtin("toy-singular");
        const Symbol p1 = Symbol::momentum("p1"), q2 = Symbol::coordinate("q2");
        CHECK(ar.h0 == Rational(1, 2) * S(p1).pow(2) + S(p1) * S(q2));
    }
    SECTION("homogeneous gauge model, term for term") {
        auto ar = analyze_builtin("yang-mills-su2-homogeneous");
        // 1/4 F_ij F_ij + 1/2 pi pi - (g eps_abc A[i,b] pi[i,c]) A0[a]
        Expr expected;
        for (int i = 1; i <= 3; ++i)
            for (int j = 1; j <= 3; ++j)
                for (int a = 1; a <= 3; ++a) {
                    Expr fij;
                    for (int b = 1; b <= 3; ++b)
                        for (int c = 1; c <= 3; ++c)
                            if (eps(a, b, c))
                                fij += Rational(eps(a, b, c)) * S(g) * S(A(i, b)) * S(A(j, c));
                    expected += Rational(1, 4) * fij * fij;
                }
        for (int i = 1; i <= 3; ++i)
            for (int a = 1; a <= 3; ++a)
                expected += Rational(1, 2) * S(Pi(i, a)).pow(2);
        for (int a = 1; a <= 3; ++a)
            for (int i = 1; i <= 3; ++i)
                for (int b = 1; b <= 3; ++b)
                    for (int c = 1; c <= 3; ++c)
                        if (eps(a, b, c))
                            expected -= Rational(eps(a, b, c)) * S(g) * S(A(i, b)) * S(Pi(i, c)) *
                                        S(A0(a));
        CHECK(ar.h0 == expected);
    }
    SECTION("velocity-free Lagrangian: every momentum primary, H0 = -L") {
        auto spec = parse_model(R"(
model "static"
coordinates: q
lagrangian: q^2
)");
        FlatModel flat = expand_indices(spec);
        LegendreResult leg = legendre(flat);
        CHECK(leg.rank == 0);
        REQUIRE(leg.primary_constraints.size() == 1);
        CHECK(build_h0(leg, flat) == -flat.lagrangian);
    }
}

TEST_CASE("build_hjpde: generators and parameter attachment") {
    auto ar = analyze_builtin("toy-singular");
    REQUIRE(ar.hset.generators.size() == 2);
    CHECK(ar.hset.generators[0].first == Symbol::time());
    CHECK(ar.hset.generators[0].second == S(ar.hset.time_momentum) + ar.h0);
    CHECK(ar.hset.generators[1].first == Symbol::coordinate("q2"));
    CHECK(ar.hset.generators[1].second == S(Symbol::momentum("p2")));

    auto ym = analyze_builtin("yang-mills-su2-homogeneous");
    REQUIRE(ym.hset.generators.size() == 4);
    for (int a = 1; a <= 3; ++a) {
        CHECK(ym.hset.generators[a].first == A0(a));
        CHECK(ym.hset.generators[a].second == S(Pi0(a)));
    }
    // reduced signature: nine spatial pairs; parameters t, A0[a]
    CHECK(ym.hset.reduced.pairs.size() == 9);
    CHECK(ym.hset.reduced.parameters.size() == 4);

    auto free = analyze_builtin("free-particle");
    CHECK(free.hset.generators.size() == 1);
}

TEST_CASE("derive_flow: frozen coefficient tables") {
    SECTION("free particle") {
        auto ar = analyze_builtin("free-particle");
        const Symbol q = Symbol::coordinate("q"), p = Symbol::momentum("p");
        CHECK(ar.flow.coefficient(q, Symbol::time()) == S(p));
        CHECK(ar.flow.coefficient(p, Symbol::time()).is_zero());
    }
    SECTION("toy-singular") {
        auto ar = analyze_builtin("toy-singular");
        const Symbol q1 = Symbol::coordinate("q1"), q2 = Symbol::coordinate("q2");
        const Symbol p1 = Symbol::momentum("p1"), p2 = Symbol::momentum("p2");
        CHECK(ar.flow.coefficient(q1, Symbol::time()) == S(p1) + S(q2));
        CHECK(ar.flow.coefficient(p1, Symbol::time()).is_zero());
        CHECK(ar.flow.coefficient(p2, Symbol::time()) == -S(p1));
        CHECK(ar.flow.coefficient(p2, q2).is_zero());
        CHECK(ar.flow.coefficient(q2, q2) == Expr::one());
    }
    SECTION("gauge model: velocities reappear as time coefficients") {
        auto ar = analyze_builtin("yang-mills-su2-homogeneous");
        for (const auto& [v, w] : ar.legendre_result.solved_velocities) {
            // dot(A[i,a]) solved by the Legendre inversion equals dA[i,a]/dt
            Symbol coord = Symbol::coordinate(v.name().substr(4), v.indices());
            CHECK(ar.flow.coefficient(coord, Symbol::time()) == w);
        }
        // dpi0[a]/dt = -G_a
        for (int a = 1; a <= 3; ++a)
            CHECK(ar.flow.coefficient(Pi0(a), Symbol::time()) == -gauss(a));
    }
}

TEST_CASE("flow/bracket agreement for every builtin model") {
    for (const auto& name : builtin_model_names()) {
        INFO(name);
        auto ar = analyze_builtin(name);
        for (const auto& [x, coeffs] : ar.flow.rows) {
            bool is_momentum = false;
            for (const auto& [qq, pp] : ar.hset.full.pairs)
                if (pp == x) is_momentum = true;
            for (const auto& [param, gen] : ar.hset.generators) {
                Expr bracket = poisson_bracket(S(x), gen, ar.hset.full);
                REQUIRE(ar.flow.coefficient(x, param) == bracket);
                (void)is_momentum;
            }
        }
    }
}

TEST_CASE("integrability_step: candidate records") {
    SECTION("toy: the primary's variation along dt appears") {
        auto ar = analyze_builtin("toy-singular");
        ConstraintChain gen0;
        gen0.constraints.push_back({S(Symbol::momentum("p2")), 0, "q2",
                                    Constraint::Class::Unresolved});
        auto records = integrability_step(ar.hset, gen0);
        const Symbol p1 = Symbol::momentum("p1");
        bool found_dt_candidate = false, found_generator_candidate = false;
        for (const auto& r : records) {
            if (r.direction == Symbol::time() && r.raw == -S(p1)) found_dt_candidate = true;
            if (r.direction == Symbol::coordinate("q2") && r.raw == S(p1))
                found_generator_candidate = true;
        }
        CHECK(found_dt_candidate);        // {p2, H'[t]} = -p1
        CHECK(found_generator_candidate); // {H'[t], H'[q2]} = +p1
    }
    SECTION("gauge model: generation zero yields the Gauss generators") {
        auto ar = analyze_builtin("yang-mills-su2-homogeneous");
        ConstraintChain gen0;
        for (int a = 1; a <= 3; ++a)
            gen0.constraints.push_back({S(Pi0(a)), 0, "A0", Constraint::Class::Unresolved});
        auto records = integrability_step(ar.hset, gen0);
        int gauss_hits = 0;
        for (const auto& r : records)
            for (int a = 1; a <= 3; ++a)
                if (r.raw == gauss(a) && r.direction == A0(a)) ++gauss_hits;
        CHECK(gauss_hits == 3);
    }
}

TEST_CASE("run_chain: frozen chains for the builtin models") {
    SECTION("free particle: empty, closed at generation zero") {
        auto chain = analyze_builtin("free-particle").chain;
        CHECK(chain.closed);
        CHECK(chain.constraints.empty());
        CHECK(chain.closed_at == 0);
        CHECK_FALSE(chain.inconsistent);
    }
    SECTION("toy: {p2; p1}") {
        auto chain = analyze_builtin("toy-singular").chain;
        REQUIRE(chain.constraints.size() == 2);
        CHECK(chain.constraints[0].expression == S(Symbol::momentum("p2")));
        CHECK(chain.constraints[0].generation == 0);
        CHECK(chain.constraints[1].expression == S(Symbol::momentum("p1")));
        CHECK(chain.constraints[1].generation == 1);
        CHECK(chain.closed);
        CHECK(chain.closed_at == 2);
    }
    SECTION("gauge model: primaries then Gauss generators, closed at two") {
        auto chain = analyze_builtin("yang-mills-su2-homogeneous").chain;
        REQUIRE(chain.constraints.size() == 6);
        for (int a = 1; a <= 3; ++a) {
            CHECK(chain.constraints[a - 1].expression == S(Pi0(a)));
            CHECK(chain.constraints[a + 2].expression == gauss(a));
            CHECK(chain.constraints[a + 2].generation == 1);
        }
        CHECK(chain.closed);
        CHECK(chain.closed_at == 2);
        CHECK(chain.obstructions.empty());
    }
    SECTION("massive vector: frozen direction, no constraint from the coupling") {
        auto ar = analyze_builtin("proca-homogeneous");
        const auto& chain = ar.chain;
        REQUIRE(chain.constraints.size() == 2);
        const Symbol m = Symbol::coupling("m");
        CHECK(chain.constraints[0].expression == S(Symbol::momentum("pi0")));
        CHECK(chain.constraints[1].expression ==
              Rational(-1) * S(m).pow(2) * S(Symbol::coordinate("A0")));
        CHECK(chain.closed);
        CHECK_FALSE(chain.inconsistent);
        REQUIRE(chain.obstructions.size() == 1);
        CHECK(chain.obstructions[0].direction == Symbol::coordinate("A0"));
        CHECK_FALSE(chain.obstructions[0].time_direction);
    }
    SECTION("linear potential: inconsistent dynamics flagged") {
        auto spec = parse_model(R"(
model "linear"
coordinates: q
lagrangian: q + dot(q)*0
)");
        auto ar = analyze_model(spec);
        CHECK(ar.chain.inconsistent);
    }
}

TEST_CASE("chain idempotence: a closed chain adds nothing") {
    for (const auto& name : builtin_model_names()) {
        INFO(name);
        auto ar = analyze_builtin(name);
        REQUIRE(ar.chain.closed);
        auto records = integrability_step(ar.hset, ar.chain);
        for (const auto& r : records) {
            bool pure_parameter = !detail::has_canonical_symbol(r.reduced, ar.hset);
            CHECK((r.reduced.is_zero() || pure_parameter));
        }
    }
}

TEST_CASE("integrability equivalence: closure iff generator brackets vanish") {
    for (const auto& name : builtin_model_names()) {
        INFO(name);
        auto ar = analyze_builtin(name);
        CHECK(generators_close(ar.hset, ar.chain) == ar.chain.closed);
    }
    // truncating the gauge chain breaks generator closure
    auto ar = analyze_builtin("yang-mills-su2-homogeneous");
    ConstraintChain truncated;
    for (const auto& c : ar.chain.constraints)
        if (c.generation == 0) truncated.constraints.push_back(c);
    CHECK_FALSE(generators_close(ar.hset, truncated));
}

TEST_CASE("classify: first and second class labels") {
    SECTION("toy: both first class") {
        auto chain = analyze_builtin("toy-singular").chain;
        REQUIRE(chain.classified);
        for (const auto& c : chain.constraints) CHECK(c.klass == Constraint::Class::First);
    }
    SECTION("gauge model: all six first class, su(2) algebra in the matrix") {
        auto chain = analyze_builtin("yang-mills-su2-homogeneous").chain;
        CHECK(chain.all_first_class());
        // hand-checked pair: {G_1, G_2} = -g G_3
        CHECK(chain.bracket_matrix[3][4] == Rational(-1) * S(g) * gauss(3));
        for (int a = 1; a <= 3; ++a)
            for (int b = 1; b <= 3; ++b) {
                int c = 6 - a - b;
                Expr expected = (a == b) ? Expr()
                                         : Rational(-eps(a, b, c)) * S(g) * gauss(c);
                CHECK(chain.bracket_matrix[2 + a][2 + b] == expected);
            }
    }
    SECTION("massive vector: second class") {
        auto chain = analyze_builtin("proca-homogeneous").chain;
        for (const auto& c : chain.constraints) CHECK(c.klass == Constraint::Class::Second);
    }
    SECTION("a lone constraint is first class by antisymmetry") {
        ConstraintChain lone;
        lone.constraints.push_back(
            {S(Symbol::momentum("p")), 0, "manual", Constraint::Class::Unresolved});
        lone.closed = true;
        PhaseSpaceSignature sig{{{Symbol::coordinate("q"), Symbol::momentum("p")}}, {}};
        auto classified = classify(lone, sig);
        CHECK(classified.constraints[0].klass == Constraint::Class::First);
    }
}

TEST_CASE("dependency certificates: the gauge algebra combination reduces to zero") {
    auto ar = analyze_builtin("yang-mills-su2-homogeneous");
    const auto& chain = ar.chain;
    const std::vector<Expr> divisors = sort_for_reduction(chain.exprs());
    for (int a = 1; a <= 3; ++a) {
        // E_a = g eps_abc A0[b] G_c must lie in the chain's span
        Expr combo;
        for (int b = 1; b <= 3; ++b)
            for (int c = 1; c <= 3; ++c)
                if (eps(a, b, c)) combo += Rational(eps(a, b, c)) * S(g) * S(A0(b)) * gauss(c);
        auto red = reduce_modulo(combo, divisors);
        CHECK(red.reduced_to_zero());
        bool used_gauss = false;
        for (size_t i = 0; i < divisors.size(); ++i)
            if (!red.quotients[i].is_zero()) used_gauss = true;
        CHECK(used_gauss);
    }
    // the engine stored certificates for the generation-2 scan of the G_a
    int gauss_certificates = 0;
    for (const auto& cert : chain.certificates)
        if (cert.direction == Symbol::time() && !cert.combination.empty() &&
            cert.source.find("constraint") == 0)
            ++gauss_certificates;
    CHECK(gauss_certificates >= 3);
}

TEST_CASE("open chain reported, not thrown") {
    // max_generations = 1 forces an open gauge chain
    auto flat = expand_indices(builtin_model("yang-mills-su2-homogeneous"));
    auto leg = legendre(flat);
    auto hs = build_hjpde(leg, build_h0(leg, flat), flat);
    auto chain = run_chain(hs, 1);
    CHECK_FALSE(chain.closed);
    CHECK(chain.closed_at == -1);
    CHECK_THROWS_AS(classify(chain, hs.full), Error);
}
