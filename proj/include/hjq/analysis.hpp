#pragma once

#include <limits>

#include "hjq/action.hpp"
#include "hjq/numeric.hpp"
#include "hjq/oracle.hpp"
#include "hjq/parse.hpp"

namespace hjq {

inline constexpr const char* kVersion = "0.1.0";

/// Everything the symbolic pipeline computes for one model.
struct AnalysisResult {
    ModelSpec spec;
    FlatModel model;
    LegendreResult legendre_result;
    Expr h0;
    HamiltonianSet hset;
    TotalDifferentialSystem flow;
    ConstraintChain chain;  // classified when closed
    CanonicalAction action;
    PathIntegralReport path_integral;
};

inline AnalysisResult analyze_model(const ModelSpec& spec, int max_generations = 10) {
    AnalysisResult r;
    r.spec = spec;
    r.model = expand_indices(spec);
    r.legendre_result = legendre(r.model);
    r.h0 = build_h0(r.legendre_result, r.model);
    r.hset = build_hjpde(r.legendre_result, r.h0, r.model);
    r.flow = derive_flow(r.hset);
    r.chain = run_chain(r.hset, max_generations);
    if (r.chain.closed) r.chain = classify(r.chain, r.hset.full);
    r.action = canonical_action(r.hset, r.flow);
    r.path_integral = path_integral_report(r.action, r.hset, r.chain);
    return r;
}

/// The numeric validation bundle behind `verify`.
struct VerifyResult {
    DriftReport drift;
    ProbeReport probe;
    ConstraintChain oracle_chain;
    ChainComparison comparison;
    double drift_tolerance = 1e-8;
    double probe_tolerance = 1e-10;
    bool drift_ok = false;
    bool probe_ok = false;
    bool oracle_ok = false;

    bool all_ok() const { return drift_ok && probe_ok && oracle_ok; }
};

struct VerifyOptions {
    double dt = 1e-3;
    double t_end = 10.0;
    std::uint64_t seed = 7;
    int samples = 100;
    double drift_tolerance = 1e-8;
    double probe_tolerance = 1e-10;
    std::string a0_path;  // expression in t applied to every promoted coordinate
};

inline VerifyResult run_verify(const AnalysisResult& ar, const VerifyOptions& opt) {
    VerifyResult v;
    v.drift_tolerance = opt.drift_tolerance;
    v.probe_tolerance = opt.probe_tolerance;

    std::map<Symbol, Expr> paths;
    for (const auto& q : ar.legendre_result.unsolved_coordinates) {
        if (opt.a0_path.empty()) {
            paths[q] = Expr();
        } else {
            std::map<std::string, Symbol> table{{"t", Symbol::time()}};
            for (const auto& [c, val] : ar.model.couplings) table[c.str()] = c;
            paths[q] = parse_flat_expr(opt.a0_path, table);
        }
    }

    NumericState init;
    if (ar.spec.name == "yang-mills-su2-homogeneous")
        init = ym_on_surface_state(ar.model, opt.seed);
    else
        init = random_on_surface_state(ar.model, ar.chain, opt.seed);
    // promoted coordinates start on their paths
    std::map<Symbol, double> at0{{Symbol::time(), 0.0}};
    for (const auto& [p, path] : paths) init.values[p] = path.eval(at0);

    try {
        v.drift = drift_with_halving(ar.flow, ar.chain, ar.h0, init, paths, opt.dt, opt.t_end);
        v.drift_ok = v.drift.max_constraint_drift <= opt.drift_tolerance &&
                     v.drift.energy_drift_rel <= opt.drift_tolerance;
    } catch (const Error&) {
        // a diverged trajectory is a drift breach, not a tool failure
        v.drift.dt = opt.dt;
        v.drift.max_constraint_drift = std::numeric_limits<double>::infinity();
        v.drift.energy_drift_rel = std::numeric_limits<double>::infinity();
        v.drift_ok = false;
    }

    v.probe = integrability_probe(ar.hset, ar.chain, opt.samples, opt.seed, ar.model);
    v.probe_ok = ar.chain.closed ? v.probe.max_residual <= opt.probe_tolerance
                                 : v.probe.max_residual > opt.probe_tolerance;

    v.oracle_chain = dirac_oracle(ar.model);
    v.comparison = compare_chains(ar.chain, v.oracle_chain);
    v.oracle_ok = v.comparison.equivalent;
    return v;
}

} // namespace hjq
