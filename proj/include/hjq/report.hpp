#pragma once

#include <cstdint>
#include <ctime>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "hjq/analysis.hpp"

namespace hjq {

using nlohmann::json;

// ---------------------------------------------------------------------------
// JSON serialization. Expressions carry both the canonical text and the
// monomial list so reports are machine-diffable.

inline json to_json(const Expr& e) {
    json monomials = json::array();
    for (const auto& m : e.terms()) {
        json powers = json::array();
        for (const auto& [s, exp] : m.factors) powers.push_back({s.str(), exp});
        monomials.push_back({{"coeff", to_string(m.coeff)}, {"powers", powers}});
    }
    return {{"text", e.str()}, {"monomials", monomials}};
}

inline json to_json(const PhaseSpaceSignature& sig) {
    json pairs = json::array();
    for (const auto& [q, p] : sig.pairs) pairs.push_back({q.str(), p.str()});
    json params = json::array();
    for (const auto& s : sig.parameters) params.push_back(s.str());
    return {{"pairs", pairs}, {"parameters", params}};
}

inline json to_json(const ConstraintChain& chain) {
    json constraints = json::array();
    for (const auto& c : chain.constraints) {
        const char* klass = !chain.classified ? "unresolved"
                            : c.klass == Constraint::Class::First ? "first"
                            : c.klass == Constraint::Class::Second ? "second"
                                                                   : "unresolved";
        constraints.push_back({{"expression", to_json(c.expression)},
                               {"generation", c.generation},
                               {"provenance", c.provenance},
                               {"class", klass}});
    }
    json certs = json::array();
    for (const auto& cert : chain.certificates) {
        json combo = json::array();
        for (const auto& [quot, expr] : cert.combination)
            combo.push_back({{"quotient", to_json(quot)}, {"constraint", to_json(expr)}});
        certs.push_back({{"candidate", to_json(cert.candidate)},
                         {"source", cert.source},
                         {"direction", cert.direction.str()},
                         {"combination", combo}});
    }
    json obstructions = json::array();
    for (const auto& o : chain.obstructions)
        obstructions.push_back({{"value", to_json(o.value)},
                                {"source", o.source},
                                {"direction", o.direction.str()},
                                {"time_direction", o.time_direction}});
    json matrix = json::array();
    for (const auto& row : chain.bracket_matrix) {
        json r = json::array();
        for (const auto& e : row) r.push_back(e.str());
        matrix.push_back(r);
    }
    return {{"constraints", constraints},
            {"status", chain.closed ? "CLOSED" : "OPEN"},
            {"closed_at_generation", chain.closed ? json(chain.closed_at) : json()},
            {"inconsistent", chain.inconsistent},
            {"certificates", certs},
            {"obstructions", obstructions},
            {"bracket_matrix", matrix}};
}

inline json analysis_to_json(const AnalysisResult& ar) {
    json j;
    j["model"] = {{"name", ar.model.name},
                  {"source", print_model_spec(ar.spec)},
                  {"coordinates", json::array()},
                  {"couplings", json::array()},
                  {"lagrangian", to_json(ar.model.lagrangian)}};
    for (const auto& q : ar.model.coordinates)
        j["model"]["coordinates"].push_back(
            {{"coordinate", q.str()},
             {"velocity", ar.model.velocity(q).str()},
             {"momentum", ar.model.momentum(q).str()}});
    for (const auto& [c, v] : ar.model.couplings)
        j["model"]["couplings"].push_back(
            {{"name", c.str()}, {"value", v ? json(to_string(*v)) : json()}});

    const auto& leg = ar.legendre_result;
    j["legendre"] = {{"rank", leg.rank},
                     {"generic_rank_warning", leg.generic_rank_warning},
                     {"momentum_definitions", json::array()},
                     {"solved_velocities", json::array()},
                     {"unsolved_coordinates", json::array()},
                     {"primary_constraints", json::array()}};
    for (const auto& [p, def] : leg.momentum_definitions)
        j["legendre"]["momentum_definitions"].push_back({{"momentum", p.str()}, {"value", to_json(def)}});
    for (const auto& [v, w] : leg.solved_velocities)
        j["legendre"]["solved_velocities"].push_back({{"velocity", v.str()}, {"value", to_json(w)}});
    for (const auto& q : leg.unsolved_coordinates)
        j["legendre"]["unsolved_coordinates"].push_back(q.str());
    for (const auto& [q, gen] : leg.primary_constraints)
        j["legendre"]["primary_constraints"].push_back(
            {{"parameter", q.str()}, {"generator", to_json(gen)}});

    j["hamiltonians"] = {{"h0", to_json(ar.h0)},
                         {"generators", json::array()},
                         {"reduced_signature", to_json(ar.hset.reduced)},
                         {"full_signature", to_json(ar.hset.full)}};
    for (const auto& [param, gen] : ar.hset.generators)
        j["hamiltonians"]["generators"].push_back(
            {{"parameter", param.str()}, {"expression", to_json(gen)}});

    j["chain"] = to_json(ar.chain);

    j["action"] = {{"integrand", json::array()}, {"kinetic", json::array()}};
    for (const auto& [param, e] : ar.action.integrand)
        j["action"]["integrand"].push_back({{"direction", param.str()}, {"value", to_json(e)}});
    for (const auto& [p, dq] : ar.action.kinetic)
        j["action"]["kinetic"].push_back({{"momentum", p.str()}, {"dq_dt", to_json(dq)}});

    const auto& pi = ar.path_integral;
    j["path_integral"] = {{"integration_variables", json::array()},
                          {"external_parameters", json::array()},
                          {"action_integrand", to_json(pi.action_integrand)},
                          {"integrable", pi.integrable},
                          {"chain_closed", pi.chain_closed},
                          {"gauge_condition_count", pi.gauge_condition_count},
                          {"delta_factor_count", pi.delta_factor_count},
                          {"determinant_factor_count", pi.determinant_factor_count},
                          {"notes", pi.notes}};
    for (const auto& [q, p] : pi.integration_variables)
        j["path_integral"]["integration_variables"].push_back({q.str(), p.str()});
    for (const auto& s : pi.external_parameters)
        j["path_integral"]["external_parameters"].push_back(s.str());

    j["measure"] = nullptr;
    j["verify"] = nullptr;
    return j;
}

inline json to_json(const GaugeMeasureReport& m) {
    json j;
    j["constraints"] = json::array();
    for (const auto& e : m.constraints) j["constraints"].push_back(to_json(e));
    j["gauges"] = json::array();
    for (const auto& e : m.gauges) j["gauges"].push_back(to_json(e));
    j["bracket_matrix"] = json::array();
    for (const auto& row : m.bracket_matrix) {
        json r = json::array();
        for (const auto& e : row) r.push_back(e.str());
        j["bracket_matrix"].push_back(r);
    }
    j["determinant"] = to_json(m.determinant);
    j["delta_factors"] = m.delta_factors;
    j["liouville_factor"] = m.liouville_factor;
    return j;
}

inline json to_json(const VerifyResult& v) {
    json drift = {{"dt", v.drift.dt},
                  {"max_constraint_drift", v.drift.max_constraint_drift},
                  {"energy_initial", v.drift.energy_initial},
                  {"energy_drift_rel", v.drift.energy_drift_rel},
                  {"per_constraint", json::array()},
                  {"halving_ratio", v.drift.halving_ratio ? json(*v.drift.halving_ratio) : json()},
                  {"convergence_order",
                   v.drift.convergence_order ? json(*v.drift.convergence_order) : json()}};
    for (const auto& [name, val] : v.drift.constraint_max)
        drift["per_constraint"].push_back({{"constraint", name}, {"max_abs", val}});

    json probe = {{"samples", v.probe.samples},
                  {"seed", v.probe.seed},
                  {"max_residual", v.probe.max_residual},
                  {"degraded", v.probe.degraded},
                  {"skipped_directions", json::array()},
                  {"per_bracket", json::array()}};
    for (const auto& s : v.probe.skipped_directions)
        probe["skipped_directions"].push_back(s.str());
    for (const auto& [label, val] : v.probe.per_bracket_max)
        probe["per_bracket"].push_back({{"bracket", label}, {"max_abs", val}});

    json cmp = {{"equivalent", v.comparison.equivalent},
                {"unmatched_in_engine", json::array()},
                {"unmatched_in_oracle", json::array()}};
    for (const auto& e : v.comparison.unmatched_in_a) cmp["unmatched_in_engine"].push_back(e.str());
    for (const auto& e : v.comparison.unmatched_in_b) cmp["unmatched_in_oracle"].push_back(e.str());

    return {{"drift", drift},
            {"probe", probe},
            {"oracle", to_json(v.oracle_chain)},
            {"comparison", cmp},
            {"drift_tolerance", v.drift_tolerance},
            {"probe_tolerance", v.probe_tolerance},
            {"drift_ok", v.drift_ok},
            {"probe_ok", v.probe_ok},
            {"oracle_ok", v.oracle_ok}};
}

// ---------------------------------------------------------------------------

/// FNV-1a 64-bit digest of the canonical serialization, stable across runs.
inline std::string content_hash(const json& j) {
    json stripped = j;
    if (stripped.contains("meta")) {
        stripped["meta"].erase("timestamp");
        stripped["meta"].erase("content_hash");
    }
    const std::string dump = stripped.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

inline void attach_meta(json& j, const std::string& command, bool with_timestamp = true) {
    j["meta"] = {{"tool", "hjq"}, {"version", kVersion}, {"command", command}};
    j["meta"]["content_hash"] = content_hash(j);
    if (with_timestamp) {
        std::time_t now = std::time(nullptr);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        j["meta"]["timestamp"] = buf;
    }
}

// ---------------------------------------------------------------------------
// Human-readable rendering.

namespace detail {

struct Palette {
    bool color = false;
    std::string head(const std::string& s) const {
        return color ? "\033[1;36m" + s + "\033[0m" : s;
    }
    std::string warn(const std::string& s) const {
        return color ? "\033[1;33m" + s + "\033[0m" : s;
    }
};

} // namespace detail

inline void render_text(std::ostream& os, const AnalysisResult& ar, bool color = false) {
    detail::Palette pal{color};
    os << pal.head("== model ==") << "\n";
    os << "name: " << ar.model.name << "\n";
    os << "coordinates:";
    for (const auto& q : ar.model.coordinates) os << " " << q.str();
    os << "\n";
    if (!ar.model.couplings.empty()) {
        os << "couplings:";
        for (const auto& [c, v] : ar.model.couplings) {
            os << " " << c.str();
            if (v) os << "=" << to_string(*v);
        }
        os << "\n";
    }
    os << "lagrangian: " << ar.model.lagrangian << "\n\n";

    const auto& leg = ar.legendre_result;
    os << pal.head("== legendre ==") << "\n";
    os << "hessian rank: " << leg.rank << " of " << ar.model.coordinates.size() << "\n";
    if (leg.generic_rank_warning)
        os << pal.warn("warning: generic-rank elimination (a pivot vanishes at special "
                       "symbol values)")
           << "\n";
    for (const auto& [p, def] : leg.momentum_definitions)
        os << "  " << p.str() << " = " << def << "\n";
    os << "solved velocities:\n";
    for (const auto& [v, w] : leg.solved_velocities)
        os << "  " << v.str() << " = " << w << "\n";
    if (!leg.unsolved_coordinates.empty()) {
        os << "promoted to parameters:";
        for (const auto& q : leg.unsolved_coordinates) os << " " << q.str();
        os << "\n";
    }
    os << "\n" << pal.head("== hamilton-jacobi generators ==") << "\n";
    os << "H0 = " << ar.h0 << "\n";
    for (const auto& [param, gen] : ar.hset.generators)
        os << "H'[" << param.str() << "] = " << gen << "\n";

    os << "\n" << pal.head("== constraint chain ==") << "\n";
    os << "status: " << (ar.chain.closed ? "CLOSED" : "OPEN (generation cap reached)");
    if (ar.chain.closed) os << " at generation " << ar.chain.closed_at;
    os << "\n";
    if (ar.chain.inconsistent)
        os << pal.warn("dynamics inconsistent along the time direction") << "\n";
    for (const auto& c : ar.chain.constraints) {
        os << "  gen " << c.generation << ": " << c.expression;
        if (ar.chain.classified)
            os << "   [" << (c.klass == Constraint::Class::First ? "first class" : "second class")
               << "]";
        os << "   (" << c.provenance << ")\n";
    }
    for (const auto& o : ar.chain.obstructions)
        os << pal.warn("  direction d" + o.direction.str() + " frozen: " + o.value.str() +
                       " from " + o.source)
           << "\n";
    os << "dependency certificates: " << ar.chain.certificates.size() << "\n";

    os << "\n" << pal.head("== canonical action ==") << "\n";
    for (const auto& [param, e] : ar.action.integrand)
        os << "  dz/d" << param.str() << " = " << e << "\n";

    os << "\n" << pal.head("== path integral ==") << "\n";
    os << "integration variables:";
    for (const auto& [q, p] : ar.path_integral.integration_variables)
        os << " (" << q.str() << ", " << p.str() << ")";
    os << "\nexternal parameters:";
    for (const auto& s : ar.path_integral.external_parameters) os << " " << s.str();
    os << "\naction integrand (time direction): " << ar.path_integral.action_integrand << "\n";
    os << "gauge conditions: " << ar.path_integral.gauge_condition_count
       << ", delta factors: " << ar.path_integral.delta_factor_count
       << ", determinant factors: " << ar.path_integral.determinant_factor_count << "\n";
    for (const auto& n : ar.path_integral.notes) os << "note: " << n << "\n";
}

inline void render_measure_text(std::ostream& os, const GaugeMeasureReport& m,
                                bool color = false) {
    detail::Palette pal{color};
    os << pal.head("== gauge-fixed measure ==") << "\n";
    for (size_t i = 0; i < m.constraints.size(); ++i)
        os << "  phi[" << i + 1 << "] = " << m.constraints[i] << ",  chi[" << i + 1
           << "] = " << m.gauges[i] << "\n";
    os << "bracket matrix {phi, chi}:\n";
    for (const auto& row : m.bracket_matrix) {
        os << "  [";
        for (size_t k = 0; k < row.size(); ++k) os << (k ? ", " : " ") << row[k];
        os << " ]\n";
    }
    os << "det|{phi, chi}| = " << m.determinant << "\n";
    os << "delta factors:";
    for (const auto& d : m.delta_factors) os << " " << d;
    os << "\nliouville factor: " << m.liouville_factor << "\n";
}

inline void render_verify_text(std::ostream& os, const VerifyResult& v, bool color = false) {
    detail::Palette pal{color};
    os << pal.head("== numeric verification ==") << "\n";
    os << std::scientific << std::setprecision(3);
    os << "dt = " << v.drift.dt << ", max constraint drift = " << v.drift.max_constraint_drift
       << " (tolerance " << v.drift_tolerance << ")\n";
    for (const auto& [name, val] : v.drift.constraint_max)
        os << "  max |" << name << "| = " << val << "\n";
    os << "relative energy drift = " << v.drift.energy_drift_rel << " (H0 initial "
       << v.drift.energy_initial << ")\n";
    if (v.drift.halving_ratio)
        os << "step-halving drift reduction: " << *v.drift.halving_ratio
           << " (order " << std::setprecision(2) << *v.drift.convergence_order << ")\n";
    os << std::setprecision(3);
    os << "probe: max |{C, H'}| = " << v.probe.max_residual << " over " << v.probe.samples
       << " on-surface samples (tolerance " << v.probe_tolerance << ")"
       << (v.probe.degraded ? " [degraded sampling]" : "") << "\n";
    for (const auto& s : v.probe.skipped_directions)
        os << "  frozen direction skipped: d" << s.str() << "\n";
    os << "oracle comparison: "
       << (v.comparison.equivalent ? "EQUIVALENT" : pal.warn("NOT EQUIVALENT")) << "\n";
    for (const auto& e : v.comparison.unmatched_in_a)
        os << "  engine-only constraint: " << e << "\n";
    for (const auto& e : v.comparison.unmatched_in_b)
        os << "  oracle-only constraint: " << e << "\n";
    os << "gates: drift " << (v.drift_ok ? "ok" : "BREACH") << ", probe "
       << (v.probe_ok ? "ok" : "BREACH") << ", oracle " << (v.oracle_ok ? "ok" : "BREACH")
       << "\n";
    os.unsetf(std::ios::scientific);
}

} // namespace hjq
