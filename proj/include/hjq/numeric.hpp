#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hjq/action.hpp"
#include "hjq/linsolve.hpp"

namespace hjq {

/// Slot-indexed evaluation form of a polynomial, compiled once per
/// expression so trajectory loops avoid symbol lookups.
struct CompiledExpr {
    struct Term {
        double coeff;
        std::vector<std::pair<int, int>> powers;  // (slot, exponent)
    };
    std::vector<Term> terms;

    static CompiledExpr compile(const Expr& e, const std::map<Symbol, int>& slot_of) {
        CompiledExpr c;
        for (const auto& m : e.terms()) {
            Term t{to_double(m.coeff), {}};
            for (const auto& [s, exp] : m.factors) {
                auto it = slot_of.find(s);
                if (it == slot_of.end())
                    throw Error("compile: no slot for symbol " + s.str());
                t.powers.push_back({it->second, exp});
            }
            c.terms.push_back(std::move(t));
        }
        return c;
    }

    double eval(std::span<const double> slots) const {
        double acc = 0.0;
        for (const auto& t : terms) {
            double v = t.coeff;
            for (const auto& [slot, exp] : t.powers) {
                double x = slots[slot];
                for (int k = 0; k < exp; ++k) v *= x;
            }
            acc += v;
        }
        return acc;
    }
};

/// Numeric snapshot: a value for every canonical coordinate and momentum of
/// the model (promoted ones included), plus coupling values.
struct NumericState {
    std::map<Symbol, double> values;
};

struct Trajectory {
    std::vector<Symbol> layout;               // slot -> symbol
    std::vector<double> times;
    std::vector<std::vector<double>> states;  // per sample, layout order
    double dt = 0.0;
    std::vector<std::pair<Symbol, Expr>> parameter_paths;
    bool aborted = false;
    std::string abort_reason;

    size_t size() const { return times.size(); }
};

/// Classic fixed-step RK4 on dx/dt = sum_alpha coeff_alpha(x) dt_alpha/dt,
/// where the parameter derivatives come from differentiating the supplied
/// paths (Expr in t). Symbols present in `paths` follow their path; symbols
/// present in init.values and owning a flow row are integrated.
inline Trajectory integrate_flow(const TotalDifferentialSystem& flow, const NumericState& init,
                                 const std::map<Symbol, Expr>& paths, double dt, double t_end) {
    if (dt <= 0 || t_end <= 0) throw Error("integrate_flow requires dt > 0 and t_end > 0");

    std::vector<Symbol> integrated;
    for (const auto& [x, coeffs] : flow.rows) {
        if (paths.count(x)) continue;
        if (init.values.count(x)) integrated.push_back(x);
    }

    Trajectory traj;
    traj.dt = dt;
    const Symbol time = Symbol::time();
    std::map<Symbol, int> slot_of;
    const auto add_slot = [&](const Symbol& s) {
        if (!slot_of.count(s)) {
            slot_of[s] = static_cast<int>(traj.layout.size());
            traj.layout.push_back(s);
        }
    };
    for (const auto& x : integrated) add_slot(x);  // integrated occupy slots 0..n-1
    add_slot(time);
    const int t_slot = slot_of[time];
    for (const auto& [s, v] : init.values) add_slot(s);
    for (const auto& [p, path] : paths) {
        add_slot(p);
        traj.parameter_paths.push_back({p, path});
    }

    // compiled path values and derivatives as functions of t
    std::vector<std::pair<int, CompiledExpr>> path_value;
    std::map<Symbol, CompiledExpr> path_deriv;
    for (const auto& [p, path] : paths) {
        path_value.push_back({slot_of[p], CompiledExpr::compile(path, slot_of)});
        path_deriv[p] = CompiledExpr::compile(path.diff(time), slot_of);
    }

    // compiled right-hand sides: per integrated symbol, (direction, coeff)
    std::vector<CompiledExpr> coeff_pool;
    std::vector<std::vector<std::pair<size_t, std::optional<Symbol>>>> rhs(integrated.size());
    for (size_t i = 0; i < integrated.size(); ++i) {
        const auto* row = flow.row(integrated[i]);
        for (const auto& [dir, coeff] : *row) {
            if (coeff.is_zero()) continue;
            if (dir == time) {
                coeff_pool.push_back(CompiledExpr::compile(coeff, slot_of));
                rhs[i].push_back({coeff_pool.size() - 1, std::nullopt});
            } else if (paths.count(dir)) {
                coeff_pool.push_back(CompiledExpr::compile(coeff, slot_of));
                rhs[i].push_back({coeff_pool.size() - 1, dir});
            } else {
                throw Error("no path supplied for parameter " + dir.str());
            }
        }
    }

    std::vector<double> slots(traj.layout.size(), 0.0);
    for (const auto& [s, v] : init.values) slots[slot_of[s]] = v;

    const auto refresh_parameters = [&](double t) {
        slots[t_slot] = t;
        for (const auto& [slot, ce] : path_value) slots[slot] = ce.eval(slots);
    };
    const auto eval_rhs = [&](double t, const std::vector<double>& y, std::vector<double>& dydt) {
        for (size_t i = 0; i < integrated.size(); ++i) slots[i] = y[i];
        refresh_parameters(t);
        for (size_t i = 0; i < integrated.size(); ++i) {
            double acc = 0.0;
            for (const auto& [ci, dir] : rhs[i]) {
                double factor = 1.0;
                if (dir) factor = path_deriv.at(*dir).eval(slots);
                if (factor != 0.0) acc += coeff_pool[ci].eval(slots) * factor;
            }
            dydt[i] = acc;
        }
    };

    const auto snapshot = [&](double t, const std::vector<double>& y) {
        for (size_t i = 0; i < integrated.size(); ++i) slots[i] = y[i];
        refresh_parameters(t);
        traj.times.push_back(t);
        traj.states.push_back(slots);
    };

    const size_t steps = static_cast<size_t>(std::llround(t_end / dt));
    std::vector<double> y(integrated.size());
    for (size_t i = 0; i < integrated.size(); ++i) y[i] = slots[i];
    std::vector<double> k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size()), tmp(y.size());

    snapshot(0.0, y);
    for (size_t step = 0; step < steps; ++step) {
        const double t = step * dt;
        eval_rhs(t, y, k1);
        for (size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
        eval_rhs(t + 0.5 * dt, tmp, k2);
        for (size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
        eval_rhs(t + 0.5 * dt, tmp, k3);
        for (size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + dt * k3[i];
        eval_rhs(t + dt, tmp, k4);
        bool finite = true;
        for (size_t i = 0; i < y.size(); ++i) {
            y[i] += dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
            finite = finite && std::isfinite(y[i]);
        }
        if (!finite) {
            traj.aborted = true;
            traj.abort_reason = "non-finite state at t = " + std::to_string(t + dt);
            return traj;
        }
        snapshot((step + 1) * dt, y);
    }
    return traj;
}

// ---------------------------------------------------------------------------

struct DriftReport {
    std::vector<std::pair<std::string, double>> constraint_max;
    double max_constraint_drift = 0.0;
    double energy_initial = 0.0;
    double energy_drift_rel = 0.0;
    double dt = 0.0;
    std::optional<double> halving_ratio;      // drift(dt) / drift(dt/2)
    std::optional<double> convergence_order;  // log2 of the ratio
};

/// Evaluate every chain constraint and the energy along a trajectory.
inline DriftReport constraint_drift(const Trajectory& traj, const ConstraintChain& chain,
                                    const Expr& h0) {
    if (traj.size() == 0) throw Error("constraint_drift requires a non-empty trajectory");
    std::map<Symbol, int> slot_of;
    for (size_t i = 0; i < traj.layout.size(); ++i)
        slot_of[traj.layout[i]] = static_cast<int>(i);

    DriftReport rep;
    rep.dt = traj.dt;
    std::vector<CompiledExpr> compiled;
    for (const auto& c : chain.constraints)
        compiled.push_back(CompiledExpr::compile(c.expression, slot_of));
    CompiledExpr h = CompiledExpr::compile(h0, slot_of);

    std::vector<double> maxima(compiled.size(), 0.0);
    double h_initial = h.eval(traj.states[0]);
    double h_drift = 0.0;
    for (const auto& state : traj.states) {
        for (size_t c = 0; c < compiled.size(); ++c)
            maxima[c] = std::max(maxima[c], std::abs(compiled[c].eval(state)));
        h_drift = std::max(h_drift, std::abs(h.eval(state) - h_initial));
    }
    for (size_t c = 0; c < compiled.size(); ++c) {
        rep.constraint_max.push_back({chain.constraints[c].expression.str(), maxima[c]});
        rep.max_constraint_drift = std::max(rep.max_constraint_drift, maxima[c]);
    }
    rep.energy_initial = h_initial;
    rep.energy_drift_rel = h_drift / std::max(1.0, std::abs(h_initial));
    return rep;
}

/// Drift analysis with the step-halving convergence estimate. The estimate
/// halves from the doubled step down to the run's own step, so both runs
/// stay above the roundoff floor that a further halving of a ~1e-13 drift
/// would sink into.
inline DriftReport drift_with_halving(const TotalDifferentialSystem& flow,
                                      const ConstraintChain& chain, const Expr& h0,
                                      const NumericState& init,
                                      const std::map<Symbol, Expr>& paths, double dt,
                                      double t_end) {
    Trajectory fine = integrate_flow(flow, init, paths, dt, t_end);
    if (fine.aborted) throw Error("trajectory aborted: " + fine.abort_reason);
    DriftReport rep = constraint_drift(fine, chain, h0);
    Trajectory coarse = integrate_flow(flow, init, paths, 2 * dt, t_end);
    if (coarse.aborted) throw Error("coarse-step trajectory aborted: " + coarse.abort_reason);
    DriftReport rep_coarse = constraint_drift(coarse, chain, h0);
    double a = std::max(rep_coarse.max_constraint_drift, rep_coarse.energy_drift_rel);
    double b = std::max(rep.max_constraint_drift, rep.energy_drift_rel);
    if (b > 0 && a > 0) {
        rep.halving_ratio = a / b;
        rep.convergence_order = std::log2(a / b);
    }
    return rep;
}

// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<Symbol> canonical_symbols(const FlatModel& model) {
    std::vector<Symbol> out = model.coordinates;
    for (const auto& q : model.coordinates) out.push_back(model.momentum(q));
    return out;
}

} // namespace detail

/// Uniform random state with coupling values attached; not on any surface.
inline NumericState random_state(const FlatModel& model, std::uint64_t seed,
                                 double amplitude = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-amplitude, amplitude);
    NumericState st;
    for (const auto& s : detail::canonical_symbols(model)) st.values[s] = u(rng);
    for (const auto& [c, v] : model.couplings) {
        if (!v) throw Error("coupling " + c.str() + " has no numeric value");
        st.values[c] = to_double(*v);
    }
    return st;
}

/// Project a random state onto the constraint surface by solving the
/// constraints, which are affine in the momenta, at the drawn coordinates.
/// Constraints without momentum content get a second pass over the
/// coordinates; anything still unresolved flags the state as degraded.
inline NumericState random_on_surface_state(const FlatModel& model,
                                            const ConstraintChain& chain, std::uint64_t seed,
                                            bool* degraded = nullptr,
                                            double amplitude = 1.0) {
    NumericState st = random_state(model, seed, amplitude);
    if (degraded) *degraded = false;

    const auto solve_pass = [&](const std::vector<Symbol>& unknowns) {
        // rows: one linear equation per constraint over `unknowns`
        std::vector<std::pair<std::vector<std::pair<size_t, double>>, double>> eqs;
        std::vector<Symbol> slots = unknowns;
        std::map<Symbol, size_t> index;
        for (size_t i = 0; i < slots.size(); ++i) index[slots[i]] = i;
        for (const auto& c : chain.constraints) {
            std::vector<std::pair<size_t, double>> row;
            double rest_val = 0.0;
            try {
                auto [coeffs, rest] = collect_linear(c.expression, unknowns);
                for (const auto& [u, ce] : coeffs) {
                    double v = ce.eval(st.values);
                    if (std::abs(v) > 1e-12) row.push_back({index[u], v});
                }
                rest_val = rest.eval(st.values);
            } catch (const UnsupportedExpressionError&) {
                if (degraded) *degraded = true;  // not affine in these unknowns
                continue;
            }
            eqs.push_back({std::move(row), rest_val});
        }
        // Gaussian elimination with partial pivoting over the dense form
        const size_t n = slots.size();
        std::vector<std::vector<double>> a(eqs.size(), std::vector<double>(n + 1, 0.0));
        for (size_t r = 0; r < eqs.size(); ++r) {
            for (const auto& [col, v] : eqs[r].first) a[r][col] = v;
            a[r][n] = eqs[r].second;
        }
        std::vector<int> pivot_col(eqs.size(), -1);
        size_t rank_row = 0;
        for (size_t col = 0; col < n && rank_row < a.size(); ++col) {
            size_t best = rank_row;
            for (size_t r = rank_row; r < a.size(); ++r)
                if (std::abs(a[r][col]) > std::abs(a[best][col])) best = r;
            if (std::abs(a[best][col]) < 1e-9) continue;
            std::swap(a[rank_row], a[best]);
            for (size_t r = 0; r < a.size(); ++r) {
                if (r == rank_row || a[r][col] == 0.0) continue;
                double f = a[r][col] / a[rank_row][col];
                for (size_t k = col; k <= n; ++k) a[r][k] -= f * a[rank_row][k];
            }
            pivot_col[rank_row] = static_cast<int>(col);
            ++rank_row;
        }
        for (size_t r = 0; r < rank_row; ++r) {
            int col = pivot_col[r];
            double value = -a[r][n];
            for (size_t k = 0; k < n; ++k)
                if (static_cast<int>(k) != col && a[r][k] != 0.0)
                    value -= a[r][k] * st.values[slots[k]];
            st.values[slots[col]] = value / a[r][col];
        }
    };

    if (!chain.constraints.empty()) {
        std::vector<Symbol> momenta;
        for (const auto& q : model.coordinates) momenta.push_back(model.momentum(q));
        solve_pass(momenta);
        bool leftover = false;
        for (const auto& c : chain.constraints)
            if (std::abs(c.expression.eval(st.values)) > 1e-9) leftover = true;
        if (leftover) {
            solve_pass(model.coordinates);
            for (const auto& c : chain.constraints)
                if (std::abs(c.expression.eval(st.values)) > 1e-9 && degraded) *degraded = true;
        }
    }
    return st;
}

/// Yang-Mills-specific on-surface construction: the momentum color vector
/// of each spatial direction is chosen parallel to the coordinate color
/// vector, pi[i,c] = lambda_i A[i,c], so every Gauss generator vanishes
/// identically at t = 0. The promoted pair starts at zero.
inline NumericState ym_on_surface_state(const FlatModel& model, std::uint64_t seed,
                                        double amplitude = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-amplitude, amplitude);
    NumericState st;
    double lambda[4] = {0, 0, 0, 0};
    for (int i = 1; i <= 3; ++i) lambda[i] = u(rng);
    for (int i = 1; i <= 3; ++i)
        for (int a = 1; a <= 3; ++a) {
            double v = u(rng);
            st.values[Symbol::coordinate("A", {i, a})] = v;
            st.values[Symbol::momentum("pi", {i, a})] = lambda[i] * v;
        }
    for (int a = 1; a <= 3; ++a) {
        st.values[Symbol::coordinate("A0", {a})] = 0.0;
        st.values[Symbol::momentum("pi0", {a})] = 0.0;
    }
    for (const auto& [c, v] : model.couplings) {
        if (!v) throw Error("coupling " + c.str() + " has no numeric value");
        st.values[c] = to_double(*v);
    }
    return st;
}

// ---------------------------------------------------------------------------

struct ProbeReport {
    int samples = 0;
    std::uint64_t seed = 0;
    double max_residual = 0.0;
    bool degraded = false;
    std::vector<Symbol> skipped_directions;  // frozen by obstruction events
    std::vector<std::pair<std::string, double>> per_bracket_max;
};

/// Evaluate every consistency bracket {X, H'_alpha} at random on-surface
/// points. A closed chain must give residuals at float-roundoff level;
/// directions frozen by obstruction events are excluded and reported.
inline ProbeReport integrability_probe(const HamiltonianSet& hs, const ConstraintChain& chain,
                                       int samples, std::uint64_t seed,
                                       const FlatModel& model) {
    if (samples < 1) throw Error("integrability_probe requires samples >= 1");
    ProbeReport rep;
    rep.samples = samples;
    rep.seed = seed;

    std::set<Symbol> frozen;
    for (const auto& o : chain.obstructions)
        if (!o.time_direction) frozen.insert(o.direction);
    rep.skipped_directions.assign(frozen.begin(), frozen.end());

    std::vector<std::pair<std::string, Expr>> tested;
    tested.push_back({"H'[t]", hs.generators[0].second});
    for (const auto& c : chain.constraints)
        tested.push_back({"constraint " + c.expression.str(), c.expression});

    std::vector<std::pair<std::string, Expr>> brackets;
    for (const auto& [label, x] : tested)
        for (const auto& [param, gen] : hs.generators) {
            if (frozen.count(param)) continue;
            Expr b = poisson_bracket(x, gen, hs.full);
            if (!b.is_zero())
                brackets.push_back({"{" + label + ", H'[" + param.str() + "]}", b});
        }

    std::vector<double> maxima(brackets.size(), 0.0);
    for (int k = 0; k < samples; ++k) {
        bool degraded = false;
        NumericState st = random_on_surface_state(model, chain, seed + 1000003UL * k, &degraded);
        rep.degraded = rep.degraded || degraded;
        st.values[hs.time_momentum] = 0.0;
        for (size_t b = 0; b < brackets.size(); ++b)
            maxima[b] = std::max(maxima[b], std::abs(brackets[b].second.eval(st.values)));
    }
    for (size_t b = 0; b < brackets.size(); ++b) {
        rep.per_bracket_max.push_back({brackets[b].first, maxima[b]});
        rep.max_residual = std::max(rep.max_residual, maxima[b]);
    }
    return rep;
}

} // namespace hjq
