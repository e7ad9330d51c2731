#pragma once

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hjq/ast.hpp"
#include "hjq/expr.hpp"

namespace hjq {

// ---------------------------------------------------------------------------
// Model-level expression trees: indexed symbols, dot() velocity marks,
// sum(idx, ...) reductions and structure-constant applications, before
// index expansion.

struct MNode;
using MNodePtr = std::shared_ptr<const MNode>;
using IndexArg = std::variant<std::string, int>;  // index variable or literal

struct MNode {
    enum class Kind { Num, SymRef, Dot, Sum, Table, Add, Mul, Div, Neg, Pow };
    Kind kind;
    Rational num;                // Num
    std::string name;            // SymRef/Table base name, Sum index variable
    std::vector<IndexArg> args;  // SymRef / Table index arguments
    std::vector<MNodePtr> kids;
    int exponent = 0;            // Pow

    friend bool operator==(const MNode& a, const MNode& b) {
        if (a.kind != b.kind || a.num != b.num || a.name != b.name ||
            a.args != b.args || a.exponent != b.exponent ||
            a.kids.size() != b.kids.size())
            return false;
        for (size_t i = 0; i < a.kids.size(); ++i)
            if (!(*a.kids[i] == *b.kids[i])) return false;
        return true;
    }
};

namespace mexpr {
inline MNodePtr make(MNode n) { return std::make_shared<MNode>(std::move(n)); }
inline MNodePtr num(Rational r) {
    MNode n{MNode::Kind::Num};
    n.num = std::move(r);
    return make(std::move(n));
}
inline MNodePtr num(long long v) { return num(Rational(v)); }
inline MNodePtr symref(std::string name, std::vector<IndexArg> args = {}) {
    MNode n{MNode::Kind::SymRef};
    n.name = std::move(name);
    n.args = std::move(args);
    return make(std::move(n));
}
inline MNodePtr dot(MNodePtr inner) {
    MNode n{MNode::Kind::Dot};
    n.kids = {std::move(inner)};
    return make(std::move(n));
}
inline MNodePtr sum(std::string idx, MNodePtr body) {
    MNode n{MNode::Kind::Sum};
    n.name = std::move(idx);
    n.kids = {std::move(body)};
    return make(std::move(n));
}
inline MNodePtr table(std::string name, std::vector<IndexArg> args) {
    MNode n{MNode::Kind::Table};
    n.name = std::move(name);
    n.args = std::move(args);
    return make(std::move(n));
}
inline MNodePtr add(std::vector<MNodePtr> kids) {
    MNode n{MNode::Kind::Add};
    n.kids = std::move(kids);
    return make(std::move(n));
}
inline MNodePtr mul(std::vector<MNodePtr> kids) {
    MNode n{MNode::Kind::Mul};
    n.kids = std::move(kids);
    return make(std::move(n));
}
inline MNodePtr div(MNodePtr a, MNodePtr b) {
    MNode n{MNode::Kind::Div};
    n.kids = {std::move(a), std::move(b)};
    return make(std::move(n));
}
inline MNodePtr neg(MNodePtr a) {
    MNode n{MNode::Kind::Neg};
    n.kids = {std::move(a)};
    return make(std::move(n));
}
inline MNodePtr pow(MNodePtr base, int e) {
    MNode n{MNode::Kind::Pow};
    n.kids = {std::move(base)};
    n.exponent = e;
    return make(std::move(n));
}
inline MNodePtr sub(MNodePtr a, MNodePtr b) { return add({std::move(a), neg(std::move(b))}); }
} // namespace mexpr

// ---------------------------------------------------------------------------

struct IndexDomain {
    int lo = 1;
    int hi = 1;
    friend bool operator==(const IndexDomain&, const IndexDomain&) = default;
};

/// Rank-3 totally antisymmetric rational tensor over a cubic index range.
/// Built from explicitly given entries; every permutation of a given key is
/// filled in by antisymmetry, and conflicts are rejected.
class StructureTable {
public:
    enum class Source { Eps3, Literal };

    static StructureTable eps3() {
        StructureTable t;
        t.source_ = Source::Eps3;
        t.lo_ = 1;
        t.hi_ = 3;
        t.insert_antisymmetric({1, 2, 3}, Rational(1));
        return t;
    }

    static StructureTable literal(std::vector<std::pair<std::array<int, 3>, Rational>> entries) {
        StructureTable t;
        t.source_ = Source::Literal;
        t.lo_ = 1;
        t.hi_ = 1;
        for (const auto& [key, val] : entries)
            for (int k : key) t.hi_ = std::max(t.hi_, k);
        for (const auto& [key, val] : entries) t.insert_antisymmetric(key, val);
        return t;
    }

    Source source() const { return source_; }
    int lo() const { return lo_; }
    int hi() const { return hi_; }
    const std::map<std::array<int, 3>, Rational>& entries() const { return entries_; }

    Rational at(int a, int b, int c) const {
        if (a < lo_ || a > hi_ || b < lo_ || b > hi_ || c < lo_ || c > hi_)
            throw ModelError("structure-constant index out of declared range");
        auto it = entries_.find({a, b, c});
        return it == entries_.end() ? Rational(0) : it->second;
    }

    /// Total antisymmetry holds by construction; this checks the Jacobi
    /// identity sum_e (f[abe]f[ecd] + f[cbe]f[aed] + f[dbe]f[ace]) = 0.
    void validate_jacobi() const {
        for (int a = lo_; a <= hi_; ++a)
            for (int b = lo_; b <= hi_; ++b)
                for (int c = lo_; c <= hi_; ++c)
                    for (int d = lo_; d <= hi_; ++d) {
                        Rational s(0);
                        for (int e = lo_; e <= hi_; ++e)
                            s += at(a, b, e) * at(e, c, d) + at(c, b, e) * at(a, e, d) +
                                 at(d, b, e) * at(a, c, e);
                        if (!is_zero(s))
                            throw ModelError("structure-constant table violates the Jacobi identity");
                    }
    }

    friend bool operator==(const StructureTable& x, const StructureTable& y) {
        return x.source_ == y.source_ && x.lo_ == y.lo_ && x.hi_ == y.hi_ &&
               x.entries_ == y.entries_;
    }

private:
    void insert_antisymmetric(std::array<int, 3> key, const Rational& val) {
        if (key[0] == key[1] || key[1] == key[2] || key[0] == key[2]) {
            if (!is_zero(val))
                throw ModelError("structure-constant table is not antisymmetric: "
                                 "nonzero entry with a repeated index");
            return;
        }
        if (is_zero(val)) return;
        const std::array<std::array<int, 3>, 6> perms = {{{0, 1, 2},
                                                          {1, 2, 0},
                                                          {2, 0, 1},
                                                          {1, 0, 2},
                                                          {0, 2, 1},
                                                          {2, 1, 0}}};
        for (size_t p = 0; p < perms.size(); ++p) {
            std::array<int, 3> k = {key[perms[p][0]], key[perms[p][1]], key[perms[p][2]]};
            Rational v = p < 3 ? val : Rational(-val);
            auto [it, inserted] = entries_.insert({k, v});
            if (!inserted && it->second != v)
                throw ModelError("structure-constant table is not antisymmetric: "
                                 "conflicting entries for a permuted index triple");
        }
    }

    Source source_ = Source::Literal;
    int lo_ = 1, hi_ = 1;
    std::map<std::array<int, 3>, Rational> entries_;
};

struct CoordinateDecl {
    std::string name;
    std::vector<std::string> index_vars;
    friend bool operator==(const CoordinateDecl&, const CoordinateDecl&) = default;
};

struct CouplingDecl {
    std::string name;
    std::optional<Rational> value;
    friend bool operator==(const CouplingDecl&, const CouplingDecl&) = default;
};

/// Parsed (or programmatically built) model description, still index-valued.
struct ModelSpec {
    std::string name;
    std::vector<std::pair<std::string, IndexDomain>> indices;
    std::vector<CouplingDecl> couplings;
    std::vector<std::pair<std::string, StructureTable>> tables;
    std::vector<CoordinateDecl> coordinates;
    MNodePtr lagrangian;

    const IndexDomain* find_index(const std::string& n) const {
        for (const auto& [k, v] : indices)
            if (k == n) return &v;
        return nullptr;
    }
    const StructureTable* find_table(const std::string& n) const {
        for (const auto& [k, v] : tables)
            if (k == n) return &v;
        return nullptr;
    }
    const CoordinateDecl* find_coordinate(const std::string& n) const {
        for (const auto& c : coordinates)
            if (c.name == n) return &c;
        return nullptr;
    }
    const CouplingDecl* find_coupling(const std::string& n) const {
        for (const auto& c : couplings)
            if (c.name == n) return &c;
        return nullptr;
    }

    friend bool operator==(const ModelSpec& a, const ModelSpec& b) {
        return a.name == b.name && a.indices == b.indices && a.couplings == b.couplings &&
               a.tables == b.tables && a.coordinates == b.coordinates &&
               ((!a.lagrangian && !b.lagrangian) ||
                (a.lagrangian && b.lagrangian && *a.lagrangian == *b.lagrangian));
    }
};

// ---------------------------------------------------------------------------

/// Fully index-expanded mechanical system: scalar coordinates with paired
/// velocity and momentum symbols, couplings, and a polynomial Lagrangian.
struct FlatModel {
    std::string name;
    std::vector<Symbol> coordinates;  // sorted by the symbol order
    std::map<Symbol, Symbol> velocity_of;
    std::map<Symbol, Symbol> momentum_of;
    std::vector<std::pair<Symbol, std::optional<Rational>>> couplings;
    Expr lagrangian;

    const Symbol& velocity(const Symbol& q) const {
        auto it = velocity_of.find(q);
        if (it == velocity_of.end()) throw ModelError("no velocity for " + q.str());
        return it->second;
    }
    const Symbol& momentum(const Symbol& q) const {
        auto it = momentum_of.find(q);
        if (it == momentum_of.end()) throw ModelError("no momentum for " + q.str());
        return it->second;
    }
    std::vector<Symbol> velocities() const {
        std::vector<Symbol> v;
        for (const auto& q : coordinates) v.push_back(velocity(q));
        return v;
    }
    std::vector<Symbol> momenta() const {
        std::vector<Symbol> v;
        for (const auto& q : coordinates) v.push_back(momentum(q));
        return v;
    }
    std::map<Symbol, Rational> coupling_values() const {
        std::map<Symbol, Rational> out;
        for (const auto& [s, v] : couplings)
            if (v) out[s] = *v;
        return out;
    }
};

inline std::string momentum_name(const std::string& coord) {
    if (!coord.empty() && coord[0] == 'q') return "p" + coord.substr(1);
    if (!coord.empty() && coord[0] == 'A') return "pi" + coord.substr(1);
    return "p_" + coord;
}

inline std::string velocity_name(const std::string& coord) { return "dot_" + coord; }

namespace detail {

struct ExpansionContext {
    const ModelSpec& spec;
    std::map<std::string, int> env;  // bound index variables

    int resolve_arg(const IndexArg& a) const {
        if (std::holds_alternative<int>(a)) return std::get<int>(a);
        const std::string& v = std::get<std::string>(a);
        auto it = env.find(v);
        if (it == env.end())
            throw ModelError("index variable '" + v + "' used outside any sum binding it");
        return it->second;
    }
};

inline Symbol resolve_coordinate(const ExpansionContext& cx, const MNode& ref) {
    const CoordinateDecl* decl = cx.spec.find_coordinate(ref.name);
    if (!decl) throw ModelError("unknown symbol '" + ref.name + "' in lagrangian");
    if (decl->index_vars.size() != ref.args.size())
        throw ModelError("coordinate '" + ref.name + "' used with " +
                         std::to_string(ref.args.size()) + " indices, declared with " +
                         std::to_string(decl->index_vars.size()));
    std::vector<int> idx;
    for (size_t k = 0; k < ref.args.size(); ++k) {
        int v = cx.resolve_arg(ref.args[k]);
        const IndexDomain* dom = cx.spec.find_index(decl->index_vars[k]);
        if (!dom) throw ModelError("coordinate '" + ref.name + "' uses undeclared index '" +
                                   decl->index_vars[k] + "'");
        if (v < dom->lo || v > dom->hi)
            throw ModelError("index value " + std::to_string(v) + " out of declared range " +
                             std::to_string(dom->lo) + ".." + std::to_string(dom->hi) +
                             " for coordinate '" + ref.name + "'");
        idx.push_back(v);
    }
    return Symbol::coordinate(ref.name, std::move(idx));
}

inline ast::NodePtr expand_node(ExpansionContext& cx, const MNodePtr& n) {
    using K = MNode::Kind;
    switch (n->kind) {
        case K::Num:
            return ast::num(n->num);
        case K::SymRef: {
            if (n->args.empty() && cx.spec.find_coupling(n->name))
                return ast::sym(Symbol::coupling(n->name));
            return ast::sym(resolve_coordinate(cx, *n));
        }
        case K::Dot: {
            const MNode& inner = *n->kids[0];
            if (inner.kind != K::SymRef)
                throw ModelError("dot(...) must wrap a coordinate reference");
            Symbol q = resolve_coordinate(cx, inner);
            return ast::sym(Symbol::coordinate(velocity_name(q.name()), q.indices()));
        }
        case K::Sum: {
            const IndexDomain* dom = cx.spec.find_index(n->name);
            if (!dom) throw ModelError("sum over undeclared index '" + n->name + "'");
            if (cx.env.count(n->name))
                throw ModelError("index '" + n->name + "' rebound by nested sum");
            std::vector<ast::NodePtr> terms;
            for (int v = dom->lo; v <= dom->hi; ++v) {
                cx.env[n->name] = v;
                terms.push_back(expand_node(cx, n->kids[0]));
            }
            cx.env.erase(n->name);
            return ast::add(std::move(terms));
        }
        case K::Table: {
            const StructureTable* t = cx.spec.find_table(n->name);
            if (!t) throw ModelError("unknown table '" + n->name + "'");
            if (n->args.size() != 3)
                throw ModelError("table '" + n->name + "' takes exactly 3 indices");
            int a = cx.resolve_arg(n->args[0]);
            int b = cx.resolve_arg(n->args[1]);
            int c = cx.resolve_arg(n->args[2]);
            return ast::num(t->at(a, b, c));
        }
        case K::Add: {
            std::vector<ast::NodePtr> kids;
            for (const auto& k : n->kids) kids.push_back(expand_node(cx, k));
            return ast::add(std::move(kids));
        }
        case K::Mul: {
            std::vector<ast::NodePtr> kids;
            for (const auto& k : n->kids) kids.push_back(expand_node(cx, k));
            return ast::mul(std::move(kids));
        }
        case K::Div:
            return ast::div(expand_node(cx, n->kids[0]), expand_node(cx, n->kids[1]));
        case K::Neg:
            return ast::neg(expand_node(cx, n->kids[0]));
        case K::Pow:
            return ast::pow(expand_node(cx, n->kids[0]), n->exponent);
    }
    throw Error("corrupt model expression tree");
}

} // namespace detail

/// Structural validation shared by the parser and the builtin generators.
inline void validate_model_spec(const ModelSpec& spec) {
    if (spec.coordinates.empty()) throw ModelError("model declares no coordinates");
    if (!spec.lagrangian) throw ModelError("model declares no lagrangian");
    for (const auto& c : spec.coordinates)
        for (const auto& iv : c.index_vars)
            if (!spec.find_index(iv))
                throw ModelError("coordinate '" + c.name + "' uses undeclared index '" + iv + "'");
    for (const auto& [n, dom] : spec.indices)
        if (dom.lo > dom.hi) throw ModelError("index '" + n + "' has an empty range");
    for (const auto& [n, t] : spec.tables) t.validate_jacobi();
}

/// Expand every indexed coordinate, sum and table application to scalars and
/// normalize the Lagrangian. Coordinates come out in the fixed symbol order.
inline FlatModel expand_indices(const ModelSpec& spec) {
    validate_model_spec(spec);
    FlatModel out;
    out.name = spec.name;

    for (const auto& decl : spec.coordinates) {
        std::vector<std::vector<int>> combos{{}};
        for (const auto& iv : decl.index_vars) {
            const IndexDomain* dom = spec.find_index(iv);
            std::vector<std::vector<int>> next;
            for (const auto& c : combos)
                for (int v = dom->lo; v <= dom->hi; ++v) {
                    auto e = c;
                    e.push_back(v);
                    next.push_back(std::move(e));
                }
            combos = std::move(next);
        }
        for (auto& idx : combos)
            out.coordinates.push_back(Symbol::coordinate(decl.name, std::move(idx)));
    }
    std::sort(out.coordinates.begin(), out.coordinates.end());
    for (size_t i = 1; i < out.coordinates.size(); ++i)
        if (out.coordinates[i] == out.coordinates[i - 1])
            throw ModelError("duplicate coordinate " + out.coordinates[i].str());

    std::set<std::string> names;
    for (const auto& q : out.coordinates) names.insert(q.name());
    for (const auto& q : out.coordinates) {
        Symbol v = Symbol::coordinate(velocity_name(q.name()), q.indices());
        Symbol p = Symbol::momentum(momentum_name(q.name()), q.indices());
        if (names.count(v.name()) || names.count(p.name()))
            throw ModelError("coordinate name '" + q.name() +
                             "' collides with a derived velocity/momentum name");
        out.velocity_of[q] = v;
        out.momentum_of[q] = p;
    }

    for (const auto& c : spec.couplings)
        out.couplings.push_back({Symbol::coupling(c.name), c.value});

    detail::ExpansionContext cx{spec, {}};
    out.lagrangian = ast::normalize(detail::expand_node(cx, spec.lagrangian));
    return out;
}

// ---------------------------------------------------------------------------
// Builtin model generators.

inline ModelSpec builtin_model(const std::string& name,
                               const std::map<std::string, Rational>& params = {}) {
    using namespace mexpr;
    ModelSpec spec;
    spec.name = name;
    if (name == "free-particle") {
        spec.coordinates = {{"q", {}}};
        spec.lagrangian = mul({num(Rational(1, 2)), pow(dot(symref("q")), 2)});
    } else if (name == "toy-singular") {
        spec.coordinates = {{"q1", {}}, {"q2", {}}};
        spec.lagrangian =
            mul({num(Rational(1, 2)), pow(sub(dot(symref("q1")), symref("q2")), 2)});
    } else if (name == "yang-mills-su2-homogeneous") {
        spec.indices = {{"a", {1, 3}}, {"b", {1, 3}}, {"c", {1, 3}},
                        {"i", {1, 3}}, {"j", {1, 3}}};
        spec.couplings = {{"g", Rational(1)}};
        spec.tables = {{"f", StructureTable::eps3()}};
        spec.coordinates = {{"A0", {"a"}}, {"A", {"i", "a"}}};
        // F0[i,a] = dot(A[i,a]) + g f(a,b,c) A0[b] A[i,c]
        MNodePtr f0 = add({dot(symref("A", {"i", "a"})),
                           mul({symref("g"),
                                sum("b", sum("c", mul({table("f", {"a", "b", "c"}),
                                                       symref("A0", {"b"}),
                                                       symref("A", {"i", "c"})})))})});
        // Fij[i,j,a] = g f(a,b,c) A[i,b] A[j,c]
        MNodePtr fij = mul({symref("g"),
                            sum("b", sum("c", mul({table("f", {"a", "b", "c"}),
                                                   symref("A", {"i", "b"}),
                                                   symref("A", {"j", "c"})})))});
        spec.lagrangian =
            sub(mul({num(Rational(1, 2)), sum("i", sum("a", pow(f0, 2)))}),
                mul({num(Rational(1, 4)), sum("i", sum("j", sum("a", pow(fij, 2))))}));
    } else if (name == "proca-homogeneous") {
        spec.indices = {{"i", {1, 3}}};
        spec.couplings = {{"m", Rational(1)}};
        spec.coordinates = {{"A0", {}}, {"A", {"i"}}};
        spec.lagrangian =
            add({mul({num(Rational(1, 2)), sum("i", pow(dot(symref("A", {"i"})), 2))}),
                 mul({num(Rational(1, 2)), pow(symref("m"), 2), pow(symref("A0"), 2)}),
                 neg(mul({num(Rational(1, 2)), pow(symref("m"), 2),
                          sum("i", pow(symref("A", {"i"}), 2))}))});
    } else {
        throw ModelError("unknown builtin model '" + name + "'");
    }

    for (const auto& [key, val] : params) {
        bool known = false;
        for (auto& c : spec.couplings)
            if (c.name == key) {
                c.value = val;
                known = true;
            }
        if (!known) throw ModelError("unknown coupling '" + key + "' for builtin " + name);
    }
    for (const auto& c : spec.couplings)
        if (!c.value)
            throw ModelError("missing required coupling '" + c.name + "' for builtin " + name);
    return spec;
}

inline std::vector<std::string> builtin_model_names() {
    return {"free-particle", "toy-singular", "yang-mills-su2-homogeneous", "proca-homogeneous"};
}

} // namespace hjq
