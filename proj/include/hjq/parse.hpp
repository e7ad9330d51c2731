#pragma once

#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hjq/model.hpp"

namespace hjq {

namespace lex {

struct Token {
    enum class Kind { Ident, Int, Punct, End };
    Kind kind = Kind::End;
    std::string text;
    long long value = 0;
    int line = 0, col = 0;
};

/// Tokenizer for section payloads and expressions. Punctuation tokens are
/// single characters except the range mark "..".
class Stream {
public:
    Stream(const std::string& text, int line) {
        int col = 1;
        size_t i = 0;
        const auto push = [&](Token t) { toks_.push_back(std::move(t)); };
        while (i < text.size()) {
            char c = text[i];
            if (c == '\n') {
                ++line, col = 1, ++i;
                continue;
            }
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++col, ++i;
                continue;
            }
            int start_col = col;
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::string id;
                while (i < text.size() &&
                       (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_'))
                    id += text[i++], ++col;
                push({Token::Kind::Ident, id, 0, line, start_col});
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                std::string digits;
                while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
                    digits += text[i++], ++col;
                push({Token::Kind::Int, digits, std::stoll(digits), line, start_col});
            } else if (c == '.' && i + 1 < text.size() && text[i + 1] == '.') {
                push({Token::Kind::Punct, "..", 0, line, start_col});
                i += 2, col += 2;
            } else {
                push({Token::Kind::Punct, std::string(1, c), 0, line, start_col});
                ++i, ++col;
            }
        }
        toks_.push_back({Token::Kind::End, "", 0, line, col});
    }

    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool at_end() const { return peek().kind == Token::Kind::End; }

    bool accept_punct(const std::string& p) {
        if (peek().kind == Token::Kind::Punct && peek().text == p) {
            next();
            return true;
        }
        return false;
    }
    void expect_punct(const std::string& p) {
        if (!accept_punct(p)) fail("expected '" + p + "'");
    }
    std::string expect_ident() {
        if (peek().kind != Token::Kind::Ident) fail("expected identifier");
        return next().text;
    }
    long long expect_int() {
        if (peek().kind != Token::Kind::Int) fail("expected integer");
        return next().value;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        const Token& t = peek();
        std::string got = t.kind == Token::Kind::End ? "end of input" : "'" + t.text + "'";
        throw ParseError(msg + ", got " + got, t.line, t.col);
    }

private:
    std::vector<Token> toks_;
    size_t pos_ = 0;
};

} // namespace lex

namespace detail {

inline Rational parse_rational(lex::Stream& s) {
    bool neg = s.accept_punct("-");
    Rational v(s.expect_int());
    if (s.accept_punct("/")) {
        long long den = s.expect_int();
        if (den == 0) s.fail("zero denominator");
        v /= den;
    }
    return neg ? Rational(-v) : v;
}

inline std::vector<IndexArg> parse_index_args(lex::Stream& s, const std::string& close) {
    std::vector<IndexArg> args;
    do {
        if (s.peek().kind == lex::Token::Kind::Int)
            args.push_back(static_cast<int>(s.expect_int()));
        else
            args.push_back(s.expect_ident());
    } while (s.accept_punct(","));
    s.expect_punct(close);
    return args;
}

inline MNodePtr parse_expr(lex::Stream& s);

inline MNodePtr parse_symref(lex::Stream& s) {
    std::string name = s.expect_ident();
    std::vector<IndexArg> args;
    if (s.accept_punct("[")) args = parse_index_args(s, "]");
    return mexpr::symref(std::move(name), std::move(args));
}

inline MNodePtr parse_atom(lex::Stream& s) {
    if (s.accept_punct("(")) {
        MNodePtr e = parse_expr(s);
        s.expect_punct(")");
        return e;
    }
    if (s.peek().kind == lex::Token::Kind::Int)
        return mexpr::num(Rational(s.expect_int()));
    if (s.peek().kind != lex::Token::Kind::Ident) s.fail("expected expression");
    if (s.peek().text == "dot") {
        s.next();
        s.expect_punct("(");
        MNodePtr ref = parse_symref(s);
        s.expect_punct(")");
        return mexpr::dot(std::move(ref));
    }
    if (s.peek().text == "sum") {
        s.next();
        s.expect_punct("(");
        std::string idx = s.expect_ident();
        s.expect_punct(",");
        MNodePtr body = parse_expr(s);
        s.expect_punct(")");
        return mexpr::sum(std::move(idx), std::move(body));
    }
    std::string name = s.expect_ident();
    if (s.accept_punct("["))
        return mexpr::symref(std::move(name), parse_index_args(s, "]"));
    if (s.accept_punct("("))
        return mexpr::table(std::move(name), parse_index_args(s, ")"));
    return mexpr::symref(std::move(name));
}

inline MNodePtr parse_power(lex::Stream& s) {
    MNodePtr base = parse_atom(s);
    if (!s.accept_punct("^")) return base;
    bool neg = s.accept_punct("-");
    int e = static_cast<int>(s.expect_int());
    return mexpr::pow(std::move(base), neg ? -e : e);
}

inline MNodePtr parse_factor(lex::Stream& s) {
    if (s.accept_punct("-")) {
        MNodePtr inner = parse_power(s);
        if (inner->kind == MNode::Kind::Num) return mexpr::num(Rational(-inner->num));
        return mexpr::neg(std::move(inner));
    }
    return parse_power(s);
}

inline MNodePtr parse_term(lex::Stream& s) {
    MNodePtr acc = parse_factor(s);
    bool acc_is_flat_mul = false;
    for (;;) {
        if (s.accept_punct("*")) {
            MNodePtr f = parse_factor(s);
            if (acc_is_flat_mul) {
                auto kids = acc->kids;
                kids.push_back(std::move(f));
                acc = mexpr::mul(std::move(kids));
            } else {
                acc = mexpr::mul({std::move(acc), std::move(f)});
                acc_is_flat_mul = true;
            }
        } else if (s.accept_punct("/")) {
            MNodePtr f = parse_factor(s);
            if (acc->kind == MNode::Kind::Num && f->kind == MNode::Kind::Num) {
                if (is_zero(f->num)) s.fail("division by zero");
                acc = mexpr::num(Rational(acc->num / f->num));
            } else {
                acc = mexpr::div(std::move(acc), std::move(f));
            }
            acc_is_flat_mul = false;
        } else {
            return acc;
        }
    }
}

inline MNodePtr parse_expr(lex::Stream& s) {
    MNodePtr first = parse_term(s);
    std::vector<MNodePtr> kids;
    bool flat = false;
    for (;;) {
        bool plus = false;
        if (s.accept_punct("+"))
            plus = true;
        else if (!s.accept_punct("-"))
            break;
        if (!flat) {
            kids.push_back(std::move(first));
            flat = true;
        }
        MNodePtr t = parse_term(s);
        kids.push_back(plus ? std::move(t) : mexpr::neg(std::move(t)));
    }
    return flat ? mexpr::add(std::move(kids)) : first;
}

/// Static checks on a lagrangian tree: index binding, name resolution,
/// numeric denominators, first-order dots.
inline void check_lagrangian(const ModelSpec& spec, const MNodePtr& n,
                             std::set<std::string>& bound) {
    using K = MNode::Kind;
    const auto check_args = [&](const MNode& node) {
        for (const auto& a : node.args)
            if (std::holds_alternative<std::string>(a) &&
                !bound.count(std::get<std::string>(a)))
                throw ParseError("index variable '" + std::get<std::string>(a) +
                                 "' used outside any sum binding it");
    };
    switch (n->kind) {
        case K::Num:
            return;
        case K::SymRef: {
            if (n->args.empty() && spec.find_coupling(n->name)) return;
            const CoordinateDecl* decl = spec.find_coordinate(n->name);
            if (!decl) throw ParseError("unknown symbol '" + n->name + "' in lagrangian");
            if (decl->index_vars.size() != n->args.size())
                throw ParseError("coordinate '" + n->name + "' used with wrong index count");
            check_args(*n);
            return;
        }
        case K::Dot: {
            const MNode& inner = *n->kids[0];
            if (inner.kind != K::SymRef || !spec.find_coordinate(inner.name))
                throw ParseError("dot(...) must wrap a declared coordinate");
            check_lagrangian(spec, n->kids[0], bound);
            return;
        }
        case K::Sum: {
            if (!spec.find_index(n->name))
                throw ParseError("sum over undeclared index '" + n->name + "'");
            if (bound.count(n->name))
                throw ParseError("index '" + n->name + "' rebound by nested sum");
            bound.insert(n->name);
            check_lagrangian(spec, n->kids[0], bound);
            bound.erase(n->name);
            return;
        }
        case K::Table: {
            if (!spec.find_table(n->name))
                throw ParseError("unknown table '" + n->name + "'");
            if (n->args.size() != 3)
                throw ParseError("table '" + n->name + "' takes exactly 3 indices");
            check_args(*n);
            return;
        }
        case K::Div: {
            // denominator must be numeric: a constant rational expression
            const std::function<void(const MNodePtr&)> numeric_only = [&](const MNodePtr& d) {
                switch (d->kind) {
                    case K::Num:
                        return;
                    case K::Add:
                    case K::Mul:
                    case K::Div:
                    case K::Neg:
                    case K::Pow:
                        for (const auto& k : d->kids) numeric_only(k);
                        return;
                    default:
                        throw UnsupportedExpressionError(
                            "division by a non-constant expression in lagrangian");
                }
            };
            check_lagrangian(spec, n->kids[0], bound);
            numeric_only(n->kids[1]);
            return;
        }
        case K::Add:
        case K::Mul:
        case K::Neg:
        case K::Pow:
            for (const auto& k : n->kids) check_lagrangian(spec, k, bound);
            return;
    }
}

} // namespace detail

// ---------------------------------------------------------------------------
// .hjm model files: line oriented, '#' comments, sections in order
//   model "<name>"
//   indices: a in 1..3, ...        (optional)
//   couplings: g = 1, m, ...       (optional)
//   tables: f = eps3 | f = { (1,2,3) = 1, ... }   (optional)
//   coordinates: q1, A[i,a], ...
//   lagrangian: <expr>             (last section; may span several lines)

inline ModelSpec parse_model(const std::string& text) {
    std::vector<std::pair<int, std::string>> lines;  // (line number, content)
    {
        std::istringstream in(text);
        std::string raw;
        int num = 0;
        while (std::getline(in, raw)) {
            ++num;
            if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
            if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
            lines.push_back({num, raw});
        }
    }
    if (lines.empty()) throw ParseError("empty model description");

    ModelSpec spec;
    std::set<std::string> seen;
    size_t li = 0;

    const auto section_of = [](const std::string& line) -> std::string {
        size_t i = line.find_first_not_of(" \t");
        size_t j = i;
        while (j < line.size() && (std::isalnum(static_cast<unsigned char>(line[j])) || line[j] == '_'))
            ++j;
        std::string word = line.substr(i, j - i);
        if (word == "model") return word;
        size_t k = line.find_first_not_of(" \t", j);
        if (k != std::string::npos && line[k] == ':' &&
            (word == "indices" || word == "couplings" || word == "tables" ||
             word == "coordinates" || word == "lagrangian"))
            return word;
        return "";
    };

    while (li < lines.size()) {
        auto [lineno, line] = lines[li];
        std::string section = section_of(line);
        if (section.empty())
            throw ParseError("expected a section header", lineno, 1);
        if (seen.count(section))
            throw ParseError("duplicate section '" + section + "'", lineno, 1);
        seen.insert(section);

        if (section == "model") {
            size_t open = line.find('"');
            size_t close = open == std::string::npos ? std::string::npos : line.find('"', open + 1);
            if (open == std::string::npos || close == std::string::npos)
                throw ParseError("model name must be quoted: model \"<name>\"", lineno, 1);
            spec.name = line.substr(open + 1, close - open - 1);
            ++li;
            continue;
        }

        std::string payload = line.substr(line.find(':') + 1);
        if (section == "lagrangian") {
            for (size_t k = li + 1; k < lines.size(); ++k) {
                if (!section_of(lines[k].second).empty())
                    throw ParseError("lagrangian must be the last section", lines[k].first, 1);
                payload += "\n" + lines[k].second;
            }
            li = lines.size();
        } else {
            ++li;
        }

        lex::Stream s(payload, lineno);
        if (section == "indices") {
            do {
                std::string name = s.expect_ident();
                if (s.expect_ident() != "in") s.fail("expected 'in'");
                int lo = static_cast<int>(s.expect_int());
                s.expect_punct("..");
                int hi = static_cast<int>(s.expect_int());
                if (spec.find_index(name)) s.fail("duplicate index '" + name + "'");
                spec.indices.push_back({name, {lo, hi}});
            } while (s.accept_punct(","));
            if (!s.at_end()) s.fail("trailing input after indices");
        } else if (section == "couplings") {
            do {
                CouplingDecl c{s.expect_ident(), std::nullopt};
                if (s.accept_punct("=")) c.value = detail::parse_rational(s);
                if (spec.find_coupling(c.name)) s.fail("duplicate coupling '" + c.name + "'");
                spec.couplings.push_back(std::move(c));
            } while (s.accept_punct(","));
            if (!s.at_end()) s.fail("trailing input after couplings");
        } else if (section == "tables") {
            do {
                std::string name = s.expect_ident();
                s.expect_punct("=");
                if (s.peek().kind == lex::Token::Kind::Ident) {
                    if (s.expect_ident() != "eps3") s.fail("unknown builtin table");
                    spec.tables.push_back({name, StructureTable::eps3()});
                } else {
                    s.expect_punct("{");
                    std::vector<std::pair<std::array<int, 3>, Rational>> entries;
                    do {
                        s.expect_punct("(");
                        int a = static_cast<int>(s.expect_int());
                        s.expect_punct(",");
                        int b = static_cast<int>(s.expect_int());
                        s.expect_punct(",");
                        int c = static_cast<int>(s.expect_int());
                        s.expect_punct(")");
                        s.expect_punct("=");
                        entries.push_back({{a, b, c}, detail::parse_rational(s)});
                    } while (s.accept_punct(","));
                    s.expect_punct("}");
                    spec.tables.push_back({name, StructureTable::literal(std::move(entries))});
                }
            } while (s.accept_punct(","));
            if (!s.at_end()) s.fail("trailing input after tables");
        } else if (section == "coordinates") {
            do {
                CoordinateDecl d{s.expect_ident(), {}};
                if (s.accept_punct("[")) {
                    do d.index_vars.push_back(s.expect_ident());
                    while (s.accept_punct(","));
                    s.expect_punct("]");
                }
                if (spec.find_coordinate(d.name)) s.fail("duplicate coordinate '" + d.name + "'");
                spec.coordinates.push_back(std::move(d));
            } while (s.accept_punct(","));
            if (!s.at_end()) s.fail("trailing input after coordinates");
        } else if (section == "lagrangian") {
            spec.lagrangian = detail::parse_expr(s);
            if (!s.at_end()) s.fail("trailing input after lagrangian");
        }
    }

    if (!seen.count("model")) throw ParseError("missing 'model \"<name>\"' line");
    if (!spec.lagrangian) throw ParseError("missing 'lagrangian:' section");
    validate_model_spec(spec);
    std::set<std::string> bound;
    detail::check_lagrangian(spec, spec.lagrangian, bound);
    return spec;
}

inline ModelSpec parse_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open model file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str());
}

// ---------------------------------------------------------------------------
// Canonical printing; parse(print(spec)) is structurally identical to spec.

namespace detail {

inline std::string print_index_arg(const IndexArg& a) {
    return std::holds_alternative<int>(a) ? std::to_string(std::get<int>(a))
                                          : std::get<std::string>(a);
}

inline std::string print_mnode(const MNodePtr& n);

inline std::string print_args(const std::vector<IndexArg>& args, char open, char close) {
    std::string s(1, open);
    for (size_t i = 0; i < args.size(); ++i) {
        if (i) s += ',';
        s += print_index_arg(args[i]);
    }
    s += close;
    return s;
}

inline bool atom_like(const MNode& n) {
    using K = MNode::Kind;
    return n.kind == K::SymRef || n.kind == K::Dot || n.kind == K::Sum ||
           n.kind == K::Table || (n.kind == K::Num && n.num >= 0);
}

inline std::string print_parenthesized(const MNodePtr& n, bool need) {
    std::string s = print_mnode(n);
    return need ? "(" + s + ")" : s;
}

inline std::string print_mnode(const MNodePtr& n) {
    using K = MNode::Kind;
    switch (n->kind) {
        case K::Num:
            return to_string(n->num);
        case K::SymRef:
            return n->args.empty() ? n->name : n->name + print_args(n->args, '[', ']');
        case K::Dot:
            return "dot(" + print_mnode(n->kids[0]) + ")";
        case K::Sum:
            return "sum(" + n->name + ", " + print_mnode(n->kids[0]) + ")";
        case K::Table:
            return n->name + print_args(n->args, '(', ')');
        case K::Add: {
            std::string s;
            for (size_t i = 0; i < n->kids.size(); ++i) {
                const MNodePtr& k = n->kids[i];
                if (i == 0) {
                    s += print_parenthesized(k, k->kind == K::Add);
                } else if (k->kind == K::Neg) {
                    s += " - " + print_parenthesized(k->kids[0],
                                                     k->kids[0]->kind == K::Add ||
                                                         k->kids[0]->kind == K::Neg);
                } else {
                    s += " + " + print_parenthesized(k, k->kind == K::Add);
                }
            }
            return s;
        }
        case K::Mul: {
            std::string s;
            for (size_t i = 0; i < n->kids.size(); ++i) {
                const MNodePtr& k = n->kids[i];
                if (i) s += '*';
                bool need = k->kind == K::Add || k->kind == K::Div ||
                            (i > 0 && k->kind == K::Neg) || k->kind == K::Mul ||
                            (k->kind == K::Num && k->num < 0 && i > 0);
                if (i == 0 && k->kind == K::Neg) need = false;  // leading -x*y
                s += print_parenthesized(k, need);
            }
            return s;
        }
        case K::Div: {
            bool lneed = n->kids[0]->kind == K::Add || n->kids[0]->kind == K::Neg ||
                         n->kids[0]->kind == K::Div;
            bool rneed = !atom_like(*n->kids[1]);
            return print_parenthesized(n->kids[0], lneed) + "/" +
                   print_parenthesized(n->kids[1], rneed);
        }
        case K::Neg:
            return "-" + print_parenthesized(n->kids[0], !atom_like(*n->kids[0]) &&
                                                             n->kids[0]->kind != K::Pow);
        case K::Pow:
            return print_parenthesized(n->kids[0], !atom_like(*n->kids[0])) + "^" +
                   (n->exponent < 0 ? "-" + std::to_string(-n->exponent)
                                    : std::to_string(n->exponent));
    }
    throw Error("corrupt model expression tree");
}

} // namespace detail

inline std::string print_model_spec(const ModelSpec& spec) {
    std::ostringstream out;
    out << "model \"" << spec.name << "\"\n";
    if (!spec.indices.empty()) {
        out << "indices: ";
        for (size_t i = 0; i < spec.indices.size(); ++i) {
            if (i) out << ", ";
            out << spec.indices[i].first << " in " << spec.indices[i].second.lo << ".."
                << spec.indices[i].second.hi;
        }
        out << "\n";
    }
    if (!spec.couplings.empty()) {
        out << "couplings: ";
        for (size_t i = 0; i < spec.couplings.size(); ++i) {
            if (i) out << ", ";
            out << spec.couplings[i].name;
            if (spec.couplings[i].value) out << " = " << to_string(*spec.couplings[i].value);
        }
        out << "\n";
    }
    if (!spec.tables.empty()) {
        out << "tables: ";
        for (size_t i = 0; i < spec.tables.size(); ++i) {
            if (i) out << ", ";
            out << spec.tables[i].first << " = ";
            const StructureTable& t = spec.tables[i].second;
            if (t.source() == StructureTable::Source::Eps3) {
                out << "eps3";
            } else {
                out << "{ ";
                bool first = true;
                for (const auto& [k, v] : t.entries()) {
                    if (!(k[0] < k[1] && k[1] < k[2])) continue;  // one representative
                    if (!first) out << ", ";
                    first = false;
                    out << "(" << k[0] << "," << k[1] << "," << k[2] << ") = " << to_string(v);
                }
                out << " }";
            }
        }
        out << "\n";
    }
    out << "coordinates: ";
    for (size_t i = 0; i < spec.coordinates.size(); ++i) {
        if (i) out << ", ";
        out << spec.coordinates[i].name;
        if (!spec.coordinates[i].index_vars.empty()) {
            out << '[';
            for (size_t k = 0; k < spec.coordinates[i].index_vars.size(); ++k) {
                if (k) out << ',';
                out << spec.coordinates[i].index_vars[k];
            }
            out << ']';
        }
    }
    out << "\n";
    out << "lagrangian: " << detail::print_mnode(spec.lagrangian) << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Expressions over an already-flattened model (CLI gauges, parameter paths):
// same operator grammar, symbols resolved by name and integer indices.

inline Expr parse_flat_expr(const std::string& text,
                            const std::map<std::string, Symbol>& symbols) {
    lex::Stream s(text, 1);
    MNodePtr tree = detail::parse_expr(s);
    if (!s.at_end()) s.fail("trailing input after expression");

    // convert, resolving every SymRef against the given symbol table
    const std::function<ast::NodePtr(const MNodePtr&)> conv = [&](const MNodePtr& n) -> ast::NodePtr {
        using K = MNode::Kind;
        switch (n->kind) {
            case K::Num:
                return ast::num(n->num);
            case K::SymRef: {
                std::string key = n->name;
                if (!n->args.empty()) {
                    key += '[';
                    for (size_t i = 0; i < n->args.size(); ++i) {
                        if (i) key += ',';
                        if (!std::holds_alternative<int>(n->args[i]))
                            throw ParseError("only integer indices are allowed here");
                        key += std::to_string(std::get<int>(n->args[i]));
                    }
                    key += ']';
                }
                auto it = symbols.find(key);
                if (it == symbols.end()) throw ParseError("unknown symbol '" + key + "'");
                return ast::sym(it->second);
            }
            case K::Add: {
                std::vector<ast::NodePtr> kids;
                for (const auto& k : n->kids) kids.push_back(conv(k));
                return ast::add(std::move(kids));
            }
            case K::Mul: {
                std::vector<ast::NodePtr> kids;
                for (const auto& k : n->kids) kids.push_back(conv(k));
                return ast::mul(std::move(kids));
            }
            case K::Div:
                return ast::div(conv(n->kids[0]), conv(n->kids[1]));
            case K::Neg:
                return ast::neg(conv(n->kids[0]));
            case K::Pow:
                return ast::pow(conv(n->kids[0]), n->exponent);
            case K::Dot:
            case K::Sum:
            case K::Table:
                throw ParseError("dot/sum/table are not allowed in this expression");
        }
        throw Error("corrupt expression tree");
    };
    return ast::normalize(conv(tree));
}

/// Symbol table for parse_flat_expr: coordinates, momenta and couplings of a
/// model, plus the time symbol.
inline std::map<std::string, Symbol> flat_symbol_table(const FlatModel& model,
                                                       bool with_time = true) {
    std::map<std::string, Symbol> out;
    for (const auto& q : model.coordinates) {
        out[q.str()] = q;
        out[model.momentum(q).str()] = model.momentum(q);
    }
    for (const auto& [c, v] : model.couplings) out[c.str()] = c;
    if (with_time) out["t"] = Symbol::time();
    return out;
}

} // namespace hjq
