#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "regspline/numeration.hpp"

namespace regspline {

/// A term is either a constant point or a variable plus a constant offset.
struct Term {
    std::string var; // empty for a constant
    Point offset;

    bool is_constant() const { return var.empty(); }
};

inline Term term_var(std::string name, int d) {
    return Term{std::move(name), Point(static_cast<std::size_t>(d), Rational(0))};
}
inline Term term_var_plus(std::string name, Point off) { return Term{std::move(name), std::move(off)}; }
inline Term term_const(Point p) { return Term{"", std::move(p)}; }

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
    enum class Kind { kTrue, kFalse, kIn, kEq, kAnd, kOr, kNot, kImplies, kExists, kForall };

    Kind kind = Kind::kTrue;
    Term lhs, rhs;            // kIn uses lhs only, kEq uses both
    std::string language;     // kIn
    std::string bound;        // kExists, kForall
    std::vector<FormulaPtr> children;
};

inline FormulaPtr f_true() {
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Kind::kTrue;
    return f;
}

inline FormulaPtr f_false() {
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Kind::kFalse;
    return f;
}

inline FormulaPtr f_in(Term t, std::string language) {
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Kind::kIn;
    f->lhs = std::move(t);
    f->language = std::move(language);
    return f;
}

inline FormulaPtr f_eq(Term a, Term b) {
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Kind::kEq;
    f->lhs = std::move(a);
    f->rhs = std::move(b);
    return f;
}

inline FormulaPtr f_and(std::vector<FormulaPtr> children) {
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Kind::kAnd;
    f->children = std::move(children);
    return f;
}

inline FormulaPtr f_or(std::vector<FormulaPtr> children) {
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Kind::kOr;
    f->children = std::move(children);
    return f;
}

inline FormulaPtr f_not(FormulaPtr inner) {
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Kind::kNot;
    f->children.push_back(std::move(inner));
    return f;
}

inline FormulaPtr f_implies(FormulaPtr a, FormulaPtr b) {
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Kind::kImplies;
    f->children.push_back(std::move(a));
    f->children.push_back(std::move(b));
    return f;
}

inline FormulaPtr f_exists(std::string var, FormulaPtr body) {
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Kind::kExists;
    f->bound = std::move(var);
    f->children.push_back(std::move(body));
    return f;
}

inline FormulaPtr f_forall(std::string var, FormulaPtr body) {
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Kind::kForall;
    f->bound = std::move(var);
    f->children.push_back(std::move(body));
    return f;
}

/// Named d-track languages available to kIn atoms.  All variables range over
/// points of the same dimension.
struct FormulaContext {
    Base base{2};
    int dimension = 1;
    std::map<std::string, SyncAutomaton> languages;

    const SyncAutomaton& language(const std::string& name) const {
        auto it = languages.find(name);
        if (it == languages.end()) throw usage_error("unknown language: " + name);
        if (it->second.alphabet.tracks != dimension)
            throw usage_error("language dimension mismatch: " + name);
        return it->second;
    }
};

/// Result of compiling a formula: an automaton whose track groups carry the
/// free variables in first-use order, or a truth value when no variable is
/// free.
struct CompiledFormula {
    std::vector<std::string> vars;
    SyncAutomaton automaton;
    bool constant = false;

    bool is_constant() const { return vars.empty(); }
};

namespace detail {

inline SyncAutomaton empty_language(Base b, int tracks) {
    SyncAutomaton a;
    a.alphabet = TrackAlphabet(b.value, tracks);
    a.deterministic = true;
    return a;
}

inline CompiledFormula constant_result(bool value) {
    CompiledFormula c;
    c.constant = value;
    return c;
}

inline std::vector<int> group_tracks(const std::vector<std::string>& vars, int d) {
    std::vector<int> m(vars.size() * static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = static_cast<int>(i);
    return m;
}

inline int var_position(const std::vector<std::string>& vars, const std::string& v) {
    for (std::size_t i = 0; i < vars.size(); ++i)
        if (vars[i] == v) return static_cast<int>(i);
    return -1;
}

/// Expands a compiled formula to a superset of its variables, joining the
/// full encoding language on the added track groups.
inline CompiledFormula align_formula(const CompiledFormula& f, const std::vector<std::string>& target,
                                     const FormulaContext& ctx) {
    int d = ctx.dimension;
    if (f.is_constant()) {
        CompiledFormula out;
        out.vars = target;
        out.automaton = f.constant
                            ? valid_encoding_automaton(ctx.base, d * static_cast<int>(target.size()))
                            : empty_language(ctx.base, d * static_cast<int>(target.size()));
        return out;
    }
    if (f.vars == target) return f;
    std::vector<int> map_f;
    std::vector<bool> covered(target.size(), false);
    for (const auto& v : f.vars) {
        int p = var_position(target, v);
        if (p < 0) throw usage_error("align: variable not in target");
        covered[static_cast<std::size_t>(p)] = true;
        for (int k = 0; k < d; ++k) map_f.push_back(p * d + k);
    }
    std::vector<int> map_rest;
    for (std::size_t p = 0; p < target.size(); ++p)
        if (!covered[p])
            for (int k = 0; k < d; ++k) map_rest.push_back(static_cast<int>(p) * d + k);
    CompiledFormula out;
    out.vars = target;
    if (map_rest.empty()) {
        out.automaton = reorder_tracks(f.automaton, [&] {
            // reorder wants, per output track, the input track that feeds it
            std::vector<int> source(map_f.size());
            for (std::size_t i = 0; i < map_f.size(); ++i)
                source[static_cast<std::size_t>(map_f[i])] = static_cast<int>(i);
            return source;
        }());
        return out;
    }
    SyncAutomaton rest = valid_encoding_automaton(ctx.base, static_cast<int>(map_rest.size()));
    out.automaton = synchronized_product(f.automaton, map_f, rest, map_rest,
                                         d * static_cast<int>(target.size()));
    return out;
}

inline std::vector<std::string> merged_vars(const std::vector<std::string>& a,
                                            const std::vector<std::string>& b) {
    std::vector<std::string> out = a;
    for (const auto& v : b)
        if (var_position(out, v) < 0) out.push_back(v);
    return out;
}

} // namespace detail

inline CompiledFormula compile_formula(const FormulaPtr& f, const FormulaContext& ctx) {
    if (!f) throw usage_error("compile: null formula");
    int d = ctx.dimension;
    Base b = ctx.base;
    auto check_dim = [&](const Term& t) {
        if (static_cast<int>(t.offset.size()) != d) throw usage_error("term dimension mismatch");
    };
    switch (f->kind) {
        case Formula::Kind::kTrue:
            return detail::constant_result(true);
        case Formula::Kind::kFalse:
            return detail::constant_result(false);
        case Formula::Kind::kIn: {
            check_dim(f->lhs);
            const SyncAutomaton& lang = ctx.language(f->language);
            if (f->lhs.is_constant())
                return detail::constant_result(contains_point(lang, f->lhs.offset, b));
            CompiledFormula out;
            out.vars = {f->lhs.var};
            out.automaton = is_zero_point(f->lhs.offset)
                                ? lang
                                : minimize(shift_language(lang, point_neg(f->lhs.offset), b));
            return out;
        }
        case Formula::Kind::kEq: {
            check_dim(f->lhs);
            check_dim(f->rhs);
            const Term& s = f->lhs;
            const Term& t = f->rhs;
            if (s.is_constant() && t.is_constant())
                return detail::constant_result(s.offset == t.offset);
            if (s.is_constant() || t.is_constant()) {
                const Term& var_term = s.is_constant() ? t : s;
                const Term& const_term = s.is_constant() ? s : t;
                CompiledFormula out;
                out.vars = {var_term.var};
                out.automaton =
                    constant_point_automaton(point_sub(const_term.offset, var_term.offset), b);
                return out;
            }
            if (s.var == t.var) return detail::constant_result(s.offset == t.offset);
            // x + a = y + c  <=>  y = x + (a - c)
            Point delta = point_sub(s.offset, t.offset);
            SyncAutomaton add = addition_automaton(b, d);
            std::vector<int> const_map(d), keep(2 * d);
            for (int k = 0; k < d; ++k) {
                const_map[k] = d + k;
                keep[k] = k;
                keep[d + k] = 2 * d + k;
            }
            SyncAutomaton joined = synchronized_product(add, identity_track_map(3 * d),
                                                        constant_point_automaton(delta, b), const_map,
                                                        3 * d);
            CompiledFormula out;
            out.vars = {s.var, t.var};
            out.automaton = minimize(project(joined, keep));
            return out;
        }
        case Formula::Kind::kAnd: {
            CompiledFormula cur = detail::constant_result(true);
            for (const auto& child : f->children) {
                CompiledFormula g = compile_formula(child, ctx);
                if (g.is_constant()) {
                    if (!g.constant) return detail::constant_result(false);
                    continue;
                }
                if (cur.is_constant()) {
                    cur = std::move(g);
                    continue;
                }
                std::vector<std::string> target = detail::merged_vars(cur.vars, g.vars);
                std::vector<int> map_cur, map_g;
                for (const auto& v : cur.vars) {
                    int p = detail::var_position(target, v);
                    for (int k = 0; k < d; ++k) map_cur.push_back(p * d + k);
                }
                for (const auto& v : g.vars) {
                    int p = detail::var_position(target, v);
                    for (int k = 0; k < d; ++k) map_g.push_back(p * d + k);
                }
                cur.automaton = synchronized_product(cur.automaton, map_cur, g.automaton, map_g,
                                                     d * static_cast<int>(target.size()));
                cur.vars = std::move(target);
            }
            if (!cur.is_constant()) cur.automaton = minimize(cur.automaton);
            return cur;
        }
        case Formula::Kind::kOr: {
            std::vector<CompiledFormula> parts;
            std::vector<std::string> target;
            for (const auto& child : f->children) {
                CompiledFormula g = compile_formula(child, ctx);
                if (g.is_constant()) {
                    if (g.constant) return detail::constant_result(true);
                    continue;
                }
                target = detail::merged_vars(target, g.vars);
                parts.push_back(std::move(g));
            }
            if (parts.empty()) return detail::constant_result(false);
            CompiledFormula out;
            out.vars = target;
            bool first = true;
            for (const auto& part : parts) {
                SyncAutomaton aligned = detail::align_formula(part, target, ctx).automaton;
                out.automaton = first ? std::move(aligned) : union_of(out.automaton, aligned);
                first = false;
            }
            out.automaton = minimize(out.automaton);
            return out;
        }
        case Formula::Kind::kNot: {
            CompiledFormula g = compile_formula(f->children.at(0), ctx);
            if (g.is_constant()) return detail::constant_result(!g.constant);
            SyncAutomaton universe =
                valid_encoding_automaton(b, d * static_cast<int>(g.vars.size()));
            CompiledFormula out;
            out.vars = g.vars;
            out.automaton = minimize(difference(universe, minimize(g.automaton)));
            return out;
        }
        case Formula::Kind::kImplies:
            return compile_formula(
                f_or({f_not(f->children.at(0)), f->children.at(1)}), ctx);
        case Formula::Kind::kExists: {
            CompiledFormula g = compile_formula(f->children.at(0), ctx);
            int p = g.is_constant() ? -1 : detail::var_position(g.vars, f->bound);
            if (p < 0) return g; // bound variable not free in the body
            if (g.vars.size() == 1) return detail::constant_result(!is_empty(g.automaton));
            std::vector<int> keep;
            std::vector<std::string> vars;
            for (std::size_t i = 0; i < g.vars.size(); ++i) {
                if (static_cast<int>(i) == p) continue;
                vars.push_back(g.vars[i]);
                for (int k = 0; k < d; ++k) keep.push_back(static_cast<int>(i) * d + k);
            }
            CompiledFormula out;
            out.vars = std::move(vars);
            out.automaton = minimize(project(g.automaton, keep));
            return out;
        }
        case Formula::Kind::kForall: {
            CompiledFormula g = compile_formula(f->children.at(0), ctx);
            int p = g.is_constant() ? -1 : detail::var_position(g.vars, f->bound);
            if (p < 0) return g;
            SyncAutomaton body = minimize(g.automaton);
            SyncAutomaton universe_full =
                valid_encoding_automaton(b, d * static_cast<int>(g.vars.size()));
            if (g.vars.size() == 1)
                return detail::constant_result(is_empty(difference(universe_full, body)));
            std::vector<int> keep;
            std::vector<std::string> vars;
            for (std::size_t i = 0; i < g.vars.size(); ++i) {
                if (static_cast<int>(i) == p) continue;
                vars.push_back(g.vars[i]);
                for (int k = 0; k < d; ++k) keep.push_back(static_cast<int>(i) * d + k);
            }
            SyncAutomaton universe_kept =
                valid_encoding_automaton(b, d * static_cast<int>(vars.size()));
            CompiledFormula out;
            out.vars = std::move(vars);
            out.automaton = minimize(universal_project(body, keep, universe_full, universe_kept));
            return out;
        }
    }
    throw usage_error("compile: unknown formula kind");
}

inline bool evaluate_sentence(const FormulaPtr& f, const FormulaContext& ctx) {
    CompiledFormula c = compile_formula(f, ctx);
    if (!c.is_constant()) throw usage_error("evaluate: formula has free variables");
    return c.constant;
}

/// Checks a sentence of the shape (forall u body).  On failure returns the
/// length-lexicographically smallest point falsifying the body.
inline std::pair<bool, std::optional<Point>> check_universal(const FormulaPtr& f,
                                                             const FormulaContext& ctx) {
    if (!f || f->kind != Formula::Kind::kForall)
        throw usage_error("check_universal: expected a universally quantified sentence");
    CompiledFormula c = compile_formula(f_not(f->children.at(0)), ctx);
    if (c.is_constant()) {
        if (!c.constant) return {true, std::nullopt};
        // Body is constantly false: every point witnesses the failure.
        return {false, Point(static_cast<std::size_t>(ctx.dimension), Rational(0))};
    }
    if (c.vars.size() != 1) throw usage_error("check_universal: sentence is not closed");
    std::optional<TrackWord> w = shortest_accepted(c.automaton);
    if (!w) return {true, std::nullopt};
    return {false, decode_point(encodings_from_word(*w))};
}

// ---------------------------------------------------------------------------
// Concrete syntax
//
//   formula := (and f ...) | (or f ...) | (not f) | (imp f g)
//            | (exists v f) | (forall v f) | (in term name) | (eq term term)
//            | true | false
//   term    := v | rational | (pt q1 ... qd) | (add term term ...)
//
// Rationals in terms are only valid in dimension one; (add ...) accepts at
// most one variable among its arguments and folds the rest into the offset.

namespace detail {

struct SExpr {
    bool is_atom = false;
    std::string atom;
    std::vector<SExpr> items;
};

inline void skip_space(const std::string& s, std::size_t& i) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
}

inline SExpr parse_sexpr(const std::string& s, std::size_t& i) {
    skip_space(s, i);
    if (i >= s.size()) throw parse_error("formula: unexpected end of input");
    SExpr node;
    if (s[i] == '(') {
        ++i;
        while (true) {
            skip_space(s, i);
            if (i >= s.size()) throw parse_error("formula: missing closing parenthesis");
            if (s[i] == ')') {
                ++i;
                break;
            }
            node.items.push_back(parse_sexpr(s, i));
        }
        return node;
    }
    if (s[i] == ')') throw parse_error("formula: unexpected closing parenthesis");
    node.is_atom = true;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) && s[i] != '(' &&
           s[i] != ')')
        node.atom.push_back(s[i++]);
    return node;
}

inline bool atom_is_rational(const std::string& a) {
    return !a.empty() && (std::isdigit(static_cast<unsigned char>(a[0])) || a[0] == '-');
}

inline Term parse_term(const SExpr& e, int d) {
    if (e.is_atom) {
        if (atom_is_rational(e.atom)) {
            if (d != 1) throw parse_error("formula: bare rational in dimension " + std::to_string(d));
            return term_const(Point{parse_rational(e.atom)});
        }
        return term_var(e.atom, d);
    }
    if (e.items.empty() || !e.items[0].is_atom) throw parse_error("formula: malformed term");
    const std::string& head = e.items[0].atom;
    if (head == "pt") {
        if (static_cast<int>(e.items.size()) != d + 1)
            throw parse_error("formula: point of wrong dimension");
        Point p;
        for (std::size_t i = 1; i < e.items.size(); ++i) {
            if (!e.items[i].is_atom) throw parse_error("formula: malformed point");
            p.push_back(parse_rational(e.items[i].atom));
        }
        return term_const(std::move(p));
    }
    if (head == "add") {
        if (e.items.size() < 3) throw parse_error("formula: add needs two terms");
        std::string var;
        Point offset(static_cast<std::size_t>(d), Rational(0));
        for (std::size_t i = 1; i < e.items.size(); ++i) {
            Term t = parse_term(e.items[i], d);
            if (!t.is_constant()) {
                if (!var.empty()) throw parse_error("formula: add of two variables");
                var = t.var;
            }
            offset = point_add(offset, t.offset);
        }
        return var.empty() ? term_const(std::move(offset)) : term_var_plus(var, std::move(offset));
    }
    throw parse_error("formula: unknown term head: " + head);
}

inline FormulaPtr build_formula(const SExpr& e, int d) {
    if (e.is_atom) {
        if (e.atom == "true") return f_true();
        if (e.atom == "false") return f_false();
        throw parse_error("formula: unexpected atom: " + e.atom);
    }
    if (e.items.empty() || !e.items[0].is_atom) throw parse_error("formula: malformed node");
    const std::string& head = e.items[0].atom;
    auto need = [&](std::size_t n) {
        if (e.items.size() != n + 1)
            throw parse_error("formula: " + head + " expects " + std::to_string(n) + " arguments");
    };
    if (head == "in") {
        need(2);
        if (!e.items[2].is_atom) throw parse_error("formula: language name expected");
        return f_in(parse_term(e.items[1], d), e.items[2].atom);
    }
    if (head == "eq") {
        need(2);
        return f_eq(parse_term(e.items[1], d), parse_term(e.items[2], d));
    }
    if (head == "not") {
        need(1);
        return f_not(build_formula(e.items[1], d));
    }
    if (head == "imp") {
        need(2);
        return f_implies(build_formula(e.items[1], d), build_formula(e.items[2], d));
    }
    if (head == "and" || head == "or") {
        std::vector<FormulaPtr> children;
        for (std::size_t i = 1; i < e.items.size(); ++i)
            children.push_back(build_formula(e.items[i], d));
        return head == "and" ? f_and(std::move(children)) : f_or(std::move(children));
    }
    if (head == "exists" || head == "forall") {
        need(2);
        if (!e.items[1].is_atom || atom_is_rational(e.items[1].atom))
            throw parse_error("formula: variable name expected");
        FormulaPtr body = build_formula(e.items[2], d);
        return head == "exists" ? f_exists(e.items[1].atom, std::move(body))
                                : f_forall(e.items[1].atom, std::move(body));
    }
    throw parse_error("formula: unknown operator: " + head);
}

} // namespace detail

inline FormulaPtr parse_formula(const std::string& text, int dimension) {
    std::size_t i = 0;
    detail::SExpr e = detail::parse_sexpr(text, i);
    detail::skip_space(text, i);
    if (i != text.size()) throw parse_error("formula: trailing input");
    return detail::build_formula(e, dimension);
}

} // namespace regspline
