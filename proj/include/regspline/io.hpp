#pragma once
// Text formats shared by the tests and the command line tool: automaton
// files, mesh specs with builtin pattern generators, and the manifests tying
// spline relations and selected-basis languages to their mesh.  Writers emit
// a canonical form, so saving what was loaded reproduces the bytes.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "regspline/kraft.hpp"
#include "regspline/spline.hpp"

namespace regspline {

namespace io_detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> tokens(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string t;
    while (in >> t) out.push_back(t);
    return out;
}

/// Meaningful lines of a text file: trimmed, with blank lines and lines
/// starting with '#' removed.  '#' never starts a comment mid-line because
/// it is the pad mark inside transition letters.
inline std::vector<std::string> file_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open " + path.string());
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        out.push_back(std::move(t));
    }
    return out;
}

/// Splits "key = value" on the first '='; both sides trimmed.
inline std::optional<std::pair<std::string, std::string>> key_value(const std::string& line) {
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) return std::nullopt;
    return std::make_pair(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
}

inline long parse_long(const std::string& text, const std::string& what) {
    std::size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(text, &pos);
    } catch (const std::exception&) {
        throw parse_error(what + ": not an integer: " + text);
    }
    if (pos != text.size()) throw parse_error(what + ": not an integer: " + text);
    return v;
}

inline long to_long(const Rational& q, const std::string& what) {
    if (q.get_den() != 1 || !q.get_num().fits_slong_p())
        throw parse_error(what + ": expected an integer, got " + q.get_str());
    return q.get_num().get_si();
}

} // namespace io_detail

// ---------------------------------------------------------------------------
// Exact numbers on the command line and in manifests.

/// Fraction "p/q", plain integer, or "digits:" followed by the two-row digit
/// form (the prefix disambiguates "10/11" the fraction from "10/11" the digit
/// rows).
inline Rational parse_rational_text(const std::string& text, Base b) {
    const std::string prefix = "digits:";
    if (text.rfind(prefix, 0) == 0) return decode(parse_encoding(text.substr(prefix.size()), b));
    // GMP would silently skip embedded whitespace ("1 2" reading as 12).
    if (text.find_first_of(" \t") != std::string::npos)
        throw parse_error("malformed rational: " + text);
    return parse_rational(text);
}

/// Comma-separated coordinates, optionally wrapped in parentheses.
inline Point parse_point_text(const std::string& text, Base b) {
    std::string body = io_detail::trim(text);
    if (!body.empty() && body.front() == '(') {
        if (body.back() != ')') throw parse_error("unbalanced parentheses: " + text);
        body = body.substr(1, body.size() - 2);
    }
    Point p;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = body.find(',', start);
        std::string part = io_detail::trim(
            comma == std::string::npos ? body.substr(start) : body.substr(start, comma - start));
        if (part.empty()) throw parse_error("empty coordinate in point: " + text);
        p.push_back(parse_rational_text(part, b));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return p;
}

inline std::string rational_text(const Rational& q) { return q.get_str(); }

inline std::string point_text(const Point& p) {
    std::string out = p.size() == 1 ? "" : "(";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) out += ",";
        out += p[i].get_str();
    }
    if (p.size() != 1) out += ")";
    return out;
}

// ---------------------------------------------------------------------------
// Automaton text format.
//
//   base=2
//   tracks=1
//   deterministic=true
//   state 0 initial accepting
//   trans 0 1/0|# 1
//
// A letter lists one entry per track joined by '|'; an entry is either the
// integer-row and fraction-row digits of one column as "a/b" or '#' for the
// pad.  The writer emits states in id order and transitions sorted, so the
// output of save is a canonical form.

inline std::string letter_text(const TrackAlphabet& alpha, Letter l) {
    std::string out;
    for (int t = 0; t < alpha.tracks; ++t) {
        if (t) out += "|";
        std::uint32_t s = alpha.symbol_at(l, t);
        if (s > alpha.pad()) throw usage_error("letter outside alphabet");
        if (s == alpha.pad())
            out += "#";
        else
            out += std::to_string(s / static_cast<std::uint32_t>(alpha.base)) + "/" +
                   std::to_string(s % static_cast<std::uint32_t>(alpha.base));
    }
    return out;
}

inline Letter parse_letter_text(const TrackAlphabet& alpha, const std::string& text) {
    std::vector<std::uint32_t> symbols;
    std::size_t start = 0;
    while (true) {
        std::size_t bar = text.find('|', start);
        std::string entry =
            bar == std::string::npos ? text.substr(start) : text.substr(start, bar - start);
        if (entry == "#") {
            symbols.push_back(alpha.pad());
        } else {
            std::size_t slash = entry.find('/');
            if (slash == std::string::npos)
                throw parse_error("bad letter entry (want a/b or #): " + text);
            long a = io_detail::parse_long(entry.substr(0, slash), "letter digit");
            long f = io_detail::parse_long(entry.substr(slash + 1), "letter digit");
            if (a < 0 || a >= alpha.base || f < 0 || f >= alpha.base)
                throw parse_error("digit out of range for base " + std::to_string(alpha.base) +
                                  ": " + text);
            symbols.push_back(static_cast<std::uint32_t>(a * alpha.base + f));
        }
        if (bar == std::string::npos) break;
        start = bar + 1;
    }
    if (static_cast<int>(symbols.size()) != alpha.tracks)
        throw parse_error("letter has " + std::to_string(symbols.size()) + " entries, want " +
                          std::to_string(alpha.tracks) + ": " + text);
    Letter l = alpha.pack(symbols);
    if (alpha.is_all_pad(l)) throw parse_error("all-pad letter is not allowed: " + text);
    return l;
}

inline void write_automaton(std::ostream& os, const SyncAutomaton& a) {
    os << "base=" << a.alphabet.base << "\n";
    os << "tracks=" << a.alphabet.tracks << "\n";
    os << "deterministic=" << (a.deterministic ? "true" : "false") << "\n";
    std::vector<bool> init(a.state_count(), false);
    for (State s : a.initial) init[s] = true;
    for (std::size_t s = 0; s < a.state_count(); ++s) {
        os << "state " << s;
        if (init[s]) os << " initial";
        if (a.accepting[s]) os << " accepting";
        os << "\n";
    }
    for (std::size_t s = 0; s < a.state_count(); ++s) {
        auto edges = a.edges[s];
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        for (auto [l, t] : edges)
            os << "trans " << s << " " << letter_text(a.alphabet, l) << " " << t << "\n";
    }
}

inline SyncAutomaton read_automaton(std::istream& is, const std::string& name) {
    long base = -1, tracks = -1;
    int deterministic = -1;
    SyncAutomaton a;
    bool have_alphabet = false;
    std::unordered_map<long, State> ids;
    auto fail = [&](const std::string& msg) -> void { throw parse_error(name + ": " + msg); };
    auto need_alphabet = [&]() {
        if (have_alphabet) return;
        if (base < 0 || tracks < 0 || deterministic < 0)
            fail("base=, tracks= and deterministic= must come before states");
        if (base < 2) fail("base must be >= 2");
        if (tracks < 1 || tracks > kMaxTracks) fail("track count out of range");
        a.alphabet = TrackAlphabet(static_cast<int>(base), static_cast<int>(tracks));
        a.deterministic = deterministic == 1;
        have_alphabet = true;
    };
    std::string raw;
    while (std::getline(is, raw)) {
        std::string line = io_detail::trim(raw);
        if (line.empty() || line[0] == '#') continue;
        auto toks = io_detail::tokens(line);
        if (toks[0] == "state") {
            need_alphabet();
            if (toks.size() < 2) fail("state line needs an id");
            long id = io_detail::parse_long(toks[1], "state id");
            if (ids.count(id)) fail("duplicate state " + toks[1]);
            bool accept = false, initial = false;
            for (std::size_t i = 2; i < toks.size(); ++i) {
                if (toks[i] == "initial")
                    initial = true;
                else if (toks[i] == "accepting")
                    accept = true;
                else
                    fail("unknown state flag: " + toks[i]);
            }
            State s = a.add_state(accept);
            ids.emplace(id, s);
            if (initial) a.initial.push_back(s);
        } else if (toks[0] == "trans") {
            need_alphabet();
            if (toks.size() != 4) fail("trans line needs source, letter, target: " + line);
            auto src = ids.find(io_detail::parse_long(toks[1], "state id"));
            auto dst = ids.find(io_detail::parse_long(toks[3], "state id"));
            if (src == ids.end() || dst == ids.end()) fail("undeclared state in: " + line);
            a.add_edge(src->second, parse_letter_text(a.alphabet, toks[2]), dst->second);
        } else if (auto kv = io_detail::key_value(line)) {
            if (have_alphabet) fail("header line after states: " + line);
            if (kv->first == "base")
                base = io_detail::parse_long(kv->second, "base");
            else if (kv->first == "tracks")
                tracks = io_detail::parse_long(kv->second, "tracks");
            else if (kv->first == "deterministic") {
                if (kv->second != "true" && kv->second != "false")
                    fail("deterministic must be true or false");
                deterministic = kv->second == "true" ? 1 : 0;
            } else
                fail("unknown header key: " + kv->first);
        } else {
            fail("unrecognized line: " + line);
        }
    }
    need_alphabet();
    a.finish_edges();
    if (a.deterministic) {
        if (a.initial.size() > 1) fail("claims deterministic but has several initial states");
        for (std::size_t s = 0; s < a.state_count(); ++s)
            for (std::size_t i = 1; i < a.edges[s].size(); ++i)
                if (a.edges[s][i].first == a.edges[s][i - 1].first)
                    fail("claims deterministic but state " + std::to_string(s) +
                         " branches on one letter");
    }
    return a;
}

inline void save_automaton(const SyncAutomaton& a, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write " + path.string());
    write_automaton(out, a);
    if (!out.good()) throw parse_error("write failed: " + path.string());
}

inline SyncAutomaton load_automaton(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open " + path.string());
    return read_automaton(in, path.filename().string());
}

// ---------------------------------------------------------------------------
// Mesh specs.
//
//   mesh
//   dimension = 2
//   degree = 2
//   base = 2
//   levels = 3
//   level 1 automaton = fig1.L1.aut
//   level 2 pattern = cells @1 (7,0) (8,0)
//
// Subdomain `ell` holds cells of level ell-1.  Three builtin generators:
//   pattern = box 0..9 0..5 @0         cells of the given level tiling a box
//   pattern = periodic (1/2,1/2) span (1,1) (1,-1)
//                                      lattice translates of barycentres
//   pattern = cells @0 (3,4) (4,4)     an explicit cell list
// Automaton paths resolve relative to the spec file.

namespace io_detail {

inline SyncAutomaton cells_union(const std::vector<std::vector<long>>& cells, int cell_level,
                                 Base b) {
    SyncAutomaton out;
    bool first = true;
    for (const auto& c : cells) {
        SyncAutomaton one = constant_point_automaton(barycentre_point(cell_level, c), b);
        out = first ? std::move(one) : union_of(out, one);
        first = false;
    }
    return minimize(out);
}

inline std::vector<long> parse_cell_tuple(const std::string& text, int dimension, Base b) {
    Point p = parse_point_text(text, b);
    if (static_cast<int>(p.size()) != dimension)
        throw parse_error("tuple has " + std::to_string(p.size()) + " coordinates, want " +
                          std::to_string(dimension) + ": " + text);
    std::vector<long> out;
    for (const Rational& q : p) out.push_back(to_long(q, "cell index"));
    return out;
}

inline int parse_at_level(const std::string& tok) {
    if (tok.size() < 2 || tok[0] != '@') throw parse_error("expected @<cell level>, got " + tok);
    long k = parse_long(tok.substr(1), "cell level");
    if (k < 0 || k > 60) throw parse_error("cell level out of range: " + tok);
    return static_cast<int>(k);
}

inline SyncAutomaton pattern_box(const std::vector<std::string>& args, int dimension, Base b) {
    if (static_cast<int>(args.size()) != dimension + 1)
        throw parse_error("box pattern wants one lo..hi range per axis and @<cell level>");
    int k = parse_at_level(args.back());
    Rational scale = pow_int(2, k);
    std::vector<long> lo(dimension), hi(dimension);
    long total = 1;
    for (int i = 0; i < dimension; ++i) {
        const std::string& r = args[static_cast<std::size_t>(i)];
        std::size_t dots = r.find("..");
        if (dots == std::string::npos) throw parse_error("box range wants lo..hi, got " + r);
        lo[i] = to_long(parse_rational_text(r.substr(0, dots), b) * scale, "box bound times 2^k");
        hi[i] = to_long(parse_rational_text(r.substr(dots + 2), b) * scale, "box bound times 2^k");
        if (lo[i] >= hi[i]) throw parse_error("empty box range: " + r);
        total *= hi[i] - lo[i];
        if (total > 100000) throw parse_error("box pattern too large, use an automaton file");
    }
    std::vector<std::vector<long>> cells;
    std::vector<long> cur = lo;
    while (true) {
        cells.push_back(cur);
        int i = 0;
        while (i < dimension && ++cur[i] == hi[i]) cur[i++] = lo[i];
        if (i == dimension) break;
    }
    return cells_union(cells, k, b);
}

inline SyncAutomaton pattern_periodic(const std::vector<std::string>& args, int dimension,
                                      Base b) {
    std::vector<Point> translates, span;
    bool after_span = false;
    for (const std::string& t : args) {
        if (t == "span") {
            after_span = true;
            continue;
        }
        Point p = parse_point_text(t, b);
        if (static_cast<int>(p.size()) != dimension)
            throw parse_error("periodic tuple has wrong dimension: " + t);
        (after_span ? span : translates).push_back(std::move(p));
    }
    if (translates.empty() || span.empty())
        throw parse_error("periodic pattern wants barycentres, then span, then lattice vectors");
    return lattice_language(translates, span, b);
}

inline SyncAutomaton pattern_cells(const std::vector<std::string>& args, int dimension, Base b) {
    if (args.size() < 2) throw parse_error("cells pattern wants @<cell level> and cell tuples");
    int k = parse_at_level(args.front());
    std::vector<std::vector<long>> cells;
    for (std::size_t i = 1; i < args.size(); ++i)
        cells.push_back(parse_cell_tuple(args[i], dimension, b));
    return cells_union(cells, k, b);
}

/// Shared scalar-header parsing for mesh specs and manifests.  Returns the
/// value for `key` and marks it consumed.
struct ScalarHeader {
    long dimension = -1, degree = -1, base = -1, levels = -1;

    bool consume(const std::string& key, const std::string& value) {
        long* slot = nullptr;
        if (key == "dimension")
            slot = &dimension;
        else if (key == "degree")
            slot = &degree;
        else if (key == "base")
            slot = &base;
        else if (key == "levels")
            slot = &levels;
        else
            return false;
        if (*slot != -1) throw parse_error("duplicate " + key + " line");
        *slot = parse_long(value, key);
        return true;
    }

    void require_complete(const std::string& what) const {
        if (dimension < 0 || degree < 0 || base < 0 || levels < 0)
            throw parse_error(what + " needs dimension, degree, base and levels lines");
    }
};

} // namespace io_detail

inline HierarchicalMesh load_mesh_spec(const std::filesystem::path& path) {
    auto lines = io_detail::file_lines(path);
    if (lines.empty() || lines[0] != "mesh")
        throw parse_error(path.string() + ": first line must be `mesh`");
    io_detail::ScalarHeader header;
    struct LevelLine {
        int ell;
        std::string kind, rest;
    };
    std::vector<LevelLine> level_lines;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        auto toks = io_detail::tokens(line);
        if (toks[0] == "level") {
            std::size_t eq = line.find('=');
            if (toks.size() < 3 || eq == std::string::npos)
                throw parse_error("level line wants `level <ell> automaton|pattern = ...`: " +
                                  line);
            LevelLine ll;
            ll.ell = static_cast<int>(io_detail::parse_long(toks[1], "subdomain index"));
            ll.kind = toks[2];
            ll.rest = io_detail::trim(line.substr(eq + 1));
            if (ll.kind != "automaton" && ll.kind != "pattern")
                throw parse_error("level line wants automaton or pattern, got " + ll.kind);
            level_lines.push_back(std::move(ll));
        } else if (auto kv = io_detail::key_value(line)) {
            if (!header.consume(kv->first, kv->second))
                throw parse_error("unknown mesh key: " + kv->first);
        } else {
            throw parse_error("unrecognized mesh line: " + line);
        }
    }
    header.require_complete("mesh spec");
    HierarchicalMesh M;
    M.dimension = static_cast<int>(header.dimension);
    M.degree = static_cast<int>(header.degree);
    M.base = Base(static_cast<int>(header.base));
    M.levels = static_cast<int>(header.levels);
    M.languages.assign(static_cast<std::size_t>(std::max(0L, header.levels - 1)), SyncAutomaton{});
    std::vector<bool> seen(M.languages.size(), false);
    for (const auto& ll : level_lines) {
        if (ll.ell < 1 || ll.ell > M.levels - 1)
            throw parse_error("subdomain index out of range: " + std::to_string(ll.ell));
        if (seen[static_cast<std::size_t>(ll.ell - 1)])
            throw parse_error("duplicate subdomain " + std::to_string(ll.ell));
        seen[static_cast<std::size_t>(ll.ell - 1)] = true;
        SyncAutomaton lang;
        if (ll.kind == "automaton") {
            lang = load_automaton(path.parent_path() / ll.rest);
        } else {
            auto args = io_detail::tokens(ll.rest);
            if (args.empty()) throw parse_error("empty pattern for subdomain");
            std::string gen = args.front();
            args.erase(args.begin());
            if (gen == "box")
                lang = io_detail::pattern_box(args, M.dimension, M.base);
            else if (gen == "periodic")
                lang = io_detail::pattern_periodic(args, M.dimension, M.base);
            else if (gen == "cells")
                lang = io_detail::pattern_cells(args, M.dimension, M.base);
            else
                throw parse_error("unknown pattern generator: " + gen);
        }
        M.languages[static_cast<std::size_t>(ll.ell - 1)] = std::move(lang);
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (!seen[i]) throw parse_error("missing subdomain " + std::to_string(i + 1));
    validate_mesh(M);
    return M;
}

/// Writes the spec plus one automaton file per subdomain, named
/// `<stem>.L<ell>.aut` next to the spec.
inline void save_mesh_spec(const HierarchicalMesh& M, const std::filesystem::path& path) {
    validate_mesh(M);
    std::string stem = path.stem().string();
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write " + path.string());
    out << "mesh\n";
    out << "dimension = " << M.dimension << "\n";
    out << "degree = " << M.degree << "\n";
    out << "base = " << M.base.value << "\n";
    out << "levels = " << M.levels << "\n";
    for (int ell = 1; ell <= M.levels - 1; ++ell) {
        std::string name = stem + ".L" + std::to_string(ell) + ".aut";
        save_automaton(M.language(ell), path.parent_path() / name);
        out << "level " << ell << " automaton = " << name << "\n";
    }
    if (!out.good()) throw parse_error("write failed: " + path.string());
}

// ---------------------------------------------------------------------------
// Spline manifests.
//
//   spline
//   dimension = 1
//   degree = 3
//   base = 6
//   levels = 1
//   mesh = g.mesh
//   relation 0 = g.R0.aut
//
// One coefficient relation per cell level 0..levels-1; the mesh path resolves
// relative to the manifest.

struct SplineBundle {
    HierarchicalMesh mesh;
    RegularSpline spline;
    std::filesystem::path mesh_path;
};

inline SplineBundle load_spline_manifest(const std::filesystem::path& path) {
    auto lines = io_detail::file_lines(path);
    if (lines.empty() || lines[0] != "spline")
        throw parse_error(path.string() + ": first line must be `spline`");
    io_detail::ScalarHeader header;
    std::string mesh_ref;
    std::vector<std::pair<int, std::string>> relation_lines;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        auto toks = io_detail::tokens(line);
        auto kv = io_detail::key_value(line);
        if (toks[0] == "relation") {
            if (toks.size() < 2 || !kv)
                throw parse_error("relation line wants `relation <cell level> = <path>`: " + line);
            relation_lines.emplace_back(
                static_cast<int>(io_detail::parse_long(toks[1], "cell level")), kv->second);
        } else if (kv && kv->first == "mesh") {
            if (!mesh_ref.empty()) throw parse_error("duplicate mesh line");
            mesh_ref = kv->second;
        } else if (kv && header.consume(kv->first, kv->second)) {
        } else {
            throw parse_error("unrecognized spline line: " + line);
        }
    }
    header.require_complete("spline manifest");
    if (mesh_ref.empty()) throw parse_error("spline manifest needs a mesh line");
    SplineBundle bundle;
    bundle.mesh_path = path.parent_path() / mesh_ref;
    bundle.mesh = load_mesh_spec(bundle.mesh_path);
    RegularSpline& f = bundle.spline;
    f.dimension = static_cast<int>(header.dimension);
    f.degree = static_cast<int>(header.degree);
    f.base = Base(static_cast<int>(header.base));
    f.levels = static_cast<int>(header.levels);
    if (f.dimension != bundle.mesh.dimension || f.degree != bundle.mesh.degree ||
        f.base.value != bundle.mesh.base.value || f.levels != bundle.mesh.levels)
        throw parse_error(path.string() + ": manifest and mesh disagree on shape");
    f.relations.assign(static_cast<std::size_t>(f.levels), SyncAutomaton{});
    std::vector<bool> seen(f.relations.size(), false);
    for (const auto& [lev, ref] : relation_lines) {
        if (lev < 0 || lev >= f.levels)
            throw parse_error("relation cell level out of range: " + std::to_string(lev));
        if (seen[static_cast<std::size_t>(lev)])
            throw parse_error("duplicate relation " + std::to_string(lev));
        seen[static_cast<std::size_t>(lev)] = true;
        f.relations[static_cast<std::size_t>(lev)] = load_automaton(path.parent_path() / ref);
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (!seen[i]) throw parse_error("missing relation " + std::to_string(i));
    validate_spline(f);
    return bundle;
}

/// Writes the manifest, a sibling mesh spec `<stem>.mesh` with its automata,
/// and one relation file `<stem>.R<lev>.aut` per cell level.
inline void save_spline_manifest(const RegularSpline& f, const HierarchicalMesh& M,
                                 const std::filesystem::path& path) {
    validate_spline(f);
    if (f.dimension != M.dimension || f.degree != M.degree || f.base.value != M.base.value ||
        f.levels != M.levels)
        throw usage_error("save_spline_manifest: spline and mesh shapes disagree");
    std::string stem = path.stem().string();
    std::string mesh_name = stem + ".mesh";
    save_mesh_spec(M, path.parent_path() / mesh_name);
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write " + path.string());
    out << "spline\n";
    out << "dimension = " << f.dimension << "\n";
    out << "degree = " << f.degree << "\n";
    out << "base = " << f.base.value << "\n";
    out << "levels = " << f.levels << "\n";
    out << "mesh = " << mesh_name << "\n";
    for (int lev = 0; lev < f.levels; ++lev) {
        std::string name = stem + ".R" + std::to_string(lev) + ".aut";
        save_automaton(f.relations[static_cast<std::size_t>(lev)], path.parent_path() / name);
        out << "relation " << lev << " = " << name << "\n";
    }
    if (!out.good()) throw parse_error("write failed: " + path.string());
}

// ---------------------------------------------------------------------------
// Selected-basis manifests.
//
//   kraft
//   dimension = 2
//   degree = 2
//   base = 2
//   levels = 3
//   mesh = fig1.mesh
//   level 0 = basis.K0.aut
//   clauses 0 = containment:vacuous escape:checked
//
// One anchor language per cell level; the clauses line records which parts of
// the selection rule were live at that level (the outermost level has no
// containment conjunct, the innermost no escape conjunct).

inline std::string kraft_clauses_text(int cell_level, int levels) {
    std::string containment = cell_level == 0 ? "vacuous" : "checked";
    std::string escape = cell_level == levels - 1 ? "vacuous" : "checked";
    return "containment:" + containment + " escape:" + escape;
}

inline void save_kraft_manifest(const KraftBasis& K, const std::filesystem::path& path,
                                const std::string& mesh_ref = "") {
    std::string stem = path.stem().string();
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write " + path.string());
    out << "kraft\n";
    out << "dimension = " << K.dimension << "\n";
    out << "degree = " << K.degree << "\n";
    out << "base = " << K.base.value << "\n";
    out << "levels = " << K.levels << "\n";
    if (!mesh_ref.empty()) out << "mesh = " << mesh_ref << "\n";
    for (int lev = 0; lev < K.levels; ++lev) {
        std::string name = stem + ".K" + std::to_string(lev) + ".aut";
        save_automaton(K.level(lev), path.parent_path() / name);
        out << "level " << lev << " = " << name << "\n";
        out << "clauses " << lev << " = " << kraft_clauses_text(lev, K.levels) << "\n";
    }
    if (!out.good()) throw parse_error("write failed: " + path.string());
}

inline KraftBasis load_kraft_manifest(const std::filesystem::path& path) {
    auto lines = io_detail::file_lines(path);
    if (lines.empty() || lines[0] != "kraft")
        throw parse_error(path.string() + ": first line must be `kraft`");
    io_detail::ScalarHeader header;
    std::vector<std::pair<int, std::string>> level_lines;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        auto toks = io_detail::tokens(line);
        auto kv = io_detail::key_value(line);
        if (toks[0] == "level") {
            if (toks.size() < 2 || !kv)
                throw parse_error("level line wants `level <cell level> = <path>`: " + line);
            level_lines.emplace_back(
                static_cast<int>(io_detail::parse_long(toks[1], "cell level")), kv->second);
        } else if (toks[0] == "clauses" || (kv && kv->first == "mesh")) {
            // provenance only
        } else if (kv && header.consume(kv->first, kv->second)) {
        } else {
            throw parse_error("unrecognized kraft line: " + line);
        }
    }
    header.require_complete("kraft manifest");
    KraftBasis K;
    K.dimension = static_cast<int>(header.dimension);
    K.degree = static_cast<int>(header.degree);
    K.base = Base(static_cast<int>(header.base));
    K.levels = static_cast<int>(header.levels);
    K.languages.assign(static_cast<std::size_t>(header.levels), SyncAutomaton{});
    std::vector<bool> seen(K.languages.size(), false);
    for (const auto& [lev, ref] : level_lines) {
        if (lev < 0 || lev >= K.levels)
            throw parse_error("level out of range: " + std::to_string(lev));
        if (seen[static_cast<std::size_t>(lev)])
            throw parse_error("duplicate level " + std::to_string(lev));
        seen[static_cast<std::size_t>(lev)] = true;
        K.languages[static_cast<std::size_t>(lev)] = load_automaton(path.parent_path() / ref);
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (!seen[i]) throw parse_error("missing level " + std::to_string(i));
    return K;
}

} // namespace regspline
