#pragma once
// Hierarchical dyadic meshes as languages of cell barycentres, with decision
// procedures for the two structural properties the spline constructions rely
// on: every refined cell sits inside a cell of the previous subdomain, and
// wherever a spline support pokes out of the next subdomain it does so in one
// connected piece.

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "regspline/formula.hpp"
#include "regspline/numeration.hpp"

namespace regspline {

/// Barycentre of the level-k cell with index vector `cell`: coordinate i maps
/// to (2 cell[i] + 1) / 2^(k+1).
inline Point barycentre_point(int cell_level, const std::vector<long>& cell) {
    Point p;
    p.reserve(cell.size());
    for (long i : cell) p.push_back(Rational(2 * i + 1) * pow2(-cell_level - 1));
    return p;
}

/// Inverse of barycentre_point; throws when y is not a level-k barycentre.
inline std::vector<long> cell_from_barycentre(int cell_level, const Point& y) {
    std::vector<long> idx;
    idx.reserve(y.size());
    for (const Rational& v : y) {
        Rational num = v * pow2(cell_level + 1);
        if (num.get_den() != 1 || mpz_even_p(num.get_num().get_mpz_t()))
            throw usage_error("cell_from_barycentre: " + to_string(v) +
                              " is not a level-" + std::to_string(cell_level) + " barycentre");
        Int n = (num.get_num() - 1) / 2;
        idx.push_back(n.get_si());
    }
    return idx;
}

/// Barycentres of all level-k cells in one dimension, i.e. the points
/// 1/2^(k+1) + (1/2^k) Z.  Needs a base whose prime factors include 2.
inline SyncAutomaton level_filter_1d(int cell_level, Base b) {
    if (cell_level < 0) throw usage_error("level_filter: negative level");
    return cache::memo(
        "filter1/" + std::to_string(b.value) + "/" + std::to_string(cell_level), [&] {
            SyncAutomaton lattice = multiples_automaton(pow2(-cell_level), b);
            return shift_language(lattice, Point{pow2(-cell_level - 1)}, b);
        });
}

/// d-track product of level_filter_1d: barycentres of level-k cells in R^d.
inline SyncAutomaton level_filter_automaton(int dimension, int cell_level, Base b) {
    if (dimension < 1 || dimension > kMaxTracks)
        throw usage_error("level_filter: dimension out of range");
    return cache::memo("filterd/" + std::to_string(b.value) + "/" + std::to_string(dimension) +
                           "/" + std::to_string(cell_level),
                       [&] {
                           SyncAutomaton one = level_filter_1d(cell_level, b);
                           SyncAutomaton cur = one;
                           for (int k = 1; k < dimension; ++k)
                               cur = minimize(synchronized_product(cur, identity_track_map(k),
                                                                   one, {k}, k + 1));
                           return cur;
                       });
}

/// A mesh of N nested levels.  languages[k] encodes the barycentres of the
/// level-k cells whose union is subdomain k+1, for k = 0 .. N-2; subdomain 0
/// is all of R^d and subdomain N is empty, neither is stored.
struct HierarchicalMesh {
    int dimension = 1;
    int degree = 1;
    Base base{2};
    int levels = 1;
    std::vector<SyncAutomaton> languages;

    /// Language of subdomain `ell`, ell in 1 .. levels-1 (cells of level ell-1).
    const SyncAutomaton& language(int ell) const {
        if (ell < 1 || ell > levels - 1)
            throw usage_error("mesh: no subdomain " + std::to_string(ell));
        return languages[static_cast<std::size_t>(ell - 1)];
    }
};

inline void validate_mesh(const HierarchicalMesh& M) {
    if (M.dimension < 1 || M.dimension > kMaxTracks) throw usage_error("mesh: bad dimension");
    if (M.degree < 0) throw usage_error("mesh: negative degree");
    if (M.levels < 1) throw usage_error("mesh: need at least one level");
    if (static_cast<int>(M.languages.size()) != M.levels - 1)
        throw usage_error("mesh: expected one language per refined subdomain");
    for (int ell = 1; ell <= M.levels - 1; ++ell) {
        const SyncAutomaton& L = M.language(ell);
        if (L.alphabet.tracks != M.dimension)
            throw usage_error("mesh: subdomain " + std::to_string(ell) + " has wrong track count");
        if (L.alphabet.base != M.base.value)
            throw usage_error("mesh: subdomain " + std::to_string(ell) + " has wrong base");
        if (!is_subset(L, level_filter_automaton(M.dimension, ell - 1, M.base)))
            throw usage_error("mesh: subdomain " + std::to_string(ell) +
                              " holds points that are not level-" + std::to_string(ell - 1) +
                              " barycentres");
    }
    if (M.levels > 1 && is_empty(M.languages.back()))
        throw usage_error("mesh: finest subdomain is empty, drop the level instead");
}

/// Outcome of a structural check.  For nestedness `level` is the subdomain
/// whose cell escaped and `witness` its barycentre; for the support check
/// `level` is the cell level of the anchor, `witness` the anchor barycentre
/// and `uncovered` the split set of support offsets.
struct MeshCheckResult {
    bool ok = true;
    int level = 0;
    std::optional<Point> witness;
    std::vector<std::vector<long>> uncovered;
};

/// Every cell of subdomain ell must lie inside a cell of subdomain ell-1.
/// The parent barycentre sits at one of the 2^d points u +- 1/2^ell; the
/// other sign choices are not barycentres at all, so testing the whole
/// disjunction is exact.
inline MeshCheckResult check_nested(const HierarchicalMesh& M) {
    validate_mesh(M);
    const int d = M.dimension;
    for (int ell = 2; ell <= M.levels - 1; ++ell) {
        FormulaContext ctx;
        ctx.base = M.base;
        ctx.dimension = d;
        ctx.languages["child"] = M.language(ell);
        ctx.languages["parent"] = M.language(ell - 1);
        std::vector<FormulaPtr> parent_hits;
        for (unsigned mask = 0; mask < (1u << d); ++mask) {
            Point off(static_cast<std::size_t>(d));
            for (int k = 0; k < d; ++k)
                off[static_cast<std::size_t>(k)] =
                    ((mask >> k) & 1 ? 1 : -1) * pow2(-ell);
            parent_hits.push_back(f_in(term_var_plus("u", std::move(off)), "parent"));
        }
        FormulaPtr sentence = f_forall(
            "u", f_implies(f_in(term_var("u", d), "child"), f_or(std::move(parent_hits))));
        auto [ok, wit] = check_universal(sentence, ctx);
        if (!ok) return {false, ell, wit, {}};
    }
    return {};
}

/// Index offsets of the support cells of a degree-m spline relative to its
/// anchor cell, in lexicographic order: per coordinate the m+1 integers
/// centred on 0, shifted down by one half step when m is odd.
inline std::vector<std::vector<long>> support_offsets(int m, int dimension) {
    if (m < 0 || dimension < 1) throw usage_error("support_offsets: bad parameters");
    long lo = m % 2 == 0 ? -(m / 2) : -((m + 1) / 2);
    std::vector<std::vector<long>> out;
    std::vector<long> cur(static_cast<std::size_t>(dimension), lo);
    while (true) {
        out.push_back(cur);
        int k = dimension - 1;
        while (k >= 0 && cur[static_cast<std::size_t>(k)] == lo + m) {
            cur[static_cast<std::size_t>(k)] = lo;
            --k;
        }
        if (k < 0) break;
        ++cur[static_cast<std::size_t>(k)];
    }
    return out;
}

/// Whether the given cell indices form one component under the adjacency that
/// also counts touching corners (Chebyshev distance one).
inline bool offsets_connected(const std::vector<std::vector<long>>& cells) {
    std::size_t n = cells.size();
    std::vector<std::size_t> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            bool touch = true;
            for (std::size_t k = 0; k < cells[i].size() && touch; ++k)
                touch = std::labs(cells[i][k] - cells[j][k]) <= 1;
            if (touch) parent[find(i)] = find(j);
        }
    for (std::size_t i = 1; i < n; ++i)
        if (find(i) != find(0)) return false;
    return true;
}

/// All nonempty connected subsets of the degree-m support offsets, as bit
/// masks over the lexicographic offset order.  Exponential in (m+1)^d, so it
/// refuses more than 16 offsets; for single sets use offsets_connected.
inline std::vector<std::uint32_t> connected_subsets(int m, int dimension) {
    auto offs = support_offsets(m, dimension);
    std::size_t n = offs.size();
    if (n > 16) throw resource_error("connected_subsets: too many support cells to enumerate");
    std::vector<std::uint32_t> out;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        std::vector<std::vector<long>> sel;
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1) sel.push_back(offs[i]);
        if (offsets_connected(sel)) out.push_back(mask);
    }
    return out;
}

namespace detail {

inline State dfa_start(const SyncAutomaton& a) {
    return a.initial.empty() ? kNoState : a.initial.front();
}

inline State dfa_step(const SyncAutomaton& a, State s, Letter l) {
    if (s == kNoState) return kNoState;
    auto [lo, hi] = letter_range(a.edges[s], l);
    return lo == hi ? kNoState : a.edges[s][lo].second;
}

} // namespace detail

/// For every anchor cell at each level, the set of support cells that are not
/// contained in the next subdomain must be connected.  Explores the product
/// of the level filter with one shifted copy of the next subdomain language
/// per support offset, breadth first with letters ascending, so a failure is
/// reported at the shortest, then lexicographically smallest, anchor word.
inline MeshCheckResult check_assumption_b(const HierarchicalMesh& M) {
    validate_mesh(M);
    const int d = M.dimension;
    const int m = M.degree;
    auto offs = support_offsets(m, d);
    const std::size_t n_atoms = offs.size();
    if (n_atoms > 25) throw resource_error("support check: more than 25 support cells");

    std::map<std::uint32_t, bool> conn_memo;
    auto mask_connected = [&](std::uint32_t mask) {
        auto it = conn_memo.find(mask);
        if (it != conn_memo.end()) return it->second;
        std::vector<std::vector<long>> sel;
        for (std::size_t i = 0; i < n_atoms; ++i)
            if (mask >> i & 1) sel.push_back(offs[i]);
        bool c = offsets_connected(sel);
        conn_memo.emplace(mask, c);
        return c;
    };

    for (int lev = 0; lev + 2 <= M.levels; ++lev) {
        const SyncAutomaton& filter = level_filter_automaton(d, lev, M.base);
        const SyncAutomaton& next = M.language(lev + 1);
        std::vector<SyncAutomaton> atoms;
        atoms.reserve(n_atoms);
        for (const auto& off : offs) {
            Point t(static_cast<std::size_t>(d));
            for (int k = 0; k < d; ++k)
                t[static_cast<std::size_t>(k)] =
                    -Rational(off[static_cast<std::size_t>(k)]) * pow2(-lev);
            atoms.push_back(shift_language(next, t, M.base));
        }

        struct Node {
            std::vector<State> key; // filter state then one state per atom
            std::size_t parent;
            Letter letter;
        };
        std::vector<Node> nodes;
        std::map<std::vector<State>, std::size_t> seen;
        std::vector<State> start(n_atoms + 1);
        start[0] = detail::dfa_start(filter);
        for (std::size_t i = 0; i < n_atoms; ++i) start[i + 1] = detail::dfa_start(atoms[i]);
        nodes.push_back({start, SIZE_MAX, 0});
        seen.emplace(start, 0);

        for (std::size_t cur = 0; cur < nodes.size(); ++cur) {
            const std::vector<State> key = nodes[cur].key;
            State fs = key[0];
            if (fs == kNoState) continue;
            if (filter.accepting[fs]) {
                std::uint32_t mask = 0;
                for (std::size_t i = 0; i < n_atoms; ++i) {
                    State as = key[i + 1];
                    if (as == kNoState || !atoms[i].accepting[as]) mask |= 1u << i;
                }
                if (mask != 0 && !mask_connected(mask)) {
                    std::vector<Letter> letters;
                    for (std::size_t at = cur; at != 0; at = nodes[at].parent)
                        letters.push_back(nodes[at].letter);
                    std::reverse(letters.begin(), letters.end());
                    Point anchor =
                        decode_point(encodings_from_word({filter.alphabet, letters}));
                    std::vector<std::vector<long>> split;
                    for (std::size_t i = 0; i < n_atoms; ++i)
                        if (mask >> i & 1) split.push_back(offs[i]);
                    return {false, lev, anchor, split};
                }
            }
            for (auto [l, to] : filter.edges[fs]) {
                std::vector<State> nxt(n_atoms + 1);
                nxt[0] = to;
                for (std::size_t i = 0; i < n_atoms; ++i)
                    nxt[i + 1] = detail::dfa_step(atoms[i], key[i + 1], l);
                auto [it, inserted] = seen.emplace(nxt, nodes.size());
                if (inserted) {
                    nodes.push_back({std::move(nxt), cur, l});
                    check_state_budget(nodes.size(), "support check");
                }
            }
        }
    }
    return {};
}

/// Cells of a level-k barycentre language whose index vectors lie in the box
/// [lo, hi) per coordinate, by direct membership tests.
inline std::vector<std::vector<long>> cells_in_box(const SyncAutomaton& lang, int cell_level,
                                                   const std::vector<long>& lo,
                                                   const std::vector<long>& hi, Base b) {
    int d = lang.alphabet.tracks;
    if (static_cast<int>(lo.size()) != d || static_cast<int>(hi.size()) != d)
        throw usage_error("cells_in_box: dimension mismatch");
    std::vector<std::vector<long>> out;
    std::vector<long> cur(lo);
    for (int k = 0; k < d; ++k)
        if (lo[static_cast<std::size_t>(k)] >= hi[static_cast<std::size_t>(k)]) return out;
    while (true) {
        if (contains_point(lang, barycentre_point(cell_level, cur), b)) out.push_back(cur);
        int k = d - 1;
        while (k >= 0 && cur[static_cast<std::size_t>(k)] + 1 >= hi[static_cast<std::size_t>(k)]) {
            cur[static_cast<std::size_t>(k)] = lo[static_cast<std::size_t>(k)];
            --k;
        }
        if (k < 0) break;
        ++cur[static_cast<std::size_t>(k)];
    }
    return out;
}

} // namespace regspline
