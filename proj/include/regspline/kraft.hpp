#pragma once
// Per-level selection of basis splines over a hierarchical mesh.  A degree-m
// spline anchored at a level-k cell is kept when its whole support lies in
// subdomain k while at least one support cell escapes subdomain k+1, so each
// point of the domain is covered by the right levels and nothing is counted
// twice.

#include <vector>

#include "regspline/mesh.hpp"

namespace regspline {

struct KraftBasis {
    int dimension = 1;
    int degree = 1;
    Base base{2};
    int levels = 1;
    std::vector<SyncAutomaton> languages; // anchor language per cell level 0 .. levels-1

    const SyncAutomaton& level(int cell_level) const {
        if (cell_level < 0 || cell_level >= levels)
            throw usage_error("basis: no cell level " + std::to_string(cell_level));
        return languages[static_cast<std::size_t>(cell_level)];
    }
};

/// Anchor language of the selected degree-m splines at one cell level:
/// anchors whose support cells all have their parent barycentre in the own
/// subdomain language, minus anchors whose support cells all belong to the
/// next subdomain.  The outermost level skips the containment clause (the
/// whole space), the innermost skips the escape clause (nothing below).
inline SyncAutomaton kraft_level_language(const HierarchicalMesh& M, int cell_level) {
    if (cell_level < 0 || cell_level >= M.levels)
        throw usage_error("kraft_level_language: cell level out of range");
    const int d = M.dimension;
    const Base b = M.base;
    auto offs = support_offsets(M.degree, d);

    SyncAutomaton out = level_filter_automaton(d, cell_level, b);
    if (cell_level >= 1) {
        const SyncAutomaton& own = M.language(cell_level);
        // Parents of level-k cells sit at the 2^d corner offsets of half a
        // cell; only the true one is a coarser barycentre at all.
        SyncAutomaton parent_hit;
        bool first = true;
        for (unsigned mask = 0; mask < (1u << d); ++mask) {
            Point s(static_cast<std::size_t>(d));
            for (int k = 0; k < d; ++k)
                s[static_cast<std::size_t>(k)] =
                    ((mask >> k) & 1 ? -1 : 1) * pow2(-cell_level - 1);
            SyncAutomaton shifted = shift_language(own, s, b);
            parent_hit = first ? std::move(shifted) : union_of(parent_hit, shifted);
            first = false;
        }
        parent_hit = minimize(parent_hit);
        for (const auto& off : offs) {
            Point t(static_cast<std::size_t>(d));
            for (int k = 0; k < d; ++k)
                t[static_cast<std::size_t>(k)] =
                    -Rational(off[static_cast<std::size_t>(k)]) * pow2(-cell_level);
            out = minimize(intersect(out, shift_language(parent_hit, t, b)));
        }
    }
    if (cell_level + 1 <= M.levels - 1) {
        const SyncAutomaton& next = M.language(cell_level + 1);
        SyncAutomaton all_in;
        bool first = true;
        for (const auto& off : offs) {
            Point t(static_cast<std::size_t>(d));
            for (int k = 0; k < d; ++k)
                t[static_cast<std::size_t>(k)] =
                    -Rational(off[static_cast<std::size_t>(k)]) * pow2(-cell_level);
            SyncAutomaton shifted = shift_language(next, t, b);
            all_in = first ? std::move(shifted) : minimize(intersect(all_in, shifted));
            first = false;
        }
        out = difference(out, all_in);
    }
    return minimize(out);
}

/// Builds the full basis.  The construction is only meaningful on a nested
/// mesh, so nestedness is verified first; pass force to skip that (when the
/// caller has already checked).
inline KraftBasis build_kraft_languages(const HierarchicalMesh& M, bool force = false) {
    validate_mesh(M);
    if (!force) {
        MeshCheckResult res = check_nested(M);
        if (!res.ok)
            throw usage_error("kraft: mesh is not nested at subdomain " +
                              std::to_string(res.level));
    }
    KraftBasis basis;
    basis.dimension = M.dimension;
    basis.degree = M.degree;
    basis.base = M.base;
    basis.levels = M.levels;
    basis.languages.reserve(static_cast<std::size_t>(M.levels));
    for (int lev = 0; lev < M.levels; ++lev) basis.languages.push_back(kraft_level_language(M, lev));
    return basis;
}

} // namespace regspline
