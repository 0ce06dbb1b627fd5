#pragma once
// Mesh refinement and the matching spline rewrite.  Appending a finer
// subdomain deselects every coarse anchor whose whole support the new
// subdomain swallows; the deselected coefficients are pushed one level down
// through the binomial subdivision stencil, so the refined spline is the same
// function with its finest coefficients expressed on the finer anchors.

#include "regspline/spline.hpp"

namespace regspline {

/// Weights lambda_j = binom(m+1, j) / 2^m, j = 0 .. m+1: a degree-m spline on
/// integer knots is the weighted sum of its half-knot translates.
inline std::vector<Rational> subdivision_stencil(int m) {
    if (m < 0) throw usage_error("subdivision_stencil: negative degree");
    std::vector<Rational> w;
    Rational binom(1);
    for (int j = 0; j <= m + 1; ++j) {
        w.push_back(binom * pow2(-m));
        binom = binom * (m + 1 - j) / (j + 1);
    }
    return w;
}

/// Append one more subdomain, given as the language of barycentres of the
/// level-(N-1) cells it consists of, and verify the result is still nested.
inline HierarchicalMesh refine_mesh(const HierarchicalMesh& M, const SyncAutomaton& next_level) {
    validate_mesh(M);
    HierarchicalMesh out = M;
    out.levels += 1;
    out.languages.push_back(minimize(next_level));
    validate_mesh(out);
    MeshCheckResult nested = check_nested(out);
    if (!nested.ok)
        throw usage_error("refine: new subdomain leaves its parent at subdomain " +
                          std::to_string(nested.level));
    return out;
}

struct RefinedSpline {
    HierarchicalMesh mesh;
    RegularSpline spline;
};

/// Rewrite f over the refined mesh.  Coarse levels are untouched, the old
/// finest level keeps only the anchors that stay selected, and the new finest
/// level receives the subdivided mass of the deselected ones (zero where no
/// mass arrives).  An empty next level returns f unchanged.
inline RefinedSpline refine_spline(const RegularSpline& f, const HierarchicalMesh& M,
                                   const SyncAutomaton& next_level) {
    validate_spline(f);
    validate_mesh(M);
    if (f.dimension != M.dimension || f.degree != M.degree || f.levels != M.levels ||
        f.base.value != M.base.value)
        throw usage_error("refine: spline and mesh shapes differ");
    if (is_empty(next_level)) return {M, f};

    const int d = f.dimension, m = f.degree, N = f.levels;
    const Base b = f.base;

    RefinedSpline out;
    out.mesh = refine_mesh(M, next_level);

    SyncAutomaton coarse_sel = kraft_level_language(M, N - 1);
    SyncAutomaton kept_sel = kraft_level_language(out.mesh, N - 1);
    SyncAutomaton fine_sel = kraft_level_language(out.mesh, N);
    SyncAutomaton dropped = minimize(difference(coarse_sel, kept_sel));

    out.spline = f;
    out.spline.levels = N + 1;
    out.spline.relations[static_cast<std::size_t>(N - 1)] =
        restrict_anchors(f.relations[static_cast<std::size_t>(N - 1)], kept_sel);

    SyncAutomaton moved = restrict_anchors(f.relations[static_cast<std::size_t>(N - 1)], dropped);
    const std::vector<Rational> stencil = subdivision_stencil(m);
    SyncAutomaton zero_coeff = constant_point_automaton({Rational(0)}, b);
    auto zeros_on = [&](const SyncAutomaton& anchors) {
        return synchronized_product(anchors, detail::iota_tracks(d), zero_coeff, {d}, d + 1);
    };

    SyncAutomaton acc = zeros_on(fine_sel);
    std::vector<int> j(static_cast<std::size_t>(d), 0);
    while (true) {
        // Fine anchor z descends from coarse anchor z + q with weight w.
        Point shift(static_cast<std::size_t>(d) + 1, Rational(0));
        Rational w(1);
        for (int k = 0; k < d; ++k) {
            int jk = j[static_cast<std::size_t>(k)];
            shift[static_cast<std::size_t>(k)] =
                -Rational((m % 2 == 1 ? m + 2 : m + 1) - 2 * jk) * pow2(-N - 1);
            w *= stencil[static_cast<std::size_t>(jk)];
        }
        SyncAutomaton term = restrict_anchors(shift_language(moved, shift, b), fine_sel);
        SyncAutomaton missing = difference(fine_sel, relation_domain(term));
        term = minimize(union_of(term, zeros_on(missing)));
        acc = add_coefficient_relations(acc, scale_coefficients(term, w, b), b);

        int k = d - 1;
        while (k >= 0 && j[static_cast<std::size_t>(k)] == m + 1) {
            j[static_cast<std::size_t>(k)] = 0;
            --k;
        }
        if (k < 0) break;
        ++j[static_cast<std::size_t>(k)];
    }
    out.spline.relations.push_back(acc);
    return out;
}

} // namespace regspline
