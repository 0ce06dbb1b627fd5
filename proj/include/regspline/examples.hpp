#pragma once
// Ready-made meshes used across the tests and exposed by the command line
// tool: a finite three-level window mesh with three refined islands, and two
// unbounded periodic three-level meshes (a checkerboard and a stack of
// horizontal slabs).

#include <vector>

#include "regspline/spline.hpp"

namespace regspline::examples {

/// Union of the barycentre words of an explicit list of level-k cells.
inline SyncAutomaton cells_language(const std::vector<std::vector<long>>& cells, int cell_level,
                                    Base b) {
    if (cells.empty()) throw usage_error("cells_language: empty cell list");
    SyncAutomaton out;
    bool first = true;
    for (const auto& c : cells) {
        SyncAutomaton one = constant_point_automaton(barycentre_point(cell_level, c), b);
        out = first ? std::move(one) : union_of(out, one);
        first = false;
    }
    return minimize(out);
}

/// Level-0 cells of the first subdomain of the window mesh: three islands in
/// a 9 by 5 window, two of them linked to the boundary rows by single cells.
inline std::vector<std::vector<long>> fig1_domain1() {
    return {{3, 4}, {4, 4}, {5, 4},                                  // top bar
            {7, 1}, {8, 1}, {7, 2}, {8, 2}, {7, 3}, {8, 3}, {6, 2},  // right block
            {0, 1}, {1, 1}, {0, 2}, {1, 2}, {0, 3}, {1, 3}, {2, 2},  // left block
            {3, 0}, {4, 0}, {5, 0}};                                 // bottom bar
}

/// Level-1 cells of the second subdomain: two small blobs against the bars
/// and two one-cell-wide staircases inside the blocks.
inline std::vector<std::vector<long>> fig1_domain2() {
    return {{7, 0},  {8, 0},  {9, 0},  {10, 0}, {8, 1},  {9, 1},   // bottom blob
            {7, 9},  {8, 9},  {9, 9},  {10, 9}, {8, 8},  {9, 8},   // top blob
            {16, 7}, {16, 6}, {15, 6}, {15, 5}, {14, 5}, {14, 4},  // right staircase
            {15, 4}, {15, 3}, {16, 3}, {16, 2},
            {1, 2},  {1, 3},  {2, 3},  {2, 4},  {3, 4},  {3, 5},  // left staircase
            {2, 5},  {2, 6},  {1, 6},  {1, 7}};
}

inline HierarchicalMesh fig1_mesh(int degree = 2, Base b = Base{2}) {
    HierarchicalMesh M;
    M.dimension = 2;
    M.degree = degree;
    M.base = b;
    M.levels = 3;
    M.languages.push_back(cells_language(fig1_domain1(), 0, b));
    M.languages.push_back(cells_language(fig1_domain2(), 1, b));
    return M;
}

/// Checkerboard: both subdomains cover the unit cells with even coordinate
/// sum, the second one subdivided once.
inline HierarchicalMesh fig5_left_mesh(int degree = 2, Base b = Base{2}) {
    Rational h = make_rational(1, 2), q = make_rational(1, 4), t = make_rational(3, 4);
    std::vector<Point> span = {{Rational(1), Rational(1)}, {Rational(1), Rational(-1)}};
    HierarchicalMesh M;
    M.dimension = 2;
    M.degree = degree;
    M.base = b;
    M.levels = 3;
    M.languages.push_back(lattice_language({{h, h}}, span, b));
    M.languages.push_back(lattice_language({{q, q}, {q, t}, {t, q}, {t, t}}, span, b));
    return M;
}

/// Slabs: the first subdomain keeps every other horizontal unit strip, the
/// second keeps the upper half of each kept strip.
inline HierarchicalMesh fig5_right_mesh(int degree = 2, Base b = Base{2}) {
    Rational h = make_rational(1, 2), q = make_rational(1, 4), t = make_rational(3, 4);
    HierarchicalMesh M;
    M.dimension = 2;
    M.degree = degree;
    M.base = b;
    M.levels = 3;
    M.languages.push_back(
        lattice_language({{h, h}}, {{Rational(1), Rational(0)}, {Rational(0), Rational(2)}}, b));
    M.languages.push_back(
        lattice_language({{q, t}}, {{h, Rational(0)}, {Rational(0), Rational(2)}}, b));
    return M;
}

/// Three levels over every other unit interval mirrored around zero ([0,1],
/// [2,3], ... and [-1,0], [-3,-2], ...); the second subdomain covers the same
/// region one level finer, so no level-1 spline support fits strictly between
/// the two.
inline HierarchicalMesh alternating_mesh(int degree = 3, Base b = Base{2}) {
    HierarchicalMesh M;
    M.dimension = 1;
    M.degree = degree;
    M.base = b;
    M.levels = 3;
    SyncAutomaton pos = positive_automaton(b), neg = negative_automaton(b);
    auto lat = [&](const Rational& t) { return lattice_language({{t}}, {{Rational(2)}}, b); };
    M.languages.push_back(minimize(union_of(intersect(lat(make_rational(1, 2)), pos),
                                            intersect(lat(make_rational(-1, 2)), neg))));
    M.languages.push_back(minimize(union_of(
        intersect(union_of(lat(make_rational(1, 4)), lat(make_rational(3, 4))), pos),
        intersect(union_of(lat(make_rational(-1, 4)), lat(make_rational(-3, 4))), neg))));
    return M;
}

/// Uniform one-level mesh in a given dimension, default degree 3.
inline HierarchicalMesh uniform_mesh(int dimension = 1, int degree = 3, Base b = Base{2}) {
    HierarchicalMesh M;
    M.dimension = dimension;
    M.degree = degree;
    M.base = b;
    M.levels = 1;
    return M;
}

/// Cubic spline on the uniform mesh whose coefficients alternate between 1
/// and -1 on every fourth anchor and vanish elsewhere, written in base 6 so
/// that thirds stay representable when it is later subdivided.
inline RegularSpline spline_g(Base b = Base{6}) {
    SyncAutomaton filter = level_filter_automaton(1, 0, b);
    auto lat8 = [&](const Rational& t) { return lattice_language({{t}}, {{Rational(8)}}, b); };
    SyncAutomaton plus = lat8(make_rational(5, 2));
    SyncAutomaton minus = lat8(make_rational(13, 2));
    SyncAutomaton zero = difference(filter, union_of(plus, minus));
    auto with_coeff = [&](const SyncAutomaton& lang, const Rational& c) {
        return synchronized_product(lang, {0}, constant_point_automaton({c}, b), {1}, 2);
    };
    RegularSpline g;
    g.dimension = 1;
    g.degree = 3;
    g.base = b;
    g.levels = 1;
    g.relations.push_back(minimize(union_of(
        union_of(with_coeff(plus, Rational(1)), with_coeff(minus, Rational(-1))),
        with_coeff(zero, Rational(0)))));
    return g;
}

/// Cubic spline over the alternating three-level mesh: zero on the coarse
/// level, nothing selectable on the middle level, and a two-sided ramp on the
/// finest level (coefficients grow linearly away from the origin on the kept
/// intervals, with the three anchors nearest zero pinned to zero).
inline RegularSpline spline_h(Base b = Base{2}) {
    SyncAutomaton pos = positive_automaton(b), neg = negative_automaton(b);
    auto lat2 = [&](const Rational& t) { return lattice_language({{t}}, {{Rational(2)}}, b); };

    SyncAutomaton s0 = synchronized_product(level_filter_automaton(1, 0, b), {0},
                                            constant_point_automaton({Rational(0)}, b), {1}, 2);
    SyncAutomaton s1;
    s1.alphabet = TrackAlphabet(b.value, 2);
    s1.deterministic = true;

    SyncAutomaton up = intersect(lat2(make_rational(5, 8)), pos);
    SyncAutomaton down = intersect(lat2(make_rational(13, 8)), neg);
    SyncAutomaton rel_up =
        restrict_anchors(affine_relation({make_rational(1, 2)}, make_rational(11, 16), b), up);
    SyncAutomaton rel_down =
        restrict_anchors(affine_relation({make_rational(-1, 2)}, make_rational(13, 16), b), down);
    SyncAutomaton zeros = synchronized_product(
        cells_language({{-1}, {0}, {1}}, 2, b), {0},
        constant_point_automaton({Rational(0)}, b), {1}, 2);
    SyncAutomaton s2 = minimize(union_of(union_of(rel_up, rel_down), zeros));

    RegularSpline h;
    h.dimension = 1;
    h.degree = 3;
    h.base = b;
    h.levels = 3;
    h.relations = {s0, s1, s2};
    return h;
}

} // namespace regspline::examples
