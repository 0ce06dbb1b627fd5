#pragma once
// Splines over a hierarchical mesh as coefficient relations: one automaton
// per cell level whose words pair an anchor barycentre (first d tracks) with
// the coefficient of the spline anchored there (last track).  Evaluation at a
// rational point intersects each relation with the band of anchors whose
// support contains the point and sums the surviving terms exactly.

#include <vector>

#include "regspline/kraft.hpp"

namespace regspline {

struct RegularSpline {
    int dimension = 1;
    int degree = 1;
    Base base{2};
    int levels = 1;
    std::vector<SyncAutomaton> relations; // d+1 tracks, per cell level 0 .. levels-1
};

/// The degree-m cardinal spline with knots 0..m+1, evaluated exactly.  The
/// degree-0 box is half open on the right so the boxes tile the line.
inline Rational cardinal_bspline(int m, const Rational& t) {
    if (m < 0) throw usage_error("cardinal_bspline: negative degree");
    if (m == 0) return t >= 0 && t < 1 ? Rational(1) : Rational(0);
    if (t <= 0 || t >= m + 1) return Rational(0);
    std::vector<Rational> col(static_cast<std::size_t>(m) + 1);
    for (int i = 0; i <= m; ++i)
        col[static_cast<std::size_t>(i)] = t >= i && t < i + 1 ? Rational(1) : Rational(0);
    for (int k = 1; k <= m; ++k)
        for (int i = 0; i + k <= m; ++i)
            col[static_cast<std::size_t>(i)] =
                (t - i) / k * col[static_cast<std::size_t>(i)] +
                (Rational(i + k + 1) - t) / k * col[static_cast<std::size_t>(i) + 1];
    return col[0];
}

namespace detail {

inline std::vector<int> iota_tracks(int n, int from = 0) {
    std::vector<int> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = from + i;
    return v;
}

/// Language of one coordinate lying strictly between lo and hi.
inline SyncAutomaton open_interval(const Rational& lo, const Rational& hi, Base b) {
    return minimize(intersect(shift_language(positive_automaton(b), {lo}, b),
                              shift_language(negative_automaton(b), {hi}, b)));
}

} // namespace detail

/// Relation {(y, a0 + sum_k alpha_k y_k)} over all valid points y.
inline SyncAutomaton affine_relation(const std::vector<Rational>& alpha, const Rational& alpha0,
                                     Base b) {
    const int d = static_cast<int>(alpha.size());
    if (d < 1 || d + 3 > kMaxTracks) throw usage_error("affine_relation: dimension out of range");
    SyncAutomaton cur = synchronized_product(valid_encoding_automaton(b, d), detail::iota_tracks(d),
                                             constant_point_automaton({alpha0}, b), {d}, d + 1);
    for (int k = 0; k < d; ++k) {
        SyncAutomaton tmp =
            synchronized_product(cur, detail::iota_tracks(d + 1),
                                 scalar_multiple_automaton(alpha[static_cast<std::size_t>(k)], b),
                                 {k, d + 1}, d + 2);
        tmp = synchronized_product(tmp, detail::iota_tracks(d + 2), addition_automaton(b, 1),
                                   {d, d + 1, d + 2}, d + 3);
        std::vector<int> keep = detail::iota_tracks(d);
        keep.push_back(d + 2);
        cur = minimize(project(tmp, keep));
    }
    return cur;
}

/// Restrict the anchor tracks of a coefficient relation to a language.
inline SyncAutomaton restrict_anchors(const SyncAutomaton& rel, const SyncAutomaton& anchors) {
    int d = anchors.alphabet.tracks;
    return minimize(synchronized_product(rel, detail::iota_tracks(d + 1), anchors,
                                         detail::iota_tracks(d), d + 1));
}

/// Anchor language of a coefficient relation.
inline SyncAutomaton relation_domain(const SyncAutomaton& rel) {
    return minimize(project(rel, detail::iota_tracks(rel.alphabet.tracks - 1)));
}

/// Whether no anchor carries two different coefficients.
inline bool relation_functional(const SyncAutomaton& rel, Base b) {
    const int d = rel.alphabet.tracks - 1;
    std::vector<int> left = detail::iota_tracks(d);
    left.push_back(d);
    std::vector<int> right = detail::iota_tracks(d);
    right.push_back(d + 1);
    SyncAutomaton joined = synchronized_product(rel, left, rel, right, d + 2);
    SyncAutomaton agree = synchronized_product(equality_automaton(b, 1), {d, d + 1},
                                               valid_encoding_automaton(b, d),
                                               detail::iota_tracks(d), d + 2);
    return is_empty(difference(joined, agree));
}

/// Pointwise sum of two coefficient relations over the same anchor language:
/// anchors in only one of them are dropped, so keep relations total per level.
inline SyncAutomaton add_coefficient_relations(const SyncAutomaton& r1, const SyncAutomaton& r2,
                                               Base b) {
    const int d = r1.alphabet.tracks - 1;
    if (d + 3 > kMaxTracks) throw usage_error("add_coefficient_relations: dimension too large");
    std::vector<int> left = detail::iota_tracks(d);
    left.push_back(d);
    std::vector<int> right = detail::iota_tracks(d);
    right.push_back(d + 1);
    SyncAutomaton tmp = synchronized_product(r1, left, r2, right, d + 2);
    tmp = synchronized_product(tmp, detail::iota_tracks(d + 2), addition_automaton(b, 1),
                               {d, d + 1, d + 2}, d + 3);
    std::vector<int> keep = detail::iota_tracks(d);
    keep.push_back(d + 2);
    return minimize(project(tmp, keep));
}

/// Multiply every coefficient by a fixed rational.
inline SyncAutomaton scale_coefficients(const SyncAutomaton& rel, const Rational& mu, Base b) {
    const int d = rel.alphabet.tracks - 1;
    SyncAutomaton tmp = synchronized_product(rel, detail::iota_tracks(d + 1),
                                             scalar_multiple_automaton(mu, b), {d, d + 1}, d + 2);
    std::vector<int> keep = detail::iota_tracks(d);
    keep.push_back(d + 1);
    return minimize(project(tmp, keep));
}

inline void validate_spline(const RegularSpline& f) {
    if (f.dimension < 1 || f.dimension + 1 > kMaxTracks)
        throw usage_error("spline: dimension out of range");
    if (f.degree < 0) throw usage_error("spline: negative degree");
    if (f.levels < 1 || static_cast<int>(f.relations.size()) != f.levels)
        throw usage_error("spline: expected one relation per level");
    for (const auto& rel : f.relations) {
        if (rel.alphabet.tracks != f.dimension + 1)
            throw usage_error("spline: relation needs one track per coordinate plus one");
        if (rel.alphabet.base != f.base.value) throw usage_error("spline: base mismatch");
    }
}

/// Structural soundness against a basis: every level functional, with the
/// anchor language exactly the selected anchors of that level.
inline void check_spline(const RegularSpline& f, const KraftBasis& basis) {
    validate_spline(f);
    if (f.dimension != basis.dimension || f.degree != basis.degree ||
        f.levels != basis.levels || f.base.value != basis.base.value)
        throw usage_error("check_spline: spline and basis shapes differ");
    for (int lev = 0; lev < f.levels; ++lev) {
        const SyncAutomaton& rel = f.relations[static_cast<std::size_t>(lev)];
        if (!relation_functional(rel, f.base))
            throw usage_error("check_spline: level " + std::to_string(lev) +
                              " maps an anchor to two coefficients");
        if (!are_equivalent(relation_domain(rel), basis.level(lev)))
            throw usage_error("check_spline: level " + std::to_string(lev) +
                              " does not cover exactly the selected anchors");
    }
}

/// Spline with value c everywhere, over the uniform one-level mesh.
inline RegularSpline constant_spline(const Rational& c, int dimension, int degree,
                                     Base b = Base{2}) {
    RegularSpline f;
    f.dimension = dimension;
    f.degree = degree;
    f.base = b;
    f.levels = 1;
    f.relations.push_back(
        synchronized_product(level_filter_automaton(dimension, 0, b), detail::iota_tracks(dimension),
                             constant_point_automaton({c}, b), {dimension}, dimension + 1));
    return f;
}

/// Spline equal to a0 + sum_k alpha_k x_k over the uniform one-level mesh.
/// The coefficient at anchor y is the affine form shifted by half a cell per
/// coordinate when the degree is odd.
inline RegularSpline linear_spline(const std::vector<Rational>& alpha, const Rational& alpha0,
                                   int degree, Base b = Base{2}) {
    const int d = static_cast<int>(alpha.size());
    Rational a0 = alpha0;
    if (degree % 2 == 1)
        for (const Rational& a : alpha) a0 -= a / 2;
    RegularSpline f;
    f.dimension = d;
    f.degree = degree;
    f.base = b;
    f.levels = 1;
    f.relations.push_back(
        restrict_anchors(affine_relation(alpha, a0, b), level_filter_automaton(d, 0, b)));
    return f;
}

inline RegularSpline add_splines(const RegularSpline& f, const RegularSpline& g) {
    validate_spline(f);
    validate_spline(g);
    if (f.dimension != g.dimension || f.degree != g.degree || f.levels != g.levels ||
        f.base.value != g.base.value)
        throw usage_error("add_splines: shapes differ");
    RegularSpline out = f;
    for (int lev = 0; lev < f.levels; ++lev)
        out.relations[static_cast<std::size_t>(lev)] =
            add_coefficient_relations(f.relations[static_cast<std::size_t>(lev)],
                                      g.relations[static_cast<std::size_t>(lev)], f.base);
    return out;
}

inline RegularSpline scale_spline(const Rational& mu, const RegularSpline& f) {
    validate_spline(f);
    RegularSpline out = f;
    for (auto& rel : out.relations) rel = scale_coefficients(rel, mu, f.base);
    return out;
}

struct EvalMatch {
    int cell_level = 0;
    std::vector<long> anchor;
    Rational coefficient;
    Point local; // spline argument per coordinate, in (0, m+1)
};

struct EvalResult {
    Rational value;
    std::vector<EvalMatch> matches;
};

/// Exact value at x: per level, anchors whose support can contain x lie in an
/// open (half open for degree 0) band of width m+1 cells per coordinate, so
/// the banded relation is finite and at most (m+1)^d words survive.
inline EvalResult evaluate(const RegularSpline& f, const Point& x) {
    validate_spline(f);
    if (static_cast<int>(x.size()) != f.dimension) throw usage_error("evaluate: wrong dimension");
    const int d = f.dimension, m = f.degree;
    const Base b = f.base;
    std::size_t cap = 1;
    for (int k = 0; k < d; ++k) cap *= static_cast<std::size_t>(m + 1);

    EvalResult out;
    out.value = Rational(0);
    for (int lev = 0; lev < f.levels; ++lev) {
        SyncAutomaton R = f.relations[static_cast<std::size_t>(lev)];
        if (R.initial.empty()) continue;
        for (int k = 0; k < d; ++k) {
            const Rational& xk = x[static_cast<std::size_t>(k)];
            Rational lo, hi;
            if (m % 2 == 1) {
                lo = xk - Rational(m) * pow2(-lev - 1);
                hi = xk + Rational(m + 2) * pow2(-lev - 1);
            } else {
                lo = xk - Rational(m + 1) * pow2(-lev - 1);
                hi = xk + Rational(m + 1) * pow2(-lev - 1);
            }
            SyncAutomaton band = detail::open_interval(lo, hi, b);
            if (m == 0) band = union_of(band, constant_point_automaton({hi}, b));
            R = synchronized_product(R, detail::iota_tracks(d + 1), band, {k}, d + 1);
        }
        Enumeration terms = enumerate_words(minimize(R), cap + 1, 1u << 20);
        if (terms.words.size() > cap)
            throw usage_error("evaluate: level " + std::to_string(lev) +
                              " matches more anchors than one coefficient each allows");
        for (const TrackWord& w : terms.words) {
            Point p = decode_point(encodings_from_word(w));
            EvalMatch hit;
            hit.cell_level = lev;
            hit.coefficient = p.back();
            Point y(p.begin(), p.end() - 1);
            hit.anchor = cell_from_barycentre(lev, y);
            Rational contrib = hit.coefficient;
            for (int k = 0; k < d; ++k) {
                Rational corner = y[static_cast<std::size_t>(k)] -
                                  Rational(m % 2 == 1 ? m + 2 : m + 1) * pow2(-lev - 1);
                Rational t = (x[static_cast<std::size_t>(k)] - corner) * pow2(lev);
                hit.local.push_back(t);
                contrib *= cardinal_bspline(m, t);
            }
            out.value += contrib;
            out.matches.push_back(std::move(hit));
        }
    }
    return out;
}

} // namespace regspline
