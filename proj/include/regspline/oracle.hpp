#pragma once

// Brute-force reference semantics used to cross-check the automata pipeline:
// explicit cell sets, direct selection of basis functions, plain Cox-de Boor
// evaluation. Everything here works on explicit finite data with exact
// rationals and never touches the automata code paths, so agreement between
// the two sides is meaningful evidence.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "regspline/error.hpp"
#include "regspline/rational.hpp"

namespace regspline::oracle {

/// Integer multi-index of a level-t cell, the box prod_k [i_k/2^t, (i_k+1)/2^t].
using CellIndex = std::vector<long>;
using CellSet = std::set<CellIndex>;

/// Hierarchical mesh as explicit cell sets: domains[k] lists the level-k
/// cells composing the (k+1)-th refinement domain, k = 0..levels-2. The
/// level-0 domain is all of R^d and is not stored.
struct ExplicitMesh {
    int dimension = 1;
    int levels = 1;
    std::vector<CellSet> domains;
};

inline Point cell_barycentre(int level, const CellIndex& idx) {
    Point p(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k)
        p[k] = Rational(2 * idx[k] + 1) * pow2(-(level + 1));
    return p;
}

inline long floor_div2(long i) { return i >= 0 ? i / 2 : (i - 1) / 2; }

inline CellIndex parent_cell(CellIndex idx) {
    for (auto& i : idx) i = floor_div2(i);
    return idx;
}

inline CellIndex add_index(CellIndex a, const CellIndex& b) {
    for (std::size_t k = 0; k < a.size(); ++k) a[k] += b[k];
    return a;
}

/// All integer multi-indices with lo[k] <= i[k] <= hi[k], in lexicographic order.
inline std::vector<CellIndex> box_indices(const CellIndex& lo, const CellIndex& hi) {
    std::vector<CellIndex> out;
    CellIndex cur(lo);
    const std::size_t d = lo.size();
    for (std::size_t k = 0; k < d; ++k)
        if (lo[k] > hi[k]) return out;
    while (true) {
        out.push_back(cur);
        std::size_t k = d;
        while (k > 0) {
            --k;
            if (++cur[k] <= hi[k]) break;
            cur[k] = lo[k];
            if (k == 0) return out;
        }
        if (d == 0) return out;
    }
}

/// Offsets of the cells composing a closed basis-function support relative to
/// its anchor cell. Per coordinate: -m/2..m/2 when m+1 is odd, else
/// -(m+1)/2..(m-1)/2.
inline std::vector<CellIndex> support_offsets(int m, int dimension) {
    long lo = (m % 2 == 0) ? -(m / 2) : -((m + 1) / 2);
    long hi = (m % 2 == 0) ? m / 2 : (m - 1) / 2;
    return box_indices(CellIndex(dimension, lo), CellIndex(dimension, hi));
}

/// Distance from the anchor cell index back to the first knot index.
inline long anchor_shift(int m) { return (m % 2 == 0) ? m / 2 : (m + 1) / 2; }

/// Connectivity of a union of closed unit cells at the given integer offsets.
/// Two cells are adjacent when their closures intersect, i.e. all coordinate
/// distances are at most 1 (vertex sharing counts).
inline bool offsets_connected(const std::vector<CellIndex>& cells) {
    const std::size_t n = cells.size();
    if (n <= 1) return true;
    std::vector<std::size_t> rep(n);
    for (std::size_t i = 0; i < n; ++i) rep[i] = i;
    std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
        while (rep[i] != i) i = rep[i] = rep[rep[i]];
        return i;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            bool touch = true;
            for (std::size_t k = 0; k < cells[i].size() && touch; ++k)
                touch = std::labs(cells[i][k] - cells[j][k]) <= 1;
            if (touch) rep[find(i)] = find(j);
        }
    std::size_t root = find(0);
    for (std::size_t i = 1; i < n; ++i)
        if (find(i) != root) return false;
    return true;
}

/// Is the level-t cell idx contained in the s-th domain? s = 0 is all of R^d;
/// domains past the last stored one are empty. Requires t >= s-1.
inline bool cell_in_domain(const ExplicitMesh& mesh, int cell_level, CellIndex idx, int s) {
    if (s <= 0) return true;
    if (s > mesh.levels - 1) return false;
    if (cell_level < s - 1) throw usage_error("cell_in_domain: cell coarser than domain");
    for (int t = cell_level; t > s - 1; --t) idx = parent_cell(std::move(idx));
    return mesh.domains[static_cast<std::size_t>(s - 1)].count(idx) > 0;
}

/// Nestedness by direct containment: every level-(l-1) cell of the l-th
/// domain must sit inside a level-(l-2) cell of the (l-1)-th domain.
/// Returns (l, cell) pairs for every violation.
inline std::vector<std::pair<int, CellIndex>> nested_violations(const ExplicitMesh& mesh) {
    std::vector<std::pair<int, CellIndex>> out;
    for (int l = 2; l <= mesh.levels - 1; ++l)
        for (const auto& idx : mesh.domains[static_cast<std::size_t>(l - 1)])
            if (!mesh.domains[static_cast<std::size_t>(l - 2)].count(parent_cell(idx)))
                out.emplace_back(l, idx);
    return out;
}

/// Level-0 box of cells bounding an enumeration; half-open [lo, hi) per axis.
struct Window {
    CellIndex lo, hi;
};

/// All level-t cell indices inside the window.
inline std::vector<CellIndex> cells_in_window(const Window& w, int level) {
    CellIndex lo(w.lo), hi(w.hi);
    for (std::size_t k = 0; k < lo.size(); ++k) {
        lo[k] <<= level;
        hi[k] = (hi[k] << level) - 1;
    }
    return box_indices(lo, hi);
}

/// Support cells of the anchor at the given level that stick out of the
/// (ell+1)-th domain. A nonempty result means the function's support still
/// meets coarser territory; its connectivity is what the mesh check verifies.
inline std::vector<CellIndex> uncovered_offsets(const ExplicitMesh& mesh, int m, int ell,
                                                const CellIndex& anchor) {
    std::vector<CellIndex> J;
    for (const auto& off : support_offsets(m, mesh.dimension))
        if (!cell_in_domain(mesh, ell, add_index(anchor, off), ell + 1)) J.push_back(off);
    return J;
}

/// First (level, anchor) in scan order whose uncovered support cells form a
/// nonempty disconnected set, or nullopt when the window shows no violation.
inline std::optional<std::pair<int, CellIndex>> assumption_b_violation(const ExplicitMesh& mesh,
                                                                       int m, const Window& w) {
    for (int ell = 0; ell <= mesh.levels - 2; ++ell)
        for (const auto& anchor : cells_in_window(w, ell)) {
            auto J = uncovered_offsets(mesh, m, ell, anchor);
            if (!J.empty() && !offsets_connected(J)) return std::make_pair(ell, anchor);
        }
    return std::nullopt;
}

/// Direct basis selection at one level: keep the anchors whose support lies
/// inside the ell-th domain and still has a cell outside the (ell+1)-th.
inline CellSet kraft_level(const ExplicitMesh& mesh, int m, int ell, const Window& w) {
    CellSet out;
    const auto offsets = support_offsets(m, mesh.dimension);
    for (const auto& anchor : cells_in_window(w, ell)) {
        bool inside = true, sticks_out = false;
        for (const auto& off : offsets) {
            CellIndex c = add_index(anchor, off);
            if (!cell_in_domain(mesh, ell, c, ell)) {
                inside = false;
                break;
            }
            if (!cell_in_domain(mesh, ell, std::move(c), ell + 1)) sticks_out = true;
        }
        if (inside && sticks_out) out.insert(anchor);
    }
    return out;
}

/// Cardinal B-spline over integer knots i..i+k+1, evaluated exactly by the
/// Cox-de Boor recursion. The degree-0 base case uses the half-open cell
/// [i, i+1), which fixes the value at knots; splines of positive degree
/// vanish there anyway.
inline Rational uniform_bspline(long i, int k, const Rational& t) {
    if (k == 0) return (t >= i && t < i + 1) ? Rational(1) : Rational(0);
    if (t <= i || t >= i + k + 1) return Rational(0);
    Rational left = (t - i) / k * uniform_bspline(i, k - 1, t);
    Rational right = (Rational(i + k + 1) - t) / k * uniform_bspline(i + 1, k - 1, t);
    return left + right;
}

inline Rational bspline01(int m, const Rational& t) { return uniform_bspline(0, m, t); }

/// Value at t of the degree-m B-spline whose first knot is i/2^level.
inline Rational bspline_level(int m, int level, long i, const Rational& t) {
    return bspline01(m, t * pow2(level) - Rational(i));
}

/// Coefficient lookup by (level, anchor cell); nullopt means the anchor is
/// not part of the spline and contributes nothing.
using CoefficientFn = std::function<std::optional<Rational>(int, const CellIndex&)>;

/// Plain evaluation: at each level enumerate the knot indices whose support
/// contains x (at most (m+1)^d of them), look up coefficients, sum products
/// of Cox-de Boor values.
inline Rational eval_spline(int dimension, int m, int levels, const CoefficientFn& coeff,
                            const Point& x) {
    if (static_cast<int>(x.size()) != dimension) throw usage_error("eval_spline: bad point");
    Rational total(0);
    const long shift = anchor_shift(m);
    for (int lev = 0; lev < levels; ++lev) {
        std::vector<std::vector<long>> knots(x.size());
        std::vector<Rational> scaled(x.size());
        for (std::size_t k = 0; k < x.size(); ++k) {
            scaled[k] = x[k] * pow2(lev);
            long f = static_cast<long>(floor_rational(scaled[k]).get_num().get_si());
            for (long i = f - m - 1; i <= f + 1; ++i) {
                bool in = m == 0 ? (scaled[k] >= i && scaled[k] < i + 1)
                                 : (scaled[k] > i && scaled[k] < i + m + 1);
                if (in) knots[k].push_back(i);
            }
        }
        std::vector<std::size_t> pick(x.size(), 0);
        bool done = false;
        for (const auto& ks : knots)
            if (ks.empty()) done = true;
        while (!done) {
            CellIndex anchor(x.size());
            for (std::size_t k = 0; k < x.size(); ++k) anchor[k] = knots[k][pick[k]] + shift;
            if (auto c = coeff(lev, anchor)) {
                Rational prod(*c);
                for (std::size_t k = 0; k < x.size(); ++k)
                    prod *= bspline01(m, scaled[k] - Rational(knots[k][pick[k]]));
                total += prod;
            }
            std::size_t k = x.size();
            done = true;
            while (k > 0) {
                --k;
                if (++pick[k] < knots[k].size()) {
                    done = false;
                    break;
                }
                pick[k] = 0;
            }
        }
    }
    return total;
}

/// Spline with explicitly tabulated coefficients, one map per level.
struct ExplicitSpline {
    int dimension = 1;
    int degree = 1;
    int levels = 1;
    std::vector<std::map<CellIndex, Rational>> coefficients;
};

inline Rational eval_explicit(const ExplicitSpline& f, const Point& x) {
    return eval_spline(f.dimension, f.degree, f.levels,
                       [&](int lev, const CellIndex& anchor) -> std::optional<Rational> {
                           const auto& level = f.coefficients[static_cast<std::size_t>(lev)];
                           auto it = level.find(anchor);
                           if (it == level.end()) return std::nullopt;
                           return it->second;
                       },
                       x);
}

} // namespace regspline::oracle
