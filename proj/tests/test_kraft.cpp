#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "regspline/examples.hpp"
#include "regspline/kraft.hpp"
#include "regspline/oracle.hpp"

using namespace regspline;
namespace orc = regspline::oracle;
namespace ex = regspline::examples;

namespace {

HierarchicalMesh interval_mesh(const std::vector<long>& cells, int degree) {
    std::vector<std::vector<long>> boxed;
    for (long c : cells) boxed.push_back({c});
    HierarchicalMesh M;
    M.dimension = 1;
    M.degree = degree;
    M.levels = 2;
    M.languages.push_back(ex::cells_language(boxed, 0, M.base));
    return M;
}

void compare_level(const KraftBasis& B, const orc::ExplicitMesh& E, const orc::Window& W,
                   int lev) {
    std::vector<long> lo, hi;
    long scale = 1L << lev;
    for (std::size_t k = 0; k < W.lo.size(); ++k) {
        lo.push_back(W.lo[k] * scale);
        hi.push_back(W.hi[k] * scale);
    }
    auto got = cells_in_box(B.level(lev), lev, lo, hi, B.base);
    auto want_set = orc::kraft_level(E, B.degree, lev, W);
    std::vector<orc::CellIndex> want(want_set.begin(), want_set.end());
    CHECK(got == want);
}

orc::ExplicitMesh fig1_explicit() {
    auto d1 = ex::fig1_domain1();
    auto d2 = ex::fig1_domain2();
    return {2, 3, {orc::CellSet(d1.begin(), d1.end()), orc::CellSet(d2.begin(), d2.end())}};
}

orc::ExplicitMesh left_explicit(long r) {
    orc::ExplicitMesh E{2, 3, {{}, {}}};
    for (long i = -r; i < r; ++i)
        for (long j = -r; j < r; ++j)
            if (((i + j) % 2 + 2) % 2 == 0) E.domains[0].insert({i, j});
    for (long a = -2 * r; a < 2 * r; ++a)
        for (long b = -2 * r; b < 2 * r; ++b)
            if (((orc::floor_div2(a) + orc::floor_div2(b)) % 2 + 2) % 2 == 0)
                E.domains[1].insert({a, b});
    return E;
}

bool alternating_member(long j) { return j >= 0 ? j % 2 == 0 : (-j) % 2 == 1; }

orc::ExplicitMesh alternating_explicit(long r) {
    orc::ExplicitMesh E{1, 3, {{}, {}}};
    for (long j = -r; j < r; ++j)
        if (alternating_member(j)) E.domains[0].insert({j});
    for (long a = -2 * r; a < 2 * r; ++a)
        if (alternating_member(orc::floor_div2(a))) E.domains[1].insert({a});
    return E;
}

} // namespace

TEST_CASE("uniform mesh keeps every anchor") {
    for (int m : {0, 1, 3}) {
        HierarchicalMesh M;
        M.degree = m;
        auto B = build_kraft_languages(M);
        CHECK(B.levels == 1);
        CHECK(are_equivalent(B.level(0), level_filter_automaton(1, 0, M.base)));
    }
    HierarchicalMesh M;
    M.dimension = 2;
    M.degree = 2;
    auto B = build_kraft_languages(M);
    CHECK(are_equivalent(B.level(0), level_filter_automaton(2, 0, M.base)));
}

TEST_CASE("two level interval mesh") {
    Base b{2};
    auto M = interval_mesh({0, 1}, 1);
    auto B = build_kraft_languages(M);

    // The only degree-1 support inside [0,2] is the hat over its midpoint.
    auto expect0 = difference(level_filter_automaton(1, 0, b),
                              constant_point_automaton({make_rational(3, 2)}, b));
    CHECK(are_equivalent(B.level(0), expect0));
    CHECK(are_equivalent(B.level(1), ex::cells_language({{1}, {2}, {3}}, 1, b)));

    auto m0 = build_kraft_languages(interval_mesh({0, 1}, 0));
    auto gone = union_of(constant_point_automaton({make_rational(1, 2)}, b),
                         constant_point_automaton({make_rational(3, 2)}, b));
    CHECK(are_equivalent(m0.level(0), difference(level_filter_automaton(1, 0, b), gone)));
    CHECK(are_equivalent(m0.level(1), ex::cells_language({{0}, {1}, {2}, {3}}, 1, b)));

    orc::ExplicitMesh E{1, 2, {orc::CellSet{{0}, {1}}}};
    for (int m = 0; m <= 3; ++m) {
        auto basis = build_kraft_languages(interval_mesh({0, 1}, m));
        for (int lev = 0; lev < 2; ++lev) compare_level(basis, E, {{-6}, {8}}, lev);
    }
}

TEST_CASE("alternating three level mesh") {
    Base b{2};
    auto M = ex::alternating_mesh();
    auto B = build_kraft_languages(M);

    // Every fourth cell run of length four loses two cells per support, so
    // all coarse anchors stay.
    CHECK(are_equivalent(B.level(0), level_filter_automaton(1, 0, b)));
    // The middle level adds nothing: both subdomains cover the same region,
    // so any support inside the first is also inside the second.
    CHECK(is_empty(B.level(1)));
    // The fine level keeps one anchor per run plus three around the mirror
    // point where two runs meet.
    SyncAutomaton pos = positive_automaton(b), neg = negative_automaton(b);
    auto lat = [&](const Rational& t) { return lattice_language({{t}}, {{Rational(2)}}, b); };
    SyncAutomaton expect2 = union_of(intersect(lat(make_rational(5, 8)), pos),
                                     intersect(lat(make_rational(13, 8)), neg));
    for (long i : {-1L, 0L, 1L})
        expect2 = union_of(expect2, constant_point_automaton(barycentre_point(2, {i}), b));
    CHECK(are_equivalent(B.level(2), minimize(expect2)));

    auto E = alternating_explicit(16);
    for (int lev = 0; lev < 3; ++lev) compare_level(B, E, {{-8}, {8}}, lev);
}

TEST_CASE("window mesh basis matches the oracle") {
    auto E = fig1_explicit();
    orc::Window W{{-4, -4}, {13, 9}};
    for (int m = 1; m <= 2; ++m) {
        auto B = build_kraft_languages(ex::fig1_mesh(m));
        for (int lev = 0; lev < 3; ++lev) compare_level(B, E, W, lev);
    }

    // Degree 1: the one level-0 support fully inside the left block drops out.
    auto B = build_kraft_languages(ex::fig1_mesh(1));
    CHECK_FALSE(contains_point(B.level(0), barycentre_point(0, {1, 2}), B.base));
    CHECK(contains_point(B.level(0), barycentre_point(0, {0, 2}), B.base));
    CHECK(contains_point(B.level(0), barycentre_point(0, {-3, -3}), B.base));
}

TEST_CASE("periodic mesh basis matches the oracle") {
    auto B = build_kraft_languages(ex::fig5_left_mesh(2));
    auto E = left_explicit(10);
    for (int lev = 0; lev < 3; ++lev) compare_level(B, E, {{-3, -3}, {3, 3}}, lev);
}

TEST_CASE("kraft requires a nested mesh") {
    auto M = ex::fig1_mesh(2);
    M.languages[1] =
        union_of(M.languages[1], constant_point_automaton(barycentre_point(1, {-9, -9}), M.base));
    CHECK_THROWS_AS(build_kraft_languages(M), usage_error);
    auto B = build_kraft_languages(M, true);
    CHECK(B.languages.size() == 3);
}
