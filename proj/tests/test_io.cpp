#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "regspline/examples.hpp"
#include "regspline/io.hpp"

using namespace regspline;
namespace ex = regspline::examples;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;

    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() / ("regspline-io-" + std::to_string(::getpid()) + "-" +
                                            std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string save_to_string(const SyncAutomaton& a) {
    std::ostringstream out;
    write_automaton(out, a);
    return out.str();
}

SyncAutomaton load_from_string(const std::string& text) {
    std::istringstream in(text);
    return read_automaton(in, "<test>");
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

bool same_automaton(const SyncAutomaton& a, const SyncAutomaton& b) {
    return a.alphabet == b.alphabet && a.deterministic == b.deterministic &&
           a.initial == b.initial && a.accepting == b.accepting && a.edges == b.edges;
}

} // namespace

TEST_CASE("letter text round trips every symbol") {
    for (int base : {2, 6}) {
        for (int tracks : {1, 2, 3}) {
            TrackAlphabet alpha(base, tracks);
            // Sweep single-track symbols in track 0, zero digits elsewhere.
            for (std::uint32_t s = 0; s <= alpha.pad(); ++s) {
                std::vector<std::uint32_t> symbols(static_cast<std::size_t>(tracks), 0);
                symbols[0] = s;
                if (tracks == 1 && s == alpha.pad()) continue; // all-pad
                Letter l = alpha.pack(symbols);
                CHECK(parse_letter_text(alpha, letter_text(alpha, l)) == l);
            }
        }
    }
    TrackAlphabet a2(2, 2);
    CHECK(letter_text(a2, a2.pack(std::vector<std::uint32_t>{3, 4})) == "1/1|#");
    CHECK_THROWS_AS(parse_letter_text(a2, "#|#"), parse_error);
    CHECK_THROWS_AS(parse_letter_text(a2, "1/2|0/0"), parse_error);
    CHECK_THROWS_AS(parse_letter_text(a2, "1/1"), parse_error);
    CHECK_THROWS_AS(parse_letter_text(a2, "1|0/0"), parse_error);
}

TEST_CASE("automaton files round trip field for field and byte for byte") {
    std::vector<SyncAutomaton> fixtures;
    fixtures.push_back(addition_automaton(Base{2}, 1));
    fixtures.push_back(addition_automaton(Base{6}, 1));
    fixtures.push_back(level_filter_automaton(2, 1, Base{2}));
    fixtures.push_back(ex::cells_language(ex::fig1_domain1(), 0, Base{2}));
    fixtures.push_back(ex::alternating_mesh().language(2));
    SyncAutomaton empty;
    empty.alphabet = TrackAlphabet(2, 1);
    empty.deterministic = true;
    fixtures.push_back(empty);

    TempDir dir;
    int i = 0;
    for (const auto& a : fixtures) {
        fs::path p = dir.path / ("fixture" + std::to_string(i++) + ".aut");
        save_automaton(a, p);
        SyncAutomaton back = load_automaton(p);
        CHECK(same_automaton(a, back));
        CHECK(save_to_string(back) == save_to_string(a));
    }
}

TEST_CASE("hand written automaton text is accepted with comments and spaces") {
    std::string text = "# the one-word language {1/0}\n"
                       "base = 2\n"
                       "tracks=1\n"
                       "deterministic = true\n"
                       "\n"
                       "state 10 initial\n"
                       "state 20 accepting\n"
                       "trans 10 0/0 20\n"
                       "trans 20 1/0 20\n";
    SyncAutomaton a = load_from_string(text);
    CHECK(a.state_count() == 2);
    CHECK(a.deterministic);
    CHECK(accepts(a, convolve({{0, 2}}, 2)));       // sign then digit pair (1,0)
    CHECK(!accepts(a, convolve({{0, 1}}, 2)));
    // Canonical resave renumbers the states densely.
    CHECK(save_to_string(a).find("state 0 initial") != std::string::npos);
}

TEST_CASE("malformed automaton text is rejected") {
    CHECK_THROWS_AS(load_from_string("tracks=1\nstate 0\n"), parse_error);
    CHECK_THROWS_AS(load_from_string("base=2\ntracks=1\ndeterministic=maybe\n"), parse_error);
    CHECK_THROWS_AS(load_from_string("base=2\ntracks=0\ndeterministic=false\nstate 0\n"),
                    parse_error);
    CHECK_THROWS_AS(
        load_from_string("base=2\ntracks=1\ndeterministic=false\nstate 0\ntrans 0 0/0 1\n"),
        parse_error);
    CHECK_THROWS_AS(
        load_from_string("base=2\ntracks=1\ndeterministic=false\nstate 0\nstate 0\n"),
        parse_error);
    CHECK_THROWS_AS(
        load_from_string("base=2\ntracks=1\ndeterministic=false\nstate 0 sticky\n"),
        parse_error);
    // The file claims deterministic but branches on the sign column.
    CHECK_THROWS_AS(load_from_string("base=2\ntracks=1\ndeterministic=true\n"
                                     "state 0 initial\nstate 1 accepting\nstate 2 accepting\n"
                                     "trans 0 0/0 1\ntrans 0 0/0 2\n"),
                    parse_error);
    CHECK_THROWS_AS(load_automaton("/nonexistent/regspline.aut"), parse_error);
}

TEST_CASE("mesh specs round trip through automaton files") {
    TempDir dir;
    for (const HierarchicalMesh& M :
         {ex::fig1_mesh(), ex::fig5_left_mesh(), ex::fig5_right_mesh(), ex::alternating_mesh()}) {
        fs::path p = dir.path / "m.mesh";
        save_mesh_spec(M, p);
        HierarchicalMesh back = load_mesh_spec(p);
        CHECK(back.dimension == M.dimension);
        CHECK(back.degree == M.degree);
        CHECK(back.base.value == M.base.value);
        CHECK(back.levels == M.levels);
        for (int ell = 1; ell <= M.levels - 1; ++ell)
            CHECK(are_equivalent(back.language(ell), M.language(ell)));
    }
}

TEST_CASE("pattern generators match the builders") {
    TempDir dir;

    fs::path box = dir.path / "box.mesh";
    write_file(box, "mesh\ndimension = 1\ndegree = 2\nbase = 2\nlevels = 2\n"
                    "level 1 pattern = box 0..4 @0\n");
    HierarchicalMesh mb = load_mesh_spec(box);
    CHECK(are_equivalent(mb.language(1), ex::cells_language({{0}, {1}, {2}, {3}}, 0, Base{2})));

    fs::path half = dir.path / "half.mesh";
    write_file(half, "mesh\ndimension = 2\ndegree = 1\nbase = 2\nlevels = 3\n"
                     "level 1 pattern = box 0..1 0..1 @0\n"
                     "level 2 pattern = box 0..1 1/2..1 @1\n");
    HierarchicalMesh mh = load_mesh_spec(half);
    CHECK(are_equivalent(mh.language(2), ex::cells_language({{0, 1}, {1, 1}}, 1, Base{2})));

    fs::path cells = dir.path / "cells.mesh";
    write_file(cells, "mesh\ndimension = 2\ndegree = 2\nbase = 2\nlevels = 2\n"
                      "level 1 pattern = cells @0 (3,4) (4,4) (-5,4)\n");
    HierarchicalMesh mc = load_mesh_spec(cells);
    CHECK(are_equivalent(mc.language(1),
                         ex::cells_language({{3, 4}, {4, 4}, {-5, 4}}, 0, Base{2})));

    fs::path periodic = dir.path / "periodic.mesh";
    write_file(periodic,
               "mesh\ndimension = 2\ndegree = 2\nbase = 2\nlevels = 3\n"
               "level 1 pattern = periodic (1/2,1/2) span (1,0) (0,2)\n"
               "level 2 pattern = periodic (1/4,3/4) span (1/2,0) (0,2)\n");
    HierarchicalMesh mp = load_mesh_spec(periodic);
    HierarchicalMesh want = ex::fig5_right_mesh();
    CHECK(are_equivalent(mp.language(1), want.language(1)));
    CHECK(are_equivalent(mp.language(2), want.language(2)));
}

TEST_CASE("broken mesh specs are rejected") {
    TempDir dir;
    auto expect_throw = [&](const std::string& text) {
        fs::path p = dir.path / "bad.mesh";
        write_file(p, text);
        CHECK_THROWS(load_mesh_spec(p));
    };
    expect_throw("spline\n");
    expect_throw("mesh\ndimension = 1\ndegree = 2\nbase = 2\n");
    expect_throw("mesh\ndimension = 1\ndegree = 2\nbase = 2\nlevels = 2\n");
    expect_throw("mesh\ndimension = 1\ndegree = 2\nbase = 2\nlevels = 2\n"
                 "level 1 pattern = box 0..4 @0\nlevel 1 pattern = box 0..4 @0\n");
    expect_throw("mesh\ndimension = 1\ndegree = 2\nbase = 2\nlevels = 2\n"
                 "level 2 pattern = box 0..4 @0\n");
    expect_throw("mesh\ndimension = 1\ndegree = 2\nbase = 2\nlevels = 2\n"
                 "level 1 pattern = box 0..4 @1\n"); // level-1 cells in a level-0 slot
    expect_throw("mesh\ndimension = 1\ndegree = 2\nbase = 2\nlevels = 2\n"
                 "level 1 pattern = cells @0 (1,2)\n");
    expect_throw("mesh\ndimension = 1\ndegree = 2\nbase = 2\nlevels = 2\n"
                 "level 1 pattern = box 1/3..1 @0\n");
    expect_throw("mesh\ndimension = 1\ndegree = 2\nbase = 2\nlevels = 2\n"
                 "level 1 automaton = missing.aut\n");
}

TEST_CASE("spline manifests reload to the same values") {
    TempDir dir;

    RegularSpline g = ex::spline_g();
    HierarchicalMesh gm = ex::uniform_mesh(1, 3, Base{6});
    fs::path gp = dir.path / "g.spline";
    save_spline_manifest(g, gm, gp);
    SplineBundle gb = load_spline_manifest(gp);
    CHECK(gb.spline.levels == 1);
    CHECK(evaluate(gb.spline, {Rational(2)}).value == make_rational(2, 3));
    CHECK(evaluate(gb.spline, {Rational(6)}).value == make_rational(-2, 3));

    RegularSpline h = ex::spline_h();
    HierarchicalMesh hm = ex::alternating_mesh();
    fs::path hp = dir.path / "h.spline";
    save_spline_manifest(h, hm, hp);
    SplineBundle hb = load_spline_manifest(hp);
    CHECK(hb.mesh.levels == 3);
    CHECK(evaluate(hb.spline, {make_rational(1, 2)}).value == make_rational(2, 3));
    CHECK(evaluate(hb.spline, {make_rational(5, 2)}).value == make_rational(4, 3));

    // Tampering with the declared shape is caught against the mesh.
    write_file(gp, "spline\ndimension = 1\ndegree = 2\nbase = 6\nlevels = 1\n"
                   "mesh = g.mesh\nrelation 0 = g.R0.aut\n");
    CHECK_THROWS_AS(load_spline_manifest(gp), parse_error);
}

TEST_CASE("kraft manifests keep the selected languages") {
    TempDir dir;
    HierarchicalMesh M = ex::fig1_mesh();
    KraftBasis B = build_kraft_languages(M);
    fs::path p = dir.path / "basis.kraft";
    save_kraft_manifest(B, p, "fig1.mesh");
    KraftBasis back = load_kraft_manifest(p);
    CHECK(back.dimension == B.dimension);
    CHECK(back.degree == B.degree);
    CHECK(back.levels == B.levels);
    for (int lev = 0; lev < B.levels; ++lev)
        CHECK(are_equivalent(back.level(lev), B.level(lev)));

    std::ifstream in(p);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(text.find("clauses 0 = containment:vacuous escape:checked") != std::string::npos);
    CHECK(text.find("clauses 2 = containment:checked escape:vacuous") != std::string::npos);
}

TEST_CASE("rational and point text forms") {
    Base b2{2};
    CHECK(parse_rational_text("5/4", b2) == make_rational(5, 4));
    CHECK(parse_rational_text("-3", b2) == Rational(-3));
    CHECK(parse_rational_text("digits:1110/1011", b2) == make_rational(-27, 8));
    CHECK(parse_rational_text("digits:010/001", b2) == make_rational(5, 4));
    CHECK(parse_rational_text("6/4", b2) == make_rational(3, 2));
    CHECK_THROWS_AS(parse_rational_text("5/0", b2), parse_error);
    CHECK_THROWS_AS(parse_rational_text("abc", b2), parse_error);
    CHECK_THROWS_AS(parse_rational_text("1 2", b2), parse_error);
    CHECK_THROWS_AS(parse_rational_text("digits:1110", b2), parse_error);

    Point p = parse_point_text("(1/2, 3/4)", b2);
    CHECK(p == Point{make_rational(1, 2), make_rational(3, 4)});
    CHECK(parse_point_text("7", b2) == Point{Rational(7)});
    CHECK(parse_point_text(point_text(p), b2) == p);
    CHECK(point_text({make_rational(5, 4)}) == "5/4");
    CHECK(point_text(p) == "(1/2,3/4)");
    CHECK_THROWS_AS(parse_point_text("(1,2", b2), parse_error);
    CHECK_THROWS_AS(parse_point_text("1,,2", b2), parse_error);
}
