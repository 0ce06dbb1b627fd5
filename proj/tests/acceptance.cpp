// Acceptance suite: ten pinned criteria, each timed against a fixed budget
// and reported as a single PASS or FAIL line.  The process exits nonzero as
// soon as one criterion fails.  Expected values are written out literally,
// and every geometric verdict is cross-checked against the direct evaluators
// in oracle.hpp, which enumerate cells and recurse on piecewise polynomials
// without ever touching the automaton engine.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "regspline/examples.hpp"
#include "regspline/io.hpp"
#include "regspline/kraft.hpp"
#include "regspline/oracle.hpp"
#include "regspline/refine.hpp"

using namespace regspline;
namespace orc = regspline::oracle;
namespace ex = regspline::examples;
namespace fs = std::filesystem;

namespace {

struct Check {
    bool ok = true;
    std::string detail;
    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

// ---- shared helpers ------------------------------------------------------

Rational rand_in_system(std::mt19937& rng, int base, int max_exp, long range) {
    std::uniform_int_distribution<long> num(-range, range);
    std::uniform_int_distribution<int> ex_dist(0, max_exp);
    Rational q(Int(num(rng)), pow_int(base, static_cast<unsigned>(ex_dist(rng))));
    q.canonicalize();
    return q;
}

SyncAutomaton random_nfa(std::mt19937& rng, const TrackAlphabet& alpha,
                         const std::vector<Letter>& letters, int nstates, int nedges) {
    SyncAutomaton a;
    a.alphabet = alpha;
    a.deterministic = false;
    std::uniform_int_distribution<int> st(0, nstates - 1);
    std::uniform_int_distribution<std::size_t> li(0, letters.size() - 1);
    std::uniform_int_distribution<int> coin(0, 3);
    for (int i = 0; i < nstates; ++i) a.add_state(coin(rng) == 0);
    a.initial.push_back(0);
    for (int i = 0; i < nedges; ++i) a.add_edge(st(rng), letters[li(rng)], st(rng));
    a.finish_edges();
    return a;
}

// Acyclic variant: edges only run from lower to higher ids, so every accepted
// word is shorter than the state count and a bounded enumeration is the whole
// language.  Used where projection may shorten words.
SyncAutomaton random_dag_nfa(std::mt19937& rng, const TrackAlphabet& alpha,
                             const std::vector<Letter>& letters, int nstates, int nedges) {
    SyncAutomaton a;
    a.alphabet = alpha;
    a.deterministic = false;
    std::uniform_int_distribution<std::size_t> li(0, letters.size() - 1);
    std::uniform_int_distribution<int> coin(0, 3);
    for (int i = 0; i < nstates; ++i) a.add_state(coin(rng) == 0);
    a.initial.push_back(0);
    std::uniform_int_distribution<int> src(0, nstates - 2);
    for (int i = 0; i < nedges; ++i) {
        int s = src(rng);
        std::uniform_int_distribution<int> dst(s + 1, nstates - 1);
        a.add_edge(s, letters[li(rng)], dst(rng));
    }
    a.finish_edges();
    return a;
}

std::vector<std::vector<Letter>> words_up_to(const std::vector<Letter>& letters, int maxlen) {
    std::vector<std::vector<Letter>> out{{}};
    std::size_t begin = 0;
    for (int l = 1; l <= maxlen; ++l) {
        std::size_t end = out.size();
        for (std::size_t i = begin; i < end; ++i)
            for (Letter c : letters) {
                auto w = out[i];
                w.push_back(c);
                out.push_back(std::move(w));
            }
        begin = end;
    }
    return out;
}

std::set<std::vector<Letter>> brute_language(const SyncAutomaton& a,
                                             const std::vector<std::vector<Letter>>& words) {
    std::set<std::vector<Letter>> out;
    for (const auto& w : words)
        if (accepts(a, TrackWord{a.alphabet, w})) out.insert(w);
    return out;
}

SyncAutomaton all_words_automaton(const TrackAlphabet& alpha, const std::vector<Letter>& letters) {
    SyncAutomaton a;
    a.alphabet = alpha;
    a.deterministic = true;
    a.add_state(true);
    a.initial.push_back(0);
    for (Letter l : letters) a.add_edge(0, l, 0);
    a.finish_edges();
    return a;
}

bool same_language_on(const SyncAutomaton& a, const SyncAutomaton& b,
                      const std::vector<std::vector<Letter>>& words) {
    for (const auto& w : words)
        if (accepts(a, TrackWord{a.alphabet, w}) != accepts(b, TrackWord{b.alphabet, w}))
            return false;
    return true;
}

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

orc::ExplicitMesh right_explicit(long r) {
    orc::ExplicitMesh E{2, 3, {{}, {}}};
    for (long i = -r; i < r; ++i)
        for (long j = -r; j < r; ++j)
            if (((j % 2) + 2) % 2 == 0) E.domains[0].insert({i, j});
    for (long a = -2 * r; a < 2 * r; ++a)
        for (long b = -2 * r; b < 2 * r; ++b)
            if (((b % 4) + 4) % 4 == 1) E.domains[1].insert({a, b});
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

// Coefficient of one anchor read straight out of a relation automaton, used
// as the lookup behind the direct spline evaluator.
std::optional<Rational> relation_coefficient(const RegularSpline& f, int lev,
                                             const std::vector<long>& cell) {
    const SyncAutomaton& rel = f.relations[static_cast<std::size_t>(lev)];
    Point bary = barycentre_point(lev, cell);
    SyncAutomaton q = restrict_anchors(rel, constant_point_automaton(bary, f.base));
    q = minimize(project(q, {f.dimension}));
    Enumeration en = enumerate_words(q, 2, 100000);
    if (en.words.empty()) return std::nullopt;
    if (en.words.size() > 1) throw usage_error("relation stores several coefficients");
    return decode(encodings_from_word(en.words[0]).at(0));
}

orc::CoefficientFn coefficients_of(const RegularSpline& f) {
    return [&f](int lev, const orc::CellIndex& cell) { return relation_coefficient(f, lev, cell); };
}

void mesh_vs_oracle(Check& c, const HierarchicalMesh& M, const orc::ExplicitMesh& E,
                    const orc::Window& W, const std::string& tag) {
    auto res = check_assumption_b(M);
    auto ov = orc::assumption_b_violation(E, M.degree, W);
    c.require(res.ok == !ov.has_value(), tag + ": verdicts differ");
    if (res.ok) return;
    c.require(res.witness.has_value(), tag + ": failure without witness");
    if (!res.witness) return;
    auto idx = cell_from_barycentre(res.level, *res.witness);
    auto J = orc::uncovered_offsets(E, M.degree, res.level, idx);
    c.require(!orc::offsets_connected(J), tag + ": witness offsets are connected");
    c.require(J == res.uncovered, tag + ": uncovered sets differ");
}

void kraft_vs_oracle(Check& c, const KraftBasis& B, const orc::ExplicitMesh& E,
                     const orc::Window& W, int lev, const std::string& tag) {
    std::vector<long> lo, hi;
    long scale = 1L << lev;
    for (std::size_t k = 0; k < W.lo.size(); ++k) {
        lo.push_back(W.lo[k] * scale);
        hi.push_back(W.hi[k] * scale);
    }
    auto got = cells_in_box(B.level(lev), lev, lo, hi, B.base);
    auto want_set = orc::kraft_level(E, B.degree, lev, W);
    std::vector<orc::CellIndex> want(want_set.begin(), want_set.end());
    c.require(got == want, tag + ": level " + std::to_string(lev) + " anchors differ");
}

// ---- criterion 1: two-row numerals --------------------------------------

void c1_encoding(Check& c) {
    Base b2{2};
    c.require(to_string(encode(make_rational(-27, 8), b2)) == "1110/1011",
              "-27/8 in base 2 must print as 1110/1011");
    c.require(to_string(encode(make_rational(5, 4), b2)) == "010/001",
              "5/4 in base 2 must print as 010/001");
    c.require(to_string(encode(Rational(0), b2)) == "0/0", "zero must print as its sign column");
    c.require(decode(parse_encoding("1110/1011", b2)) == make_rational(-27, 8),
              "1110/1011 must parse back to -27/8");
    c.require(decode(parse_encoding("010/001", b2)) == make_rational(5, 4),
              "010/001 must parse back to 5/4");

    for (auto [val, base] : {std::pair<long, int>{1, 2}, {1, 6}, {1, 10}}) {
        try {
            encode(Rational(Int(val), Int(base + 1)), Base{base});
            c.require(false, "1/" + std::to_string(base + 1) + " accepted in base " +
                                 std::to_string(base));
        } catch (const representation_error&) {
        }
    }

    std::mt19937 rng(101);
    std::uniform_int_distribution<long> num(-(1L << 40), 1L << 40);
    std::uniform_int_distribution<int> ex_dist(0, 12);
    // 100000 dyadic round trips, then a mixed-base sweep on top.
    for (int trial = 0; trial < 150000; ++trial) {
        int base = trial < 100000 ? 2 : (trial % 2 ? 6 : 10);
        Rational q(Int(num(rng)), pow_int(base, static_cast<unsigned>(ex_dist(rng))));
        q.canonicalize();
        EncodedNumber e = encode(q, Base{base});
        if (!is_valid_encoding(e)) {
            c.require(false, "encode produced a non-canonical string for " + q.get_str());
            return;
        }
        if (decode(e) != q) {
            c.require(false, "decode(encode(q)) != q for " + q.get_str());
            return;
        }
        if (trial % 5 == 0) {
            EncodedNumber back = parse_encoding(to_string(e), Base{base});
            if (back.negative != e.negative || back.columns != e.columns) {
                c.require(false, "text round trip changed " + q.get_str());
                return;
            }
        }
    }
}

// ---- criterion 2: addition relation --------------------------------------

void c2_addition(Check& c) {
    SyncAutomaton add2 = addition_automaton(Base{2}, 1);
    SyncAutomaton add6 = addition_automaton(Base{6}, 1);

    auto triple_word = [](const Rational& x, const Rational& y, const Rational& s, Base b) {
        return word_from_encodings(encode_point({x, y, s}, b), b.value);
    };
    c.require(accepts(add2, triple_word(make_rational(5, 4), make_rational(-27, 8),
                                        make_rational(-17, 8), Base{2})),
              "5/4 + (-27/8) = -17/8 rejected in base 2");

    std::mt19937 rng(202);
    for (int trial = 0; trial < 10000; ++trial) {
        Base b{trial % 5 < 3 ? 2 : 6};
        const SyncAutomaton& add = b.value == 2 ? add2 : add6;
        Rational x = rand_in_system(rng, b.value, 10, 1L << 30);
        Rational y = rand_in_system(rng, b.value, 10, 1L << 30);
        Rational s = x + y;
        if (!accepts(add, triple_word(x, y, s, b))) {
            c.require(false, "true sum rejected: " + x.get_str() + " + " + y.get_str());
            return;
        }
        const Rational deltas[3] = {Rational(1), Rational(-1),
                                    Rational(Int(1), pow_int(b.value, 13))};
        for (const Rational& d : deltas)
            if (accepts(add, triple_word(x, y, s + d, b))) {
                c.require(false, "near miss accepted: " + x.get_str() + " + " + y.get_str() +
                                     " = " + Rational(s + d).get_str());
                return;
            }
    }
}

// ---- criterion 3: engine closures vs brute force --------------------------

void c3_closure(Check& c) {
    std::mt19937 rng(303);
    TrackAlphabet alpha1(2, 1);
    std::vector<Letter> letters1{0, 1, 2, 3};
    auto words6 = words_up_to(letters1, 6);
    SyncAutomaton all1 = all_words_automaton(alpha1, letters1);
    auto universe = brute_language(all1, words6);

    std::uniform_int_distribution<int> nst(3, 5), ned(6, 14);
    for (int trial = 0; trial < 60; ++trial) {
        SyncAutomaton a = random_nfa(rng, alpha1, letters1, nst(rng), ned(rng));
        SyncAutomaton b = random_nfa(rng, alpha1, letters1, nst(rng), ned(rng));
        auto A = brute_language(a, words6);
        auto B = brute_language(b, words6);

        std::set<std::vector<Letter>> uni = A, inter, dif, comp;
        uni.insert(B.begin(), B.end());
        for (const auto& w : A)
            if (B.count(w)) inter.insert(w);
        for (const auto& w : A)
            if (!B.count(w)) dif.insert(w);
        for (const auto& w : universe)
            if (!A.count(w)) comp.insert(w);

        if (brute_language(union_of(a, b), words6) != uni) {
            c.require(false, "union differs from brute force at trial " + std::to_string(trial));
            return;
        }
        if (brute_language(intersect(a, b), words6) != inter) {
            c.require(false, "intersection differs at trial " + std::to_string(trial));
            return;
        }
        if (brute_language(difference(a, b), words6) != dif) {
            c.require(false, "difference differs at trial " + std::to_string(trial));
            return;
        }
        if (brute_language(difference(all1, a), words6) != comp) {
            c.require(false, "complement differs at trial " + std::to_string(trial));
            return;
        }

        SyncAutomaton det = determinize(a);
        if (!det.deterministic || !same_language_on(a, det, words6)) {
            c.require(false, "determinize changed the language at trial " + std::to_string(trial));
            return;
        }
        SyncAutomaton mini = minimize(a);
        if (mini.state_count() > det.state_count() || !same_language_on(a, mini, words6)) {
            c.require(false, "minimize grew or changed the language at trial " +
                                 std::to_string(trial));
            return;
        }
        if (!same_language_on(a, trim(a), words6)) {
            c.require(false, "trim changed the language at trial " + std::to_string(trial));
            return;
        }
    }

    // Projection with no padding on the kept track: lengths are preserved,
    // so a bounded enumeration is exact even for cyclic automata.
    TrackAlphabet alpha2(2, 2);
    std::vector<Letter> pool;
    std::vector<std::uint32_t> syms(2);
    for (std::uint32_t x : {0u, 1u, 3u})
        for (std::uint32_t y : {0u, 2u}) {
            syms[0] = x;
            syms[1] = y;
            pool.push_back(alpha2.pack(syms));
        }
    auto words_pool = words_up_to(pool, 6);
    for (int trial = 0; trial < 40; ++trial) {
        SyncAutomaton a = random_nfa(rng, alpha2, pool, 5, 12);
        auto la = brute_language(a, words_pool);
        for (int keep : {0, 1}) {
            std::set<std::vector<Letter>> want;
            for (const auto& w : la) {
                std::vector<Letter> v;
                for (Letter l : w) v.push_back(Letter(alpha2.symbol_at(l, keep)));
                want.insert(v);
            }
            SyncAutomaton p = project(a, {keep});
            std::vector<Letter> tr = keep == 0 ? std::vector<Letter>{0, 1, 3}
                                               : std::vector<Letter>{0, 2};
            if (brute_language(p, words_up_to(tr, 6)) != want) {
                c.require(false, "projection to track " + std::to_string(keep) +
                                     " differs at trial " + std::to_string(trial));
                return;
            }
        }
    }

    // Projection across letters that pad the kept track: those letters turn
    // silent, so words shrink.  Acyclic automata keep the model finite.
    std::vector<Letter> padded = pool;
    for (std::uint32_t y : {0u, 2u}) {
        syms[0] = alpha2.pad();
        syms[1] = y;
        padded.push_back(alpha2.pack(syms));
    }
    auto words_padded = words_up_to(padded, 6);
    auto words_out = words_up_to(letters1, 6);
    for (int trial = 0; trial < 40; ++trial) {
        SyncAutomaton a = random_dag_nfa(rng, alpha2, padded, 5, 14);
        auto la = brute_language(a, words_padded);
        std::set<std::vector<Letter>> want;
        for (const auto& w : la) {
            std::vector<Letter> v;
            for (Letter l : w) {
                std::uint32_t s = alpha2.symbol_at(l, 0);
                if (s != alpha2.pad()) v.push_back(Letter(s));
            }
            want.insert(v);
        }
        SyncAutomaton p = project(a, {0});
        if (brute_language(p, words_out) != want) {
            c.require(false, "silent-letter projection differs at trial " + std::to_string(trial));
            return;
        }
    }
}

// ---- criterion 4: nestedness ----------------------------------------------

void c4_nested(Check& c) {
    c.require(check_nested(ex::fig1_mesh()).ok, "staircase mesh must be nested");
    c.require(check_nested(ex::fig5_left_mesh()).ok, "checkerboard mesh must be nested");
    c.require(check_nested(ex::fig5_right_mesh()).ok, "slab mesh must be nested");
    c.require(check_nested(ex::alternating_mesh()).ok, "alternating mesh must be nested");
    c.require(orc::nested_violations(fig1_explicit()).empty(),
              "direct check disagrees on the staircase mesh");
    c.require(orc::nested_violations(alternating_explicit(16)).empty(),
              "direct check disagrees on the alternating mesh");
    c.require(orc::nested_violations(left_explicit(8)).empty(),
              "direct check disagrees on the checkerboard mesh");
    c.require(orc::nested_violations(right_explicit(8)).empty(),
              "direct check disagrees on the slab mesh");

    // Ten mutations, each injecting one fine cell whose parent lies outside
    // the coarser subdomain.  The verdict must flip and the witness must be
    // exactly the injected cell, in both the engine and the direct check.
    for (int i = 0; i < 10; ++i) {
        HierarchicalMesh M;
        orc::ExplicitMesh E{1, 1, {}};
        std::vector<long> inj;
        if (i < 4) {
            // Staircase: a far-away fine cell over an unrefined region.
            inj = {40 + 2 * i, 41};
            M = ex::fig1_mesh();
            E = fig1_explicit();
        } else if (i < 7) {
            // Checkerboard: parent (50+i, 51+i) has odd coordinate sum.
            inj = {2 * (50 + i), 2 * (51 + i)};
            M = ex::fig5_left_mesh();
            E = left_explicit(8);
        } else {
            // Slabs: parent (23+i, 31) sits on an odd, unrefined row.
            inj = {2 * (23 + i), 62};
            M = ex::fig5_right_mesh();
            E = right_explicit(8);
        }
        M.languages[1] = minimize(
            union_of(M.languages[1], constant_point_automaton(barycentre_point(1, inj), M.base)));
        E.domains[1].insert(inj);

        auto res = check_nested(M);
        c.require(!res.ok, "mutation " + std::to_string(i) + " not detected");
        if (res.ok) return;
        c.require(res.level == 2 && res.witness.has_value(),
                  "mutation " + std::to_string(i) + " flagged at the wrong level");
        if (!res.witness) return;
        c.require(cell_from_barycentre(1, *res.witness) == inj,
                  "mutation " + std::to_string(i) + " witness is not the injected cell");

        auto viol = orc::nested_violations(E);
        c.require(viol.size() == 1 && viol[0].first == 2 && viol[0].second == inj,
                  "mutation " + std::to_string(i) + " direct check disagrees");
    }
}

// ---- criterion 5: clipped support connectivity ----------------------------

void c5_assumption_b(Check& c) {
    // One interval kept whole: every clipped support is an interval again.
    c.require(check_assumption_b(interval_mesh({0, 1, 2, 3}, 2)).ok,
              "quadratics over [0,4] with [0,4] refined must pass");

    // Two separated intervals: the support of the anchor between them is cut
    // into two pieces.
    auto res = check_assumption_b(interval_mesh({0, 2}, 2));
    c.require(!res.ok, "quadratics over [0,1] u [2,3] must fail");
    if (res.ok) return;
    c.require(res.level == 0, "split interval flagged at the wrong level");
    c.require(res.witness.has_value() && *res.witness == Point{make_rational(1, 2)},
              "split interval witness must be the barycentre 1/2");
    std::vector<std::vector<long>> split{{-1}, {1}};
    c.require(res.uncovered == split, "split interval must leave offsets {-1} and {1}");
    orc::ExplicitMesh Eint{1, 2, {orc::CellSet{{0}, {2}}}};
    c.require(orc::assumption_b_violation(Eint, 2, orc::Window{{-4}, {6}}).has_value(),
              "direct check must also fail the split interval");
    c.require(orc::uncovered_offsets(Eint, 2, 0, {0}) == split &&
                  !orc::offsets_connected(split),
              "direct check must leave the same split offsets");

    // Planar meshes against the direct check, degree by degree.
    orc::Window Wfig1{{-4, -4}, {13, 9}};
    for (int m = 1; m <= 3; ++m)
        mesh_vs_oracle(c, ex::fig1_mesh(m), fig1_explicit(), Wfig1,
                       "staircase degree " + std::to_string(m));
    orc::Window P{{-4, -4}, {4, 4}};
    for (int m = 1; m <= 3; ++m) {
        mesh_vs_oracle(c, ex::fig5_left_mesh(m), left_explicit(8), P,
                       "checkerboard degree " + std::to_string(m));
        mesh_vs_oracle(c, ex::fig5_right_mesh(m), right_explicit(8), P,
                       "slab degree " + std::to_string(m));
    }

    // The two canonical clipped-support shapes: a diamond of four cells that
    // stays connected through shared corners, and a six-cell double row that
    // falls apart.  The second one must be the uncovered set reported for the
    // slab mesh.
    std::vector<std::vector<long>> diamond{{-1, 0}, {0, -1}, {0, 1}, {1, 0}};
    std::vector<std::vector<long>> double_row{{-1, -1}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 1}};
    for (bool direct : {false, true}) {
        auto conn = direct ? orc::offsets_connected : regspline::offsets_connected;
        c.require(conn(diamond), "diamond must count as connected");
        c.require(!conn(double_row), "double row must count as disconnected");
    }

    // The engine's subset enumeration and the direct flood fill must agree on
    // every nonempty subset of the quadratic support.
    auto offs = support_offsets(2, 2);
    auto masks = connected_subsets(2, 2);
    std::set<std::uint32_t> listed(masks.begin(), masks.end());
    for (std::uint32_t mask = 1; mask < (1u << offs.size()); ++mask) {
        std::vector<std::vector<long>> sel;
        for (std::size_t k = 0; k < offs.size(); ++k)
            if (mask & (1u << k)) sel.push_back(offs[k]);
        if (orc::offsets_connected(sel) != (listed.count(mask) > 0)) {
            c.require(false, "classifiers disagree on subset mask " + std::to_string(mask));
            return;
        }
    }
    c.require(orc::uncovered_offsets(left_explicit(8), 2, 0, {0, 0}) == diamond,
              "checkerboard clip at the origin must be the diamond");
    c.require(check_assumption_b(ex::fig5_left_mesh(2)).ok,
              "checkerboard must pass at degree 2");
    auto slab = check_assumption_b(ex::fig5_right_mesh(2));
    c.require(!slab.ok && slab.level == 0, "slab must fail at degree 2 on level 0");
    if (slab.ok || !slab.witness) return;
    c.require(slab.uncovered == double_row, "slab must leave the double row uncovered");
    auto anchor = cell_from_barycentre(0, *slab.witness);
    c.require(orc::uncovered_offsets(right_explicit(8), 2, 0, anchor) == double_row,
              "direct check disagrees with the slab witness");
}

// ---- criterion 6: selected anchor languages -------------------------------

void c6_kraft(Check& c) {
    // Hand case: hats over [0,2] with all of [0,2] refined.  The one hat
    // whose support is covered drops out, three half-scale hats fit inside.
    HierarchicalMesh M = interval_mesh({0, 1}, 1);
    KraftBasis B = build_kraft_languages(M);
    orc::ExplicitMesh E{1, 2, {orc::CellSet{{0}, {1}}}};
    auto got0 = cells_in_box(B.level(0), 0, {-5}, {5}, B.base);
    std::vector<std::vector<long>> want0;
    for (long i = -5; i < 5; ++i)
        if (i != 1) want0.push_back({i});
    c.require(got0 == want0, "coarse hats must lose exactly the anchor at cell 1");
    auto got1 = cells_in_box(B.level(1), 1, {-10}, {10}, B.base);
    std::vector<std::vector<long>> want1{{1}, {2}, {3}};
    c.require(got1 == want1, "fine hats must be exactly the three inside [0,2]");
    for (int lev = 0; lev < 2; ++lev)
        kraft_vs_oracle(c, B, E, orc::Window{{-5}, {5}}, lev, "hats over [0,2]");

    // A mesh with no refinement keeps every anchor.
    KraftBasis flat = build_kraft_languages(ex::uniform_mesh(1, 3));
    c.require(are_equivalent(flat.level(0), level_filter_automaton(1, 0, Base{2})),
              "unrefined mesh must keep every anchor");

    // Fixture meshes against the direct construction, window by window.
    orc::Window Wfig1{{-4, -4}, {13, 9}};
    for (int m = 1; m <= 2; ++m) {
        KraftBasis Bf = build_kraft_languages(ex::fig1_mesh(m));
        for (int lev = 0; lev < 3; ++lev)
            kraft_vs_oracle(c, Bf, fig1_explicit(), Wfig1, lev,
                            "staircase degree " + std::to_string(m));
    }
    KraftBasis B1 = build_kraft_languages(ex::fig1_mesh(1));
    c.require(!contains_point(B1.level(0), barycentre_point(0, {1, 2}), B1.base),
              "the hat buried in the staircase block must drop out");
    c.require(contains_point(B1.level(0), barycentre_point(0, {0, 2}), B1.base) &&
                  contains_point(B1.level(0), barycentre_point(0, {-3, -3}), B1.base),
              "hats outside the staircase block must stay");

    KraftBasis Bl = build_kraft_languages(ex::fig5_left_mesh(2));
    for (int lev = 0; lev < 3; ++lev)
        kraft_vs_oracle(c, Bl, left_explicit(10), orc::Window{{-3, -3}, {3, 3}}, lev,
                        "checkerboard degree 2");

    KraftBasis Ba = build_kraft_languages(ex::alternating_mesh());
    c.require(is_empty(Ba.level(1)), "the middle alternating level must select nothing");
    for (int lev = 0; lev < 3; ++lev)
        kraft_vs_oracle(c, Ba, alternating_explicit(16), orc::Window{{-8}, {8}}, lev,
                        "alternating cubic");
}

// ---- criterion 7: exact evaluation ----------------------------------------

void c7_eval(Check& c) {
    std::mt19937 rng(707);

    // Degree 1 to 3 reproduce the identity, and the stored coefficients are
    // the shifted anchor averages that make that happen.
    for (int m = 1; m <= 3; ++m) {
        RegularSpline f = linear_spline({Rational(1)}, Rational(0), m);
        for (int trial = 0; trial < 100; ++trial) {
            Point x{rand_in_system(rng, 2, 8, 1L << 16)};
            if (evaluate(f, x).value != x[0]) {
                c.require(false, "degree " + std::to_string(m) + " identity fails at " +
                                     x[0].get_str());
                return;
            }
        }
        for (long a = -2; a <= 3; ++a) {
            auto cv = relation_coefficient(f, 0, {a});
            Rational expect = Rational(a) - Rational(orc::anchor_shift(m)) + make_rational(m + 1, 2);
            c.require(cv.has_value() && *cv == expect,
                      "degree " + std::to_string(m) + " coefficient at anchor " +
                          std::to_string(a) + " is wrong");
        }
    }
    for (int m = 0; m <= 3; ++m) {
        RegularSpline f = constant_spline(make_rational(5, 4), 1, m);
        for (int trial = 0; trial < 25; ++trial) {
            Point x{rand_in_system(rng, 2, 6, 1L << 12)};
            if (evaluate(f, x).value != make_rational(5, 4)) {
                c.require(false, "degree " + std::to_string(m) + " constant fails at " +
                                     x[0].get_str());
                return;
            }
        }
    }

    // Pinned fixture values.
    RegularSpline g = ex::spline_g();
    c.require(evaluate(g, {Rational(2)}).value == make_rational(2, 3), "g(2) must be 2/3");
    c.require(evaluate(g, {Rational(6)}).value == make_rational(-2, 3), "g(6) must be -2/3");
    c.require(evaluate(g, {Rational(4)}).value == Rational(0), "g(4) must be 0");
    c.require(evaluate(g, {make_rational(5, 2)}).value == make_rational(23, 48),
              "g(5/2) must be 23/48");
    RegularSpline h = ex::spline_h();
    c.require(evaluate(h, {make_rational(1, 2)}).value == make_rational(2, 3),
              "h(1/2) must be 2/3");
    c.require(evaluate(h, {make_rational(5, 2)}).value == make_rational(4, 3),
              "h(5/2) must be 4/3");

    // Cross-check against the direct evaluator, which recurses on the
    // B-spline pieces and reads coefficients one anchor at a time.
    auto cg = coefficients_of(g);
    for (const Rational& x : {Rational(2), Rational(6), make_rational(5, 2), make_rational(1, 3),
                              make_rational(7, 9)})
        c.require(orc::eval_spline(1, g.degree, g.levels, cg, {x}) == evaluate(g, {x}).value,
                  "direct evaluator disagrees on g at " + x.get_str());
    auto ch = coefficients_of(h);
    for (const Rational& x : {make_rational(1, 2), make_rational(5, 2), make_rational(-7, 4),
                              make_rational(9, 8)})
        c.require(orc::eval_spline(1, h.degree, h.levels, ch, {x}) == evaluate(h, {x}).value,
                  "direct evaluator disagrees on h at " + x.get_str());
    RegularSpline lin2 = linear_spline({Rational(1)}, Rational(0), 2);
    auto cl = coefficients_of(lin2);
    for (int trial = 0; trial < 10; ++trial) {
        Point x{rand_in_system(rng, 2, 4, 64)};
        c.require(orc::eval_spline(1, 2, 1, cl, x) == x[0],
                  "direct evaluator disagrees on the identity at " + x[0].get_str());
    }

    // Each evaluation reports at most (m+1)^d active anchors per level, with
    // local arguments strictly inside the support.
    for (int trial = 0; trial < 30; ++trial) {
        Point x{rand_in_system(rng, 2, 5, 64)};
        EvalResult r = evaluate(h, x);
        if (r.matches.size() > 12) {
            c.require(false, "more than 12 matches at " + x[0].get_str());
            return;
        }
        std::vector<int> per_level(3, 0);
        for (const EvalMatch& mt : r.matches) {
            per_level[static_cast<std::size_t>(mt.cell_level)]++;
            for (const Rational& t : mt.local)
                if (t <= 0 || t >= 4) {
                    c.require(false, "local argument outside (0,4) at " + x[0].get_str());
                    return;
                }
        }
        for (int lev = 0; lev < 3; ++lev)
            if (per_level[static_cast<std::size_t>(lev)] > 4) {
                c.require(false, "more than 4 matches on one level at " + x[0].get_str());
                return;
            }
    }
}

// ---- criterion 8: digit-length scaling ------------------------------------

void c8_scaling(Check& c) {
    RegularSpline h = ex::spline_h();
    evaluate(h, {make_rational(1, 2)}); // warm shared caches

    std::mt19937_64 rng(808);
    auto timed = [&](const Rational& x) {
        auto t0 = std::chrono::steady_clock::now();
        Rational v = evaluate(h, {x}).value;
        (void)v;
        return std::chrono::duration_cast<std::chrono::nanoseconds>(
                   std::chrono::steady_clock::now() - t0)
            .count();
    };
    auto fraction = [&](int bits) {
        Int n = 1;
        for (int i = 1; i < bits; ++i) n = n * 2 + static_cast<long>(rng() & 1);
        n = n * 2 + 1; // odd, so the encoding keeps exactly `bits` columns
        Rational x(n, pow_int(2, static_cast<unsigned>(bits)));
        x.canonicalize();
        return x;
    };

    std::vector<long long> t32, t64;
    for (int run = 0; run < 20; ++run) {
        t32.push_back(timed(fraction(32)));
        t64.push_back(timed(fraction(64)));
    }
    std::sort(t32.begin(), t32.end());
    std::sort(t64.begin(), t64.end());
    long long m32 = t32[t32.size() / 2], m64 = t64[t64.size() / 2];
    std::ostringstream os;
    os << "median " << m32 / 1000 << " us at 32 columns, " << m64 / 1000
       << " us at 64; doubling the digits must cost at most 2.5x";
    c.require(m32 > 0 && 2 * m64 <= 5 * m32, os.str());
}

// ---- criterion 9: refinement -----------------------------------------------

void c9_refine(Check& c) {
    auto stencil_is = [&](int m, std::vector<Rational> want) {
        c.require(subdivision_stencil(m) == want,
                  "degree " + std::to_string(m) + " subdivision stencil is wrong");
    };
    stencil_is(0, {Rational(1), Rational(1)});
    stencil_is(1, {make_rational(1, 2), Rational(1), make_rational(1, 2)});
    stencil_is(2, {make_rational(1, 4), make_rational(3, 4), make_rational(3, 4),
                   make_rational(1, 4)});
    stencil_is(3, {make_rational(1, 8), make_rational(1, 2), make_rational(3, 4),
                   make_rational(1, 2), make_rational(1, 8)});

    std::mt19937 rng(909);
    auto cell_range = [](long lo, long hi) {
        std::vector<std::vector<long>> cells;
        for (long i = lo; i <= hi; ++i) cells.push_back({i});
        return cells;
    };

    // Alternating cubic in base 6 over four subdivided cells.
    RegularSpline g = ex::spline_g();
    HierarchicalMesh gm = ex::uniform_mesh(1, 3, Base{6});
    RefinedSpline gr = refine_spline(g, gm, ex::cells_language(cell_range(-2, 1), 0, Base{6}));
    c.require(gr.mesh.levels == 2 && check_nested(gr.mesh).ok, "refined g mesh is malformed");
    for (int trial = 0; trial < 40; ++trial) {
        Point x{rand_in_system(rng, 6, 3, 200)};
        if (evaluate(g, x).value != evaluate(gr.spline, x).value) {
            c.require(false, "g changed at " + x[0].get_str());
            return;
        }
    }

    // Three-level ramp refined once more near the origin.
    RegularSpline h = ex::spline_h();
    HierarchicalMesh hm = ex::alternating_mesh();
    RefinedSpline hr = refine_spline(h, hm, ex::cells_language({{0}, {1}}, 2, Base{2}));
    c.require(hr.mesh.levels == 4 && check_nested(hr.mesh).ok, "refined h mesh is malformed");
    c.require(evaluate(hr.spline, {make_rational(1, 2)}).value == make_rational(2, 3),
              "refined h lost its value at 1/2");
    for (int trial = 0; trial < 40; ++trial) {
        Point x{rand_in_system(rng, 2, 5, 64)};
        if (evaluate(h, x).value != evaluate(hr.spline, x).value) {
            c.require(false, "h changed at " + x[0].get_str());
            return;
        }
    }

    // Quadratic reproduction of the identity survives refinement.
    RegularSpline lin = linear_spline({Rational(1)}, Rational(0), 2);
    HierarchicalMesh lm = ex::uniform_mesh(1, 2);
    RefinedSpline lr = refine_spline(lin, lm, ex::cells_language(cell_range(-3, 2), 0, Base{2}));
    for (int trial = 0; trial < 40; ++trial) {
        Point x{rand_in_system(rng, 2, 5, 128)};
        if (evaluate(lr.spline, x).value != x[0]) {
            c.require(false, "refined identity broke at " + x[0].get_str());
            return;
        }
    }

    // Planar function in two dimensions.
    RegularSpline plane = linear_spline({Rational(1), Rational(1)}, Rational(0), 1);
    HierarchicalMesh pm = ex::uniform_mesh(2, 1);
    RefinedSpline pr = refine_spline(
        plane, pm, ex::cells_language({{0, 0}, {0, 1}, {1, 0}, {1, 1}}, 0, Base{2}));
    for (int trial = 0; trial < 40; ++trial) {
        Point x{rand_in_system(rng, 2, 4, 24), rand_in_system(rng, 2, 4, 24)};
        if (evaluate(pr.spline, x).value != x[0] + x[1]) {
            c.require(false, "refined plane broke at (" + x[0].get_str() + "," + x[1].get_str() +
                                 ")");
            return;
        }
    }

    // Degree-zero boxes split exactly in two, including on a cell boundary.
    RegularSpline steps = constant_spline(Rational(1), 1, 0);
    HierarchicalMesh sm = ex::uniform_mesh(1, 0);
    RefinedSpline sr = refine_spline(steps, sm, ex::cells_language(cell_range(0, 3), 0, Base{2}));
    c.require(evaluate(sr.spline, {Rational(2)}).value == Rational(1),
              "box refinement broke on the boundary point 2");
    for (int trial = 0; trial < 40; ++trial) {
        Point x{rand_in_system(rng, 2, 5, 64)};
        if (evaluate(sr.spline, x).value != Rational(1)) {
            c.require(false, "box refinement broke at " + x[0].get_str());
            return;
        }
    }
}

// ---- criterion 10: command line pipeline -----------------------------------

void c10_cli(Check& c) {
    const std::string cli = REGSPLINE_CLI_PATH;
    fs::path dir = fs::temp_directory_path() /
                   ("regspline-acceptance-" + std::to_string(static_cast<long>(getpid())));
    fs::create_directories(dir);
    const std::string D = dir.string();
    const std::string log = (dir / "cli.log").string();

    auto run = [&](const std::string& args) {
        std::string cmd = cli + " " + args + " >> " + log + " 2>&1";
        int st = std::system(cmd.c_str());
        if (st == -1 || !WIFEXITED(st)) return -1;
        return static_cast<int>(WEXITSTATUS(st));
    };
    auto expect = [&](const std::string& args, int want) {
        int got = run(args);
        c.require(got == want, "`" + args + "` exited " + std::to_string(got) + ", expected " +
                                   std::to_string(want));
        return got == want;
    };

    for (const char* name : {"fig1-mesh", "fig5-left", "fig5-right", "spline-g", "spline-h",
                             "linear-m1", "linear-m2", "linear-m3"})
        if (!expect(std::string("examples ") + name + " " + D, 0)) return;

    for (const char* mesh : {"fig1-mesh", "fig5-left", "fig5-right"})
        if (!expect(std::string("check-nested ") + D + "/" + mesh + ".mesh", 0)) return;

    // The checkerboard passes at its stored degree; the staircase and the
    // slab genuinely fail there, so the pipeline verifies them at degree 1
    // and separately confirms the slab failure exit.
    if (!expect("check-assumption-b " + D + "/fig5-left.mesh", 0)) return;
    if (!expect("check-assumption-b --degree 1 " + D + "/fig1-mesh.mesh", 0)) return;
    if (!expect("check-assumption-b --degree 1 " + D + "/fig5-right.mesh", 0)) return;
    if (!expect("check-assumption-b " + D + "/fig5-right.mesh", 1)) return;

    if (!expect("kraft " + D + "/fig5-left.mesh " + D, 0)) return;
    if (!expect("kraft --degree 1 " + D + "/fig1-mesh.mesh " + D, 0)) return;
    if (!expect("kraft --degree 1 " + D + "/fig5-right.mesh " + D, 0)) return;
    for (const char* stem : {"fig5-left", "fig1-mesh", "fig5-right"})
        c.require(fs::exists(dir / (std::string(stem) + ".kraft")),
                  std::string(stem) + ".kraft was not written");

    const std::pair<const char*, const char*> points[5] = {
        {"spline-g", "2 6 5/2 1/3"},
        {"spline-h", "1/2 5/2 -7/4"},
        {"linear-m1", "5/4 -7/8"},
        {"linear-m2", "3/4 9/8"},
        {"linear-m3", "1/8 -5/2"},
    };
    for (const auto& [stem, pts] : points) {
        std::string manifest = D + "/" + stem + ".spline";
        if (!expect("eval " + manifest + " " + std::string(pts) + " --oracle", 0)) return;
        if (!expect("refine " + manifest + " " + D + "/" + stem + ".next.aut " + D, 0)) return;
        std::string refined = D + "/" + stem + "-refined.spline";
        c.require(fs::exists(refined), std::string(stem) + "-refined.spline was not written");
        if (!expect("eval " + refined + " " + std::string(pts) + " --oracle", 0)) return;
    }

    std::string plot = (dir / "plot.txt").string();
    int st = std::system(
        (cli + " plotdata " + D + "/spline-g.spline 0..8 1/4 > " + plot + " 2>> " + log).c_str());
    c.require(st != -1 && WIFEXITED(st) && WEXITSTATUS(st) == 0, "plotdata failed");
    std::ifstream in(plot);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    c.require(lines.size() == 33, "plotdata must print 33 samples over 0..8 step 1/4");
    auto has_line = [&](const std::string& want) {
        return std::find(lines.begin(), lines.end(), want) != lines.end();
    };
    c.require(has_line("2\t2/3") && has_line("6\t-2/3") && has_line("4\t0"),
              "plotdata samples disagree with the pinned values of g");

    if (c.ok) fs::remove_all(dir);
}

struct Criterion {
    int id;
    const char* what;
    long budget_ms;
    std::function<void(Check&)> fn;
};

} // namespace

int main() {
    const std::vector<Criterion> suite = {
        {1, "two-row numerals encode, decode and print faithfully", 5000, c1_encoding},
        {2, "the addition relation accepts sums and rejects near misses", 30000, c2_addition},
        {3, "boolean and projection closures match brute force", 60000, c3_closure},
        {4, "nestedness verdicts and witnesses match the direct check", 60000, c4_nested},
        {5, "clipped support connectivity matches the direct check", 120000, c5_assumption_b},
        {6, "selected anchor languages match the direct construction", 60000, c6_kraft},
        {7, "point evaluation is exact on pinned and random inputs", 60000, c7_eval},
        {8, "evaluation cost grows mildly from 32 to 64 digit points", 120000, c8_scaling},
        {9, "refinement preserves values and subdivision stencils", 120000, c9_refine},
        {10, "the command line pipeline runs end to end", 300000, c10_cli},
    };
    bool all = true;
    for (const Criterion& cr : suite) {
        Check c;
        auto t0 = std::chrono::steady_clock::now();
        try {
            cr.fn(c);
        } catch (const std::exception& e) {
            c.require(false, std::string("unexpected exception: ") + e.what());
        }
        long ms = static_cast<long>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                        std::chrono::steady_clock::now() - t0)
                                        .count());
        bool in_budget = ms <= cr.budget_ms;
        if (!in_budget && c.ok) c.detail = "over the time budget";
        bool pass = c.ok && in_budget;
        std::printf("criterion %2d %s  %-62s (%ld ms / %ld ms)\n", cr.id, pass ? "PASS" : "FAIL",
                    cr.what, ms, cr.budget_ms);
        if (!pass) std::printf("              %s\n", c.detail.c_str());
        std::fflush(stdout);
        all = all && pass;
    }
    return all ? 0 : 1;
}
