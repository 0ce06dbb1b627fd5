#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <string>

#include "regspline/automaton.hpp"
#include "regspline/encoding.hpp"

namespace regspline {

namespace cache {

/// Constructions here are pure functions of their parameters, so results are
/// memoised process-wide.  std::map keeps references stable.
inline const SyncAutomaton& memo(const std::string& key,
                                 const std::function<SyncAutomaton()>& build) {
    static std::map<std::string, SyncAutomaton> table;
    static std::mutex lock;
    std::unique_lock<std::mutex> guard(lock);
    auto it = table.find(key);
    if (it != table.end()) return it->second;
    guard.unlock();
    SyncAutomaton a = build();
    guard.lock();
    return table.emplace(key, std::move(a)).first->second;
}

} // namespace cache

namespace detail {

inline int sign_code(int base, bool negative) { return negative ? base + 1 : 0; }

/// Single-track language of canonical encodings.
inline SyncAutomaton valid_encoding_1track(int b) {
    TrackAlphabet alpha(b, 1);
    SyncAutomaton a;
    a.alphabet = alpha;
    a.deterministic = true;
    State q0 = a.add_state(false);
    State live = a.add_state(true);  // sign seen, value so far ends in a nonzero column
    State sneg = a.add_state(false); // sign '-' seen, no columns yet
    State pend = a.add_state(false); // trailing zero columns pending
    a.initial.push_back(q0);
    std::uint32_t pos = static_cast<std::uint32_t>(sign_code(b, false));
    std::uint32_t neg = static_cast<std::uint32_t>(sign_code(b, true));
    a.add_edge(q0, pos, live);
    a.add_edge(q0, neg, sneg);
    for (int code = 0; code < b * b; ++code) {
        State to = code == 0 ? pend : live;
        a.add_edge(live, static_cast<Letter>(code), to);
        a.add_edge(sneg, static_cast<Letter>(code), to);
        a.add_edge(pend, static_cast<Letter>(code), to);
    }
    a.finish_edges();
    return minimize(a);
}

/// Sign-constrained variants: "positive" excludes zero, "negative" all < 0,
/// "nonnegative" includes zero.
inline SyncAutomaton sign_language_1track(int b, int mode /*0:>0, 1:<0, 2:>=0*/) {
    TrackAlphabet alpha(b, 1);
    SyncAutomaton a;
    a.alphabet = alpha;
    a.deterministic = true;
    State q0 = a.add_state(false);
    State start = a.add_state(mode == 2); // sign consumed; accepting iff zero allowed
    State live = a.add_state(true);
    State pend = a.add_state(false);
    a.initial.push_back(q0);
    a.add_edge(q0, static_cast<Letter>(sign_code(b, mode == 1)), start);
    for (int code = 0; code < b * b; ++code) {
        State to = code == 0 ? pend : live;
        a.add_edge(start, static_cast<Letter>(code), to);
        a.add_edge(live, static_cast<Letter>(code), to);
        a.add_edge(pend, static_cast<Letter>(code), to);
    }
    a.finish_edges();
    return minimize(a);
}

/// Encodings of integers (fraction row identically zero).
inline SyncAutomaton integer_1track(int b) {
    TrackAlphabet alpha(b, 1);
    SyncAutomaton a;
    a.alphabet = alpha;
    a.deterministic = true;
    State q0 = a.add_state(false);
    State pos = a.add_state(true);
    State neg = a.add_state(false);
    State live = a.add_state(true);
    State pend = a.add_state(false);
    a.initial.push_back(q0);
    a.add_edge(q0, static_cast<Letter>(sign_code(b, false)), pos);
    a.add_edge(q0, static_cast<Letter>(sign_code(b, true)), neg);
    for (int alpha_digit = 0; alpha_digit < b; ++alpha_digit) {
        Letter code = static_cast<Letter>(alpha_digit * b); // beta = 0
        State to = alpha_digit == 0 ? pend : live;
        a.add_edge(pos, code, to);
        a.add_edge(neg, code, to);
        a.add_edge(live, code, to);
        a.add_edge(pend, code, to);
    }
    a.finish_edges();
    return minimize(a);
}

/// Encodings of odd integers.  The base is even, so parity is decided by the
/// first integer digit alone.
inline SyncAutomaton odd_integer_1track(int b) {
    TrackAlphabet alpha(b, 1);
    SyncAutomaton a;
    a.alphabet = alpha;
    a.deterministic = true;
    State q0 = a.add_state(false);
    State sgn = a.add_state(false);
    State live = a.add_state(true);
    State pend = a.add_state(false);
    a.initial.push_back(q0);
    a.add_edge(q0, static_cast<Letter>(sign_code(b, false)), sgn);
    a.add_edge(q0, static_cast<Letter>(sign_code(b, true)), sgn);
    for (int d = 1; d < b; d += 2) a.add_edge(sgn, static_cast<Letter>(d * b), live);
    for (int d = 0; d < b; ++d) {
        Letter code = static_cast<Letter>(d * b);
        State to = d == 0 ? pend : live;
        a.add_edge(live, code, to);
        a.add_edge(pend, code, to);
    }
    a.finish_edges();
    return minimize(a);
}

/// Nondeterministic addition core over one coordinate (tracks u, v, w with
/// u + v = w).  Reads the sign column, guesses the carry flowing from the
/// fraction row into the integer row, then checks both digit equations:
/// forward carry on the integer row, backward remainder on the fraction row.
/// Padding counts as a zero digit; canonicality is enforced by intersecting
/// with the encoding language per track afterwards.
inline SyncAutomaton addition_core(int b) {
    TrackAlphabet alpha(b, 3);
    SyncAutomaton a;
    a.alphabet = alpha;
    a.deterministic = false;
    auto state_id = [&](int su, int sv, int sw, int c, int r) {
        return static_cast<State>(1 + (((su * 2 + sv) * 2 + sw) * 5 + (c + 2)) * 3 + (r + 1));
    };
    State q0 = a.add_state(false);
    a.initial.push_back(q0);
    for (int su = 0; su < 2; ++su)
        for (int sv = 0; sv < 2; ++sv)
            for (int sw = 0; sw < 2; ++sw)
                for (int c = -2; c <= 2; ++c)
                    for (int r = -1; r <= 1; ++r)
                        a.add_state(c == 0 && r == 0);
    std::array<std::uint32_t, 3> letter{};
    for (int su = 0; su < 2; ++su)
        for (int sv = 0; sv < 2; ++sv)
            for (int sw = 0; sw < 2; ++sw) {
                letter[0] = static_cast<std::uint32_t>(sign_code(b, su));
                letter[1] = static_cast<std::uint32_t>(sign_code(b, sv));
                letter[2] = static_cast<std::uint32_t>(sign_code(b, sw));
                for (int e = -1; e <= 1; ++e)
                    a.add_edge(q0, alpha.pack(letter.data()), state_id(su, sv, sw, e, e));
            }
    std::uint32_t pad = alpha.pad();
    auto each_symbol = [&](auto&& fn) {
        fn(pad, 0, 0);
        for (int ad = 0; ad < b; ++ad)
            for (int fd = 0; fd < b; ++fd) fn(static_cast<std::uint32_t>(ad * b + fd), ad, fd);
    };
    for (int su = 0; su < 2; ++su)
        for (int sv = 0; sv < 2; ++sv)
            for (int sw = 0; sw < 2; ++sw) {
                int pu = su ? -1 : 1, pv = sv ? -1 : 1, pw = sw ? -1 : 1;
                for (int c = -2; c <= 2; ++c)
                    for (int r = -1; r <= 1; ++r) {
                        State from = state_id(su, sv, sw, c, r);
                        each_symbol([&](std::uint32_t cu, int au, int fu) {
                            each_symbol([&](std::uint32_t cv, int av, int fv) {
                                int aw = ((pu * au + pv * av + c) * pw) % b;
                                if (aw < 0) aw += b;
                                int t = pu * au + pv * av - pw * aw + c;
                                if (t % b != 0) return;
                                int c2 = t / b;
                                if (c2 < -2 || c2 > 2) return;
                                for (int r2 = -1; r2 <= 1; ++r2) {
                                    int f_total = b * r - r2;
                                    int fw = (pu * fu + pv * fv - f_total) * pw;
                                    if (fw < 0 || fw >= b) continue;
                                    State to = state_id(su, sv, sw, c2, r2);
                                    letter[0] = cu;
                                    letter[1] = cv;
                                    letter[2] = static_cast<std::uint32_t>(aw * b + fw);
                                    a.add_edge(from, alpha.pack(letter.data()), to);
                                    if (aw == 0 && fw == 0) {
                                        letter[2] = pad;
                                        a.add_edge(from, alpha.pack(letter.data()), to);
                                    }
                                }
                            });
                        });
                    }
            }
    a.finish_edges();
    return trim(a);
}

} // namespace detail

/// Language of canonical base-b encodings per track, d independent tracks.
inline SyncAutomaton valid_encoding_automaton(Base b, int d) {
    return cache::memo("valid/" + std::to_string(b.value) + "/" + std::to_string(d), [&] {
        SyncAutomaton cur = detail::valid_encoding_1track(b.value);
        for (int j = 1; j < d; ++j) {
            cur = synchronized_product(cur, identity_track_map(j), detail::valid_encoding_1track(b.value),
                                       {j}, j + 1);
            cur = minimize(cur);
        }
        return cur;
    });
}

inline SyncAutomaton zero_automaton(Base b) {
    EncodedNumber z;
    z.base = b.value;
    return singleton_automaton(word_from_encodings({z}, b.value));
}

inline SyncAutomaton positive_automaton(Base b) {
    return cache::memo("pos/" + std::to_string(b.value),
                       [&] { return detail::sign_language_1track(b.value, 0); });
}

inline SyncAutomaton negative_automaton(Base b) {
    return cache::memo("neg/" + std::to_string(b.value),
                       [&] { return detail::sign_language_1track(b.value, 1); });
}

inline SyncAutomaton nonnegative_automaton(Base b) {
    return cache::memo("nonneg/" + std::to_string(b.value),
                       [&] { return detail::sign_language_1track(b.value, 2); });
}

inline SyncAutomaton integer_automaton(Base b) {
    return cache::memo("int/" + std::to_string(b.value),
                       [&] { return detail::integer_1track(b.value); });
}

inline SyncAutomaton odd_integer_automaton(Base b) {
    return cache::memo("oddint/" + std::to_string(b.value),
                       [&] { return detail::odd_integer_1track(b.value); });
}

/// 3d-track relation u + v = w on d-dimensional points; track layout is
/// (u_1..u_d, v_1..v_d, w_1..w_d).
inline SyncAutomaton addition_automaton(Base b, int d) {
    return cache::memo("add/" + std::to_string(b.value) + "/" + std::to_string(d), [&] {
        SyncAutomaton one = detail::addition_core(b.value);
        for (int t = 0; t < 3; ++t)
            one = synchronized_product(one, identity_track_map(3), detail::valid_encoding_1track(b.value),
                                       {t}, 3);
        one = minimize(one);
        if (d == 1) return one;
        SyncAutomaton cur = one;
        for (int j = 1; j < d; ++j)
            cur = synchronized_product(cur, identity_track_map(3 * j), one, {3 * j, 3 * j + 1, 3 * j + 2},
                                       3 * (j + 1));
        // Interleaved (u_0,v_0,w_0,u_1,...) -> grouped (u_0..,v_0..,w_0..).
        std::vector<int> source(3 * d);
        for (int t = 0; t < 3 * d; ++t) source[t] = (t % d) * 3 + t / d;
        return minimize(reorder_tracks(cur, source));
    });
}

/// 2d-track relation "strictly less in every coordinate".
inline SyncAutomaton less_than_automaton(Base b, int d) {
    return cache::memo("lt/" + std::to_string(b.value) + "/" + std::to_string(d), [&] {
        SyncAutomaton add1 = addition_automaton(b, 1);
        SyncAutomaton gap = synchronized_product(add1, identity_track_map(3), positive_automaton(b),
                                                 {1}, 3);
        SyncAutomaton one = minimize(project(gap, {0, 2}));
        if (d == 1) return one;
        SyncAutomaton cur = one;
        for (int j = 1; j < d; ++j)
            cur = synchronized_product(cur, identity_track_map(2 * j), one, {2 * j, 2 * j + 1},
                                       2 * (j + 1));
        std::vector<int> source(2 * d);
        for (int t = 0; t < 2 * d; ++t) source[t] = (t % d) * 2 + t / d;
        return minimize(reorder_tracks(cur, source));
    });
}

/// 2-track relation y = -x.
inline SyncAutomaton negation_automaton(Base b) {
    return cache::memo("negate/" + std::to_string(b.value), [&] {
        int base = b.value;
        TrackAlphabet alpha(base, 2);
        SyncAutomaton a;
        a.alphabet = alpha;
        a.deterministic = true;
        State q0 = a.add_state(false);
        State zero = a.add_state(true);
        State sgn = a.add_state(false);
        State live = a.add_state(true);
        State pend = a.add_state(false);
        a.initial.push_back(q0);
        std::uint32_t pos = static_cast<std::uint32_t>(detail::sign_code(base, false));
        std::uint32_t neg = static_cast<std::uint32_t>(detail::sign_code(base, true));
        std::array<std::uint32_t, 2> l{};
        auto edge = [&](State f, std::uint32_t x, std::uint32_t y, State t) {
            l[0] = x;
            l[1] = y;
            a.add_edge(f, alpha.pack(l.data()), t);
        };
        edge(q0, pos, pos, zero);
        edge(q0, pos, neg, sgn);
        edge(q0, neg, pos, sgn);
        for (int code = 1; code < base * base; ++code) {
            edge(sgn, static_cast<std::uint32_t>(code), static_cast<std::uint32_t>(code), live);
            edge(live, static_cast<std::uint32_t>(code), static_cast<std::uint32_t>(code), live);
            edge(pend, static_cast<std::uint32_t>(code), static_cast<std::uint32_t>(code), live);
        }
        edge(sgn, 0, 0, pend);
        edge(live, 0, 0, pend);
        edge(pend, 0, 0, pend);
        a.finish_edges();
        return minimize(a);
    });
}

/// 2-track relation y = x (one coordinate per call site; d independent copies
/// are produced by the d parameter).
inline SyncAutomaton equality_automaton(Base b, int d) {
    return cache::memo("eq/" + std::to_string(b.value) + "/" + std::to_string(d), [&] {
        SyncAutomaton v1 = detail::valid_encoding_1track(b.value);
        SyncAutomaton one;
        one.alphabet = TrackAlphabet(b.value, 2);
        one.deterministic = v1.deterministic;
        one.accepting = v1.accepting;
        one.initial = v1.initial;
        one.edges.resize(v1.state_count());
        std::array<std::uint32_t, 2> l{};
        for (State s = 0; s < v1.state_count(); ++s)
            for (auto [letter, t] : v1.edges[s]) {
                l[0] = l[1] = static_cast<std::uint32_t>(letter);
                one.add_edge(s, one.alphabet.pack(l.data()), t);
            }
        one.finish_edges();
        if (d == 1) return one;
        SyncAutomaton cur = one;
        for (int j = 1; j < d; ++j)
            cur = synchronized_product(cur, identity_track_map(2 * j), one, {2 * j, 2 * j + 1},
                                       2 * (j + 1));
        std::vector<int> source(2 * d);
        for (int t = 0; t < 2 * d; ++t) source[t] = (t % d) * 2 + t / d;
        return minimize(reorder_tracks(cur, source));
    });
}

/// {(x, z) : exists y with r(x, y) and s(y, z)} for 2-track relations.
inline SyncAutomaton compose_relations(const SyncAutomaton& r, const SyncAutomaton& s) {
    SyncAutomaton joined = synchronized_product(r, {0, 1}, s, {1, 2}, 3);
    return minimize(project(joined, {0, 2}));
}

inline SyncAutomaton transpose_relation(const SyncAutomaton& r) {
    return reorder_tracks(r, {1, 0});
}

namespace detail {

inline SyncAutomaton integer_scale_relation(Base b, const Int& p);

/// {(x, y) : y = x + x}.
inline SyncAutomaton doubling_relation(Base b) {
    SyncAutomaton add1 = addition_automaton(b, 1);
    SyncAutomaton diag =
        synchronized_product(add1, {0, 0, 1}, valid_encoding_1track(b.value), {0}, 2);
    return minimize(diag);
}

inline SyncAutomaton integer_scale_relation(Base b, const Int& p) {
    return cache::memo("scaleint/" + std::to_string(b.value) + "/" + p.get_str(), [&]() -> SyncAutomaton {
        if (p == 0)
            return minimize(synchronized_product(valid_encoding_1track(b.value), {0}, zero_automaton(b),
                                                 {1}, 2));
        if (p < 0) return compose_relations(integer_scale_relation(b, -p), negation_automaton(b));
        if (p == 1) return equality_automaton(b, 1);
        if (p % 2 == 0) return compose_relations(integer_scale_relation(b, p / 2), doubling_relation(b));
        SyncAutomaton prev = integer_scale_relation(b, p - 1);
        SyncAutomaton joined = synchronized_product(prev, {0, 1}, addition_automaton(b, 1), {0, 1, 2}, 3);
        return minimize(project(joined, {0, 2}));
    });
}

} // namespace detail

/// 2-track relation y = mu * x for a fixed scalar mu in Z[1/b].  Built as
/// p x = q y with mu = p/q reduced: two carry-bounded integer scalings glued
/// at the common product, which stays small where chains of digit-shift
/// compositions blow up during determinization.
inline SyncAutomaton scalar_multiple_automaton(const Rational& mu, Base b) {
    DyadicRational guard(mu, b); // reject factors that leave Z[1/b]
    (void)guard;
    Int p = mu.get_num(), q = mu.get_den();
    return cache::memo(
        "scale/" + std::to_string(b.value) + "/" + p.get_str() + "/" + q.get_str(), [&] {
            return compose_relations(detail::integer_scale_relation(b, p),
                                     transpose_relation(detail::integer_scale_relation(b, q)));
        });
}

/// d-track singleton language of one encoded point.
inline SyncAutomaton constant_point_automaton(const Point& p, Base b) {
    return singleton_automaton(word_from_encodings(encode_point(p, b), b.value));
}

/// Membership of a rational point in a d-track language.
inline bool contains_point(const SyncAutomaton& lang, const Point& p, Base b) {
    if (static_cast<int>(p.size()) != lang.alphabet.tracks)
        throw usage_error("contains_point: dimension mismatch");
    return accepts(lang, word_from_encodings(encode_point(p, b), b.value));
}

inline bool contains_value(const SyncAutomaton& lang, const Rational& x, Base b) {
    return contains_point(lang, Point{x}, b);
}

/// {a + shift : a in L(lang)} for a d-track language.  One coordinate at a
/// time, so only the scalar adder is ever materialized: the d-dimensional
/// adder has edge sets that grow like the d-th power of the alphabet.
inline SyncAutomaton shift_language(const SyncAutomaton& lang, const Point& shift, Base b) {
    int d = lang.alphabet.tracks;
    if (static_cast<int>(shift.size()) != d) throw usage_error("shift: dimension mismatch");
    if (lang.alphabet.base != b.value) throw usage_error("shift: base mismatch");
    SyncAutomaton cur = lang;
    for (int k = 0; k < d; ++k) {
        const Rational& s = shift[static_cast<std::size_t>(k)];
        if (s == 0) continue;
        SyncAutomaton tmp = synchronized_product(cur, identity_track_map(d),
                                                 constant_point_automaton({s}, b), {d}, d + 1);
        tmp = synchronized_product(tmp, identity_track_map(d + 1), addition_automaton(b, 1),
                                   {k, d, d + 1}, d + 2);
        std::vector<int> keep(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) keep[static_cast<std::size_t>(i)] = i == k ? d + 1 : i;
        cur = minimize(project(tmp, keep));
    }
    return cur;
}

/// {a + b : a in L(x), b in L(y)} for d-track languages.
inline SyncAutomaton sum_language(const SyncAutomaton& x, const SyncAutomaton& y, Base b) {
    int d = x.alphabet.tracks;
    SyncAutomaton add = addition_automaton(b, d);
    std::vector<int> xmap(d), ymap(d), keep(d);
    for (int i = 0; i < d; ++i) {
        xmap[i] = i;
        ymap[i] = d + i;
        keep[i] = 2 * d + i;
    }
    SyncAutomaton joined = synchronized_product(add, identity_track_map(3 * d), x, xmap, 3 * d);
    joined = synchronized_product(joined, identity_track_map(3 * d), y, ymap, 3 * d);
    return minimize(project(joined, keep));
}

/// {k * v : k integer} for a fixed point v.
inline SyncAutomaton span_automaton(const Point& v, Base b) {
    int d = static_cast<int>(v.size());
    SyncAutomaton cur; // tracks: (k, y_1..y_j)
    {
        SyncAutomaton r = scalar_multiple_automaton(v[0], b);
        cur = r; // tracks (k, y_1)
    }
    for (int j = 1; j < d; ++j) {
        SyncAutomaton r = scalar_multiple_automaton(v[j], b);
        cur = synchronized_product(cur, identity_track_map(j + 1), r, {0, j + 1}, j + 2);
    }
    cur = synchronized_product(cur, identity_track_map(d + 1), integer_automaton(b), {0}, d + 1);
    std::vector<int> keep(d);
    for (int i = 0; i < d; ++i) keep[i] = i + 1;
    return minimize(project(cur, keep));
}

/// {mu * k : k integer} as a language.
inline SyncAutomaton multiples_automaton(const Rational& mu, Base b) {
    return span_automaton(Point{mu}, b);
}

/// Finite union of translates: { t + sum_j k_j v_j }.
inline SyncAutomaton lattice_language(const std::vector<Point>& translates,
                                      const std::vector<Point>& vectors, Base b) {
    if (translates.empty()) throw usage_error("lattice_language: no translates");
    int d = static_cast<int>(translates.front().size());
    SyncAutomaton span;
    bool have = false;
    for (const auto& v : vectors) {
        SyncAutomaton s = span_automaton(v, b);
        span = have ? sum_language(span, s, b) : s;
        have = true;
    }
    SyncAutomaton out;
    bool first = true;
    for (const auto& t : translates) {
        SyncAutomaton shifted = have ? shift_language(span, t, b) : constant_point_automaton(t, b);
        out = first ? shifted : union_of(out, shifted);
        first = false;
    }
    (void)d;
    return minimize(out);
}

} // namespace regspline
