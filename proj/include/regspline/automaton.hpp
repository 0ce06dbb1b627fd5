#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "regspline/encoding.hpp"
#include "regspline/error.hpp"

namespace regspline {

using State = std::uint32_t;
using Letter = std::uint64_t;

inline constexpr State kNoState = static_cast<State>(-1);
inline constexpr int kMaxTracks = 12;

/// Alphabet of a k-track synchronous automaton over base b.  A track symbol
/// is either a digit pair packed as alpha * b + beta, or the padding symbol
/// b * b.  A letter packs one symbol per track; the all-padding letter is not
/// part of the alphabet.
struct TrackAlphabet {
    int base = 2;
    int tracks = 1;

    TrackAlphabet() = default;
    TrackAlphabet(int base_, int tracks_) : base(base_), tracks(tracks_) {
        if (base < 2) throw usage_error("alphabet base must be >= 2");
        if (tracks < 1 || tracks > kMaxTracks) throw usage_error("track count out of range");
        unsigned __int128 top = 1;
        for (int i = 0; i < tracks; ++i) top *= stride();
        if (top > static_cast<unsigned __int128>(UINT64_MAX))
            throw usage_error("alphabet too large to pack letters");
    }

    std::uint32_t stride() const { return static_cast<std::uint32_t>(base * base + 1); }
    std::uint32_t pad() const { return static_cast<std::uint32_t>(base * base); }

    bool operator==(const TrackAlphabet& o) const { return base == o.base && tracks == o.tracks; }
    bool operator!=(const TrackAlphabet& o) const { return !(*this == o); }

    Letter pack(const std::uint32_t* symbols) const {
        Letter v = 0;
        for (int i = tracks - 1; i >= 0; --i) v = v * stride() + symbols[i];
        return v;
    }
    Letter pack(const std::vector<std::uint32_t>& symbols) const { return pack(symbols.data()); }

    void unpack(Letter v, std::uint32_t* symbols) const {
        for (int i = 0; i < tracks; ++i) {
            symbols[i] = static_cast<std::uint32_t>(v % stride());
            v /= stride();
        }
    }

    std::uint32_t symbol_at(Letter v, int track) const {
        for (int i = 0; i < track; ++i) v /= stride();
        return static_cast<std::uint32_t>(v % stride());
    }

    Letter all_pad_letter() const {
        std::array<std::uint32_t, kMaxTracks> s{};
        for (int i = 0; i < tracks; ++i) s[i] = pad();
        return pack(s.data());
    }

    bool is_all_pad(Letter v) const { return v == all_pad_letter(); }
};

/// A word over a track alphabet: the convolution of one digit string per track.
struct TrackWord {
    TrackAlphabet alphabet;
    std::vector<Letter> letters;

    std::size_t size() const { return letters.size(); }
    bool operator==(const TrackWord& o) const {
        return alphabet == o.alphabet && letters == o.letters;
    }
};

/// Convolution: tracks of different lengths are padded at the end.
inline TrackWord convolve(const std::vector<std::vector<int>>& track_symbols, int base) {
    TrackAlphabet alpha(base, static_cast<int>(track_symbols.size()));
    std::size_t len = 0;
    for (const auto& t : track_symbols) len = std::max(len, t.size());
    TrackWord w;
    w.alphabet = alpha;
    std::array<std::uint32_t, kMaxTracks> s{};
    for (std::size_t i = 0; i < len; ++i) {
        for (std::size_t t = 0; t < track_symbols.size(); ++t)
            s[t] = i < track_symbols[t].size() ? static_cast<std::uint32_t>(track_symbols[t][i])
                                               : alpha.pad();
        w.letters.push_back(alpha.pack(s.data()));
    }
    return w;
}

inline TrackWord word_from_encodings(const std::vector<EncodedNumber>& encs, int base) {
    std::vector<std::vector<int>> tracks;
    tracks.reserve(encs.size());
    for (const auto& e : encs) {
        if (e.base != base) throw usage_error("encoding base mismatch in convolution");
        tracks.push_back(e.symbol_codes());
    }
    return convolve(tracks, base);
}

/// Splits a convolution back into per-track encodings (trailing pads dropped).
inline std::vector<EncodedNumber> encodings_from_word(const TrackWord& w) {
    int base = w.alphabet.base;
    std::vector<EncodedNumber> out(w.alphabet.tracks);
    for (int t = 0; t < w.alphabet.tracks; ++t) {
        std::vector<std::uint32_t> symbols;
        for (Letter l : w.letters) symbols.push_back(w.alphabet.symbol_at(l, t));
        while (!symbols.empty() && symbols.back() == w.alphabet.pad()) symbols.pop_back();
        if (symbols.empty()) throw parse_error("track holds no encoding");
        for (std::size_t i = 0; i + 1 < symbols.size(); ++i)
            if (symbols[i] == w.alphabet.pad()) throw parse_error("interior padding in track");
        EncodedNumber e;
        e.base = base;
        std::uint32_t sign = symbols[0];
        if (sign == 0) e.negative = false;
        else if (sign == static_cast<std::uint32_t>(base + 1)) e.negative = true;
        else throw parse_error("track does not start with a sign column");
        for (std::size_t i = 1; i < symbols.size(); ++i)
            e.columns.emplace_back(static_cast<int>(symbols[i]) / base,
                                   static_cast<int>(symbols[i]) % base);
        if (!is_valid_encoding(e)) throw parse_error("track is not a canonical encoding");
        out[t] = std::move(e);
    }
    return out;
}

/// Synchronous multitape finite automaton.  States are dense ids; missing
/// transitions reject.  `deterministic` asserts one initial state and at most
/// one successor per (state, letter).
struct SyncAutomaton {
    TrackAlphabet alphabet;
    std::vector<State> initial;                                // sorted, unique
    std::vector<bool> accepting;                               // indexed by state
    std::vector<std::vector<std::pair<Letter, State>>> edges;  // per state, sorted
    bool deterministic = false;

    std::size_t state_count() const { return accepting.size(); }

    State add_state(bool accept = false) {
        accepting.push_back(accept);
        edges.emplace_back();
        check_state_budget(state_count(), "add_state");
        return static_cast<State>(state_count() - 1);
    }

    void add_edge(State from, Letter letter, State to) { edges[from].emplace_back(letter, to); }

    void finish_edges() {
        for (auto& v : edges) {
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
        }
        std::sort(initial.begin(), initial.end());
        initial.erase(std::unique(initial.begin(), initial.end()), initial.end());
    }
};

namespace detail {

struct VecHash {
    std::size_t operator()(const std::vector<State>& v) const {
        std::size_t h = 1469598103934665603ull;
        for (State s : v) {
            h ^= s + 0x9e3779b97f4a7c15ull;
            h *= 1099511628211ull;
        }
        return h;
    }
};

struct PairHash {
    std::size_t operator()(const std::pair<State, State>& p) const {
        return (static_cast<std::size_t>(p.first) << 32) ^ p.second;
    }
};

inline std::pair<std::size_t, std::size_t> letter_range(
    const std::vector<std::pair<Letter, State>>& edges, Letter l) {
    auto lo = std::lower_bound(edges.begin(), edges.end(), std::make_pair(l, State(0)));
    auto hi = std::upper_bound(edges.begin(), edges.end(), std::make_pair(l, kNoState));
    return {static_cast<std::size_t>(lo - edges.begin()), static_cast<std::size_t>(hi - edges.begin())};
}

} // namespace detail

inline bool accepts(const SyncAutomaton& a, const TrackWord& w) {
    if (a.alphabet != w.alphabet) throw usage_error("accepts: alphabet mismatch");
    std::vector<State> cur = a.initial;
    std::vector<State> next;
    for (Letter l : w.letters) {
        next.clear();
        for (State s : cur) {
            auto [lo, hi] = detail::letter_range(a.edges[s], l);
            for (std::size_t i = lo; i < hi; ++i) next.push_back(a.edges[s][i].second);
        }
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        cur.swap(next);
        if (cur.empty()) return false;
    }
    for (State s : cur)
        if (a.accepting[s]) return true;
    return false;
}

/// Restricts to states both reachable from an initial state and able to reach
/// an accepting state; renumbers the survivors.
inline SyncAutomaton trim(const SyncAutomaton& a) {
    std::size_t n = a.state_count();
    std::vector<bool> fwd(n, false);
    std::deque<State> queue(a.initial.begin(), a.initial.end());
    for (State s : a.initial) fwd[s] = true;
    while (!queue.empty()) {
        State s = queue.front();
        queue.pop_front();
        for (auto [l, t] : a.edges[s])
            if (!fwd[t]) {
                fwd[t] = true;
                queue.push_back(t);
            }
    }
    std::vector<std::vector<State>> rev(n);
    for (State s = 0; s < n; ++s)
        for (auto [l, t] : a.edges[s]) rev[t].push_back(s);
    std::vector<bool> bwd(n, false);
    for (State s = 0; s < n; ++s)
        if (a.accepting[s]) {
            bwd[s] = true;
            queue.push_back(s);
        }
    while (!queue.empty()) {
        State s = queue.front();
        queue.pop_front();
        for (State p : rev[s])
            if (!bwd[p]) {
                bwd[p] = true;
                queue.push_back(p);
            }
    }
    std::vector<State> remap(n, kNoState);
    SyncAutomaton out;
    out.alphabet = a.alphabet;
    out.deterministic = a.deterministic;
    for (State s = 0; s < n; ++s)
        if (fwd[s] && bwd[s]) remap[s] = out.add_state(a.accepting[s]);
    for (State s = 0; s < n; ++s) {
        if (remap[s] == kNoState) continue;
        for (auto [l, t] : a.edges[s])
            if (remap[t] != kNoState) out.add_edge(remap[s], l, remap[t]);
    }
    for (State s : a.initial)
        if (remap[s] != kNoState) out.initial.push_back(remap[s]);
    out.finish_edges();
    return out;
}

inline bool is_empty(const SyncAutomaton& a) {
    std::vector<bool> seen(a.state_count(), false);
    std::deque<State> queue;
    for (State s : a.initial) {
        if (a.accepting[s]) return false;
        seen[s] = true;
        queue.push_back(s);
    }
    while (!queue.empty()) {
        State s = queue.front();
        queue.pop_front();
        for (auto [l, t] : a.edges[s]) {
            if (seen[t]) continue;
            if (a.accepting[t]) return false;
            seen[t] = true;
            queue.push_back(t);
        }
    }
    return true;
}

/// Rabin-Scott subset construction.  Only letter-reachable subsets are built;
/// the empty subset is never materialised.
inline SyncAutomaton determinize(const SyncAutomaton& a) {
    if (a.deterministic) return a;
    SyncAutomaton out;
    out.alphabet = a.alphabet;
    out.deterministic = true;
    if (a.initial.empty()) return out;
    std::unordered_map<std::vector<State>, State, detail::VecHash> ids;
    std::deque<std::vector<State>> queue;
    auto intern = [&](std::vector<State> set) {
        auto it = ids.find(set);
        if (it != ids.end()) return it->second;
        bool acc = false;
        for (State s : set) acc = acc || a.accepting[s];
        State id = out.add_state(acc);
        check_state_budget(out.state_count(), "determinize");
        ids.emplace(set, id);
        queue.push_back(std::move(set));
        return id;
    };
    out.initial.push_back(intern(a.initial));
    std::vector<std::pair<Letter, State>> merged;
    while (!queue.empty()) {
        std::vector<State> set = queue.front();
        queue.pop_front();
        State from = ids.at(set);
        merged.clear();
        for (State s : set)
            merged.insert(merged.end(), a.edges[s].begin(), a.edges[s].end());
        std::sort(merged.begin(), merged.end());
        merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
        std::size_t i = 0;
        while (i < merged.size()) {
            Letter l = merged[i].first;
            std::vector<State> next;
            while (i < merged.size() && merged[i].first == l) next.push_back(merged[i++].second);
            out.add_edge(from, l, intern(std::move(next)));
        }
    }
    out.finish_edges();
    return out;
}

/// Partition refinement on the trimmed deterministic automaton; partial
/// transition functions are preserved (absent edges stay absent).
inline SyncAutomaton minimize(const SyncAutomaton& input) {
    SyncAutomaton a = trim(input.deterministic ? input : determinize(input));
    std::size_t n = a.state_count();
    if (n == 0) return a;
    std::vector<std::uint32_t> cls(n);
    bool any_acc = false, any_rej = false;
    for (State s = 0; s < n; ++s) (a.accepting[s] ? any_acc : any_rej) = true;
    // Class labels must stay contiguous from zero, also when one side is empty.
    std::uint32_t acc_label = any_rej ? 1 : 0;
    for (State s = 0; s < n; ++s) cls[s] = a.accepting[s] ? acc_label : 0;
    std::size_t classes = static_cast<std::size_t>(any_acc) + static_cast<std::size_t>(any_rej);
    using Signature = std::vector<std::pair<Letter, std::uint64_t>>;
    struct SigHash {
        std::size_t operator()(const Signature& sig) const {
            std::size_t h = 14695981039346656037ull;
            for (auto [l, c] : sig) {
                h ^= l * 1099511628211ull;
                h ^= c + 0x9e3779b97f4a7c15ull + (h << 6);
            }
            return h;
        }
    };
    while (true) {
        std::unordered_map<Signature, std::uint32_t, SigHash> table;
        std::vector<std::uint32_t> next_cls(n);
        for (State s = 0; s < n; ++s) {
            Signature sig;
            sig.reserve(a.edges[s].size() + 1);
            sig.emplace_back(UINT64_MAX, cls[s]);
            for (auto [l, t] : a.edges[s]) sig.emplace_back(l, cls[t]);
            auto [it, inserted] = table.emplace(std::move(sig), static_cast<std::uint32_t>(table.size()));
            next_cls[s] = it->second;
        }
        if (table.size() == classes) break;
        classes = table.size();
        cls = std::move(next_cls);
    }
    SyncAutomaton out;
    out.alphabet = a.alphabet;
    out.deterministic = true;
    std::vector<State> rep(classes, kNoState);
    for (State s = 0; s < n; ++s)
        if (rep[cls[s]] == kNoState) rep[cls[s]] = s;
    std::vector<State> id(classes);
    for (std::uint32_t c = 0; c < classes; ++c) id[c] = out.add_state(a.accepting[rep[c]]);
    for (std::uint32_t c = 0; c < classes; ++c)
        for (auto [l, t] : a.edges[rep[c]]) out.add_edge(id[c], l, id[cls[t]]);
    for (State s : a.initial) out.initial.push_back(id[cls[s]]);
    out.finish_edges();
    return out;
}

/// Union of two languages over the same alphabet (disjoint state union).
inline SyncAutomaton union_of(const SyncAutomaton& a, const SyncAutomaton& b) {
    if (a.alphabet != b.alphabet) throw usage_error("union: alphabet mismatch");
    SyncAutomaton out;
    out.alphabet = a.alphabet;
    out.deterministic = false;
    out.accepting = a.accepting;
    out.accepting.insert(out.accepting.end(), b.accepting.begin(), b.accepting.end());
    out.edges = a.edges;
    State offset = static_cast<State>(a.state_count());
    for (const auto& es : b.edges) {
        out.edges.emplace_back();
        for (auto [l, t] : es) out.edges.back().emplace_back(l, t + offset);
    }
    out.initial = a.initial;
    for (State s : b.initial) out.initial.push_back(s + offset);
    out.finish_edges();
    check_state_budget(out.state_count(), "union");
    return out;
}

/// Language difference L(a) \ L(b); alphabets must agree.  b is tracked as a
/// determinised subset on the fly, so b may be nondeterministic.
inline SyncAutomaton difference(const SyncAutomaton& a, const SyncAutomaton& b) {
    if (a.alphabet != b.alphabet) throw usage_error("difference: alphabet mismatch");
    SyncAutomaton out;
    out.alphabet = a.alphabet;
    out.deterministic = a.deterministic;
    using Key = std::pair<State, std::vector<State>>;
    struct KeyHash {
        std::size_t operator()(const Key& k) const {
            return detail::VecHash{}(k.second) * 31 + k.first;
        }
    };
    std::unordered_map<Key, State, KeyHash> ids;
    std::deque<Key> queue;
    auto intern = [&](State as, std::vector<State> bs) {
        Key k{as, std::move(bs)};
        auto it = ids.find(k);
        if (it != ids.end()) return it->second;
        bool bacc = false;
        for (State s : k.second) bacc = bacc || b.accepting[s];
        State id = out.add_state(a.accepting[as] && !bacc);
        check_state_budget(out.state_count(), "difference");
        ids.emplace(k, id);
        queue.push_back(std::move(k));
        return id;
    };
    std::vector<State> binit(b.initial);
    for (State s : a.initial) out.initial.push_back(intern(s, binit));
    while (!queue.empty()) {
        Key k = queue.front();
        queue.pop_front();
        State from = ids.at(k);
        for (auto [l, t] : a.edges[k.first]) {
            std::vector<State> next;
            for (State s : k.second) {
                auto [lo, hi] = detail::letter_range(b.edges[s], l);
                for (std::size_t i = lo; i < hi; ++i) next.push_back(b.edges[s][i].second);
            }
            std::sort(next.begin(), next.end());
            next.erase(std::unique(next.begin(), next.end()), next.end());
            out.add_edge(from, l, intern(t, std::move(next)));
        }
    }
    out.finish_edges();
    return trim(out);
}

/// Complement relative to an explicit universe: L(universe) \ L(a).
inline SyncAutomaton complement_in(const SyncAutomaton& universe, const SyncAutomaton& a) {
    return difference(universe, a);
}

inline bool is_subset(const SyncAutomaton& a, const SyncAutomaton& b) {
    return is_empty(difference(a, b));
}

inline bool are_equivalent(const SyncAutomaton& a, const SyncAutomaton& b) {
    return is_subset(a, b) && is_subset(b, a);
}

/// Synchronised product.  Track map `tracks_x[i]` names the output track fed
/// by track i of automaton x; the two images must cover all output tracks.
/// When one operand's tracks are exhausted (its word is shorter) it keeps
/// reading padding on its own tracks, which realises the convolution
/// semantics of relational joins.  Shared tracks must carry equal symbols.
inline SyncAutomaton synchronized_product(const SyncAutomaton& a, const std::vector<int>& tracks_a,
                                          const SyncAutomaton& b, const std::vector<int>& tracks_b,
                                          int out_tracks) {
    if (a.alphabet.base != b.alphabet.base) throw usage_error("product: base mismatch");
    if (static_cast<int>(tracks_a.size()) != a.alphabet.tracks ||
        static_cast<int>(tracks_b.size()) != b.alphabet.tracks)
        throw usage_error("product: track map arity mismatch");
    std::vector<int> covered(out_tracks, 0);
    for (int t : tracks_a) {
        if (t < 0 || t >= out_tracks) throw usage_error("product: track map out of range");
        covered[t] |= 1;
    }
    for (int t : tracks_b) {
        if (t < 0 || t >= out_tracks) throw usage_error("product: track map out of range");
        covered[t] |= 2;
    }
    for (int c : covered)
        if (c == 0) throw usage_error("product: uncovered output track");

    TrackAlphabet out_alpha(a.alphabet.base, out_tracks);
    std::uint32_t pad = out_alpha.pad();

    // Shared output tracks in increasing order, with the source track index on
    // each side.
    std::vector<std::pair<int, int>> shared_ab; // (a track, b track)
    for (int out = 0; out < out_tracks; ++out) {
        if (covered[out] != 3) continue;
        int ai = -1, bi = -1;
        for (std::size_t i = 0; i < tracks_a.size(); ++i)
            if (tracks_a[i] == out) ai = static_cast<int>(i);
        for (std::size_t i = 0; i < tracks_b.size(); ++i)
            if (tracks_b[i] == out) bi = static_cast<int>(i);
        shared_ab.emplace_back(ai, bi);
    }

    struct Option {
        std::array<std::uint32_t, kMaxTracks> symbols;
        State next;
        bool done;
    };
    auto shared_key = [&](const std::array<std::uint32_t, kMaxTracks>& symbols, bool from_a) {
        std::uint64_t key = 0;
        for (auto [ai, bi] : shared_ab) key = key * a.alphabet.stride() + symbols[from_a ? ai : bi];
        return key;
    };
    auto options_of = [&](const SyncAutomaton& m, State s) {
        std::vector<Option> opts;
        if (s != kNoState) {
            for (auto [l, t] : m.edges[s]) {
                Option o;
                m.alphabet.unpack(l, o.symbols.data());
                o.next = t;
                o.done = false;
                opts.push_back(o);
            }
        }
        if (s == kNoState || m.accepting[s]) {
            Option o;
            for (int i = 0; i < m.alphabet.tracks; ++i) o.symbols[i] = m.alphabet.pad();
            o.next = kNoState;
            o.done = true;
            opts.push_back(o);
        }
        return opts;
    };

    SyncAutomaton out;
    out.alphabet = out_alpha;
    out.deterministic = a.deterministic && b.deterministic;
    std::unordered_map<std::pair<State, State>, State, detail::PairHash> ids;
    std::deque<std::pair<State, State>> queue;
    auto component_accepts = [&](const SyncAutomaton& m, State s) {
        return s == kNoState || m.accepting[s];
    };
    auto intern = [&](State as, State bs) {
        std::pair<State, State> k{as, bs};
        auto it = ids.find(k);
        if (it != ids.end()) return it->second;
        State id = out.add_state(component_accepts(a, as) && component_accepts(b, bs));
        check_state_budget(out.state_count(), "synchronized_product");
        ids.emplace(k, id);
        queue.push_back(k);
        return id;
    };
    for (State sa : a.initial)
        for (State sb : b.initial) out.initial.push_back(intern(sa, sb));

    std::array<std::uint32_t, kMaxTracks> combined{};
    while (!queue.empty()) {
        auto [sa, sb] = queue.front();
        queue.pop_front();
        State from = ids.at({sa, sb});
        auto aopts = options_of(a, sa);
        auto bopts = options_of(b, sb);
        std::unordered_map<std::uint64_t, std::vector<const Option*>> bindex;
        for (const Option& o : bopts) bindex[shared_key(o.symbols, false)].push_back(&o);
        for (const Option& ao : aopts) {
            auto it = bindex.find(shared_key(ao.symbols, true));
            if (it == bindex.end()) continue;
            for (const Option* bo : it->second) {
                // Fill with conflict detection so repeated map entries act as
                // diagonal (equality) constraints.
                constexpr std::uint32_t kUnset = UINT32_MAX;
                bool ok = true, all_pad = true;
                for (int i = 0; i < out_tracks; ++i) combined[i] = kUnset;
                for (std::size_t i = 0; ok && i < tracks_a.size(); ++i) {
                    std::uint32_t& slot = combined[tracks_a[i]];
                    if (slot != kUnset && slot != ao.symbols[i]) ok = false;
                    slot = ao.symbols[i];
                }
                for (std::size_t i = 0; ok && i < tracks_b.size(); ++i) {
                    std::uint32_t& slot = combined[tracks_b[i]];
                    if (slot != kUnset && slot != bo->symbols[i]) ok = false;
                    slot = bo->symbols[i];
                }
                if (!ok) continue;
                for (int i = 0; i < out_tracks; ++i) all_pad = all_pad && combined[i] == pad;
                if (all_pad) continue;
                out.add_edge(from, out_alpha.pack(combined.data()), intern(ao.next, bo->next));
            }
        }
    }
    out.finish_edges();
    return trim(out);
}

inline std::vector<int> identity_track_map(int tracks) {
    std::vector<int> m(tracks);
    for (int i = 0; i < tracks; ++i) m[i] = i;
    return m;
}

inline SyncAutomaton intersect(const SyncAutomaton& a, const SyncAutomaton& b) {
    if (a.alphabet != b.alphabet) throw usage_error("intersect: alphabet mismatch");
    auto id = identity_track_map(a.alphabet.tracks);
    return synchronized_product(a, id, b, id, a.alphabet.tracks);
}

/// Existential projection onto the kept tracks (in the given order).  Letters
/// whose kept part is all padding become epsilon moves and are eliminated.
inline SyncAutomaton project(const SyncAutomaton& a, const std::vector<int>& keep) {
    if (keep.empty()) throw usage_error("project: must keep at least one track");
    for (int t : keep)
        if (t < 0 || t >= a.alphabet.tracks) throw usage_error("project: bad track index");
    TrackAlphabet out_alpha(a.alphabet.base, static_cast<int>(keep.size()));
    std::size_t n = a.state_count();
    std::vector<std::vector<State>> eps(n);
    std::vector<std::vector<std::pair<Letter, State>>> real(n);
    std::array<std::uint32_t, kMaxTracks> in{}, outsym{};
    for (State s = 0; s < n; ++s) {
        for (auto [l, t] : a.edges[s]) {
            a.alphabet.unpack(l, in.data());
            bool all_pad = true;
            for (std::size_t i = 0; i < keep.size(); ++i) {
                outsym[i] = in[keep[i]];
                all_pad = all_pad && outsym[i] == out_alpha.pad();
            }
            if (all_pad) eps[s].push_back(t);
            else real[s].emplace_back(out_alpha.pack(outsym.data()), t);
        }
    }
    // Epsilon closure per state.
    std::vector<std::vector<State>> closure(n);
    for (State s = 0; s < n; ++s) {
        std::vector<bool> seen(n, false);
        std::deque<State> queue{s};
        seen[s] = true;
        while (!queue.empty()) {
            State u = queue.front();
            queue.pop_front();
            closure[s].push_back(u);
            for (State v : eps[u])
                if (!seen[v]) {
                    seen[v] = true;
                    queue.push_back(v);
                }
        }
    }
    SyncAutomaton out;
    out.alphabet = out_alpha;
    out.deterministic = false;
    for (State s = 0; s < n; ++s) {
        bool acc = false;
        for (State u : closure[s]) acc = acc || a.accepting[u];
        out.add_state(acc);
    }
    for (State s = 0; s < n; ++s)
        for (State u : closure[s])
            for (auto [l, t] : real[u]) out.add_edge(s, l, t);
    out.initial = a.initial;
    out.finish_edges();
    return trim(out);
}

/// Universal projection onto the kept tracks, relative to explicit universes:
/// keep u iff every completion inside `universe_full` lands in L(a).
inline SyncAutomaton universal_project(const SyncAutomaton& a, const std::vector<int>& keep,
                                       const SyncAutomaton& universe_full,
                                       const SyncAutomaton& universe_kept) {
    SyncAutomaton missing = difference(universe_full, a);
    SyncAutomaton witness = project(missing, keep);
    return difference(universe_kept, witness);
}

/// Gather-style reorder: output track j carries input track `source[j]`.
inline SyncAutomaton reorder_tracks(const SyncAutomaton& a, const std::vector<int>& source) {
    if (static_cast<int>(source.size()) != a.alphabet.tracks)
        throw usage_error("reorder: permutation arity mismatch");
    std::vector<bool> used(a.alphabet.tracks, false);
    for (int t : source) {
        if (t < 0 || t >= a.alphabet.tracks || used[t]) throw usage_error("reorder: not a permutation");
        used[t] = true;
    }
    SyncAutomaton out = a;
    std::array<std::uint32_t, kMaxTracks> in{}, outsym{};
    for (auto& es : out.edges)
        for (auto& [l, t] : es) {
            a.alphabet.unpack(l, in.data());
            for (std::size_t j = 0; j < source.size(); ++j) outsym[j] = in[source[j]];
            l = a.alphabet.pack(outsym.data());
        }
    out.finish_edges();
    return out;
}

/// Accepts exactly one word.
inline SyncAutomaton singleton_automaton(const TrackWord& w) {
    SyncAutomaton out;
    out.alphabet = w.alphabet;
    out.deterministic = true;
    State prev = out.add_state(w.letters.empty());
    out.initial.push_back(prev);
    for (std::size_t i = 0; i < w.letters.size(); ++i) {
        State next = out.add_state(i + 1 == w.letters.size());
        out.add_edge(prev, w.letters[i], next);
        prev = next;
    }
    out.finish_edges();
    return out;
}

struct Enumeration {
    std::vector<TrackWord> words;
    bool exhausted = false; // true when the whole language was produced
};

/// Words in length-then-lexicographic order.  `exhausted` reports whether the
/// language was fully drained within the limits.
inline Enumeration enumerate_words(const SyncAutomaton& input, std::size_t max_words,
                                   std::size_t max_length) {
    SyncAutomaton a = trim(input);
    Enumeration result;
    struct Item {
        std::vector<State> states;
        std::vector<Letter> word;
    };
    std::deque<Item> queue;
    if (!a.initial.empty()) queue.push_back({a.initial, {}});
    std::size_t guard = 0;
    while (!queue.empty()) {
        Item item = std::move(queue.front());
        queue.pop_front();
        bool acc = false;
        for (State s : item.states) acc = acc || a.accepting[s];
        if (acc) {
            result.words.push_back({a.alphabet, item.word});
            if (result.words.size() >= max_words) return result;
        }
        if (item.word.size() >= max_length) continue;
        std::vector<std::pair<Letter, State>> merged;
        for (State s : item.states)
            merged.insert(merged.end(), a.edges[s].begin(), a.edges[s].end());
        std::sort(merged.begin(), merged.end());
        merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
        std::size_t i = 0;
        while (i < merged.size()) {
            Letter l = merged[i].first;
            Item child;
            child.word = item.word;
            child.word.push_back(l);
            while (i < merged.size() && merged[i].first == l) child.states.push_back(merged[i++].second);
            queue.push_back(std::move(child));
            if (++guard > state_budget().load(std::memory_order_relaxed))
                throw resource_error("enumerate: frontier budget exceeded");
        }
    }
    result.exhausted = true;
    return result;
}

/// Shortest accepted word, ties broken lexicographically; nullopt when empty.
inline std::optional<TrackWord> shortest_accepted(const SyncAutomaton& input) {
    SyncAutomaton a = trim(input);
    if (a.initial.empty()) return std::nullopt;
    std::size_t n = a.state_count();
    // Backward BFS distance to an accepting state.
    std::vector<std::vector<State>> rev(n);
    for (State s = 0; s < n; ++s)
        for (auto [l, t] : a.edges[s]) rev[t].push_back(s);
    std::vector<std::size_t> dist(n, SIZE_MAX);
    std::deque<State> queue;
    for (State s = 0; s < n; ++s)
        if (a.accepting[s]) {
            dist[s] = 0;
            queue.push_back(s);
        }
    while (!queue.empty()) {
        State s = queue.front();
        queue.pop_front();
        for (State p : rev[s])
            if (dist[p] == SIZE_MAX) {
                dist[p] = dist[s] + 1;
                queue.push_back(p);
            }
    }
    std::size_t best = SIZE_MAX;
    for (State s : a.initial) best = std::min(best, dist[s]);
    if (best == SIZE_MAX) return std::nullopt;
    std::vector<State> cur;
    for (State s : a.initial)
        if (dist[s] <= best) cur.push_back(s);
    TrackWord w;
    w.alphabet = a.alphabet;
    for (std::size_t remaining = best; remaining > 0; --remaining) {
        Letter pick = UINT64_MAX;
        for (State s : cur)
            for (auto [l, t] : a.edges[s])
                if (dist[t] <= remaining - 1) {
                    pick = std::min(pick, l);
                    break; // edges sorted by letter; later letters only larger
                }
        std::vector<State> next;
        for (State s : cur) {
            auto [lo, hi] = detail::letter_range(a.edges[s], pick);
            for (std::size_t i = lo; i < hi; ++i)
                if (dist[a.edges[s][i].second] <= remaining - 1) next.push_back(a.edges[s][i].second);
        }
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        w.letters.push_back(pick);
        cur.swap(next);
    }
    return w;
}

} // namespace regspline
