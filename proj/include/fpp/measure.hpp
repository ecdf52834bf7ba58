#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace fpp {

// Physical measure layout shared by every monoid: two 64-bit fields. Sharing
// one layout is what makes set->vector and string->byte-vector upcasts free:
// a node cached under one monoid is readable under another that interprets a
// subset of the fields.
struct measure_pair {
    std::uint64_t f0 = 0;
    std::uint64_t f1 = 0;
};

// Element count. f1 unused.
struct size_monoid {
    static constexpr measure_pair identity() { return {0, 0}; }
    static constexpr measure_pair combine(measure_pair a, measure_pair b) {
        return {a.f0 + b.f0, 0};
    }
    static constexpr std::uint64_t count(measure_pair m) { return m.f0; }
    static constexpr bool equal(measure_pair a, measure_pair b) { return a.f0 == b.f0; }
};

// Composite (count, rightmost key). The key summarizes the maximum key of the
// range under a non-decreasing element order, which is what descent for
// "first element >= k" consumes; the count component drives access by rank.
// A range with count zero carries no key.
struct key_rank_monoid {
    static constexpr measure_pair identity() { return {0, 0}; }
    static constexpr measure_pair combine(measure_pair a, measure_pair b) {
        return {a.f0 + b.f0, b.f0 != 0 ? b.f1 : a.f1};
    }
    static constexpr std::uint64_t count(measure_pair m) { return m.f0; }
    static constexpr bool has_key(measure_pair m) { return m.f0 != 0; }
    static constexpr std::uint64_t key(measure_pair m) { return m.f1; }
    static constexpr bool equal(measure_pair a, measure_pair b) {
        return a.f0 == b.f0 && (a.f0 == 0 || a.f1 == b.f1);
    }
};

// (code points, bytes). Component-wise addition; code_points <= bytes.
struct utf8_monoid {
    static constexpr measure_pair identity() { return {0, 0}; }
    static constexpr measure_pair combine(measure_pair a, measure_pair b) {
        return {a.f0 + b.f0, a.f1 + b.f1};
    }
    static constexpr std::uint64_t count(measure_pair m) { return m.f0; } // code points
    static constexpr std::uint64_t bytes(measure_pair m) { return m.f1; }
    static constexpr bool equal(measure_pair a, measure_pair b) {
        return a.f0 == b.f0 && a.f1 == b.f1;
    }
};

// Byte view over UTF-8 leaves: the logical count is the byte count (f1), so a
// byte-vector can traverse nodes cached by utf8_monoid without rebuilding.
// New nodes under this monoid leave f0 at zero; equal() ignores it.
struct byte_view_monoid {
    static constexpr measure_pair identity() { return {0, 0}; }
    static constexpr measure_pair combine(measure_pair a, measure_pair b) {
        return {a.f0 + b.f0, a.f1 + b.f1};
    }
    static constexpr std::uint64_t count(measure_pair m) { return m.f1; }
    static constexpr bool equal(measure_pair a, measure_pair b) { return a.f1 == b.f1; }
};

// Result of scanning a child list with a monotone predicate: at which child
// the predicate first flips, and the measure accumulated before it. Drives
// indexing, key search and code-point addressing uniformly.
struct split_decision {
    bool found = false;
    std::size_t child = 0;
    measure_pair acc_before{};
};

template <class M, class Pred>
split_decision split_scan(std::span<const measure_pair> children, Pred&& pred,
                          measure_pair acc) {
    for (std::size_t i = 0; i < children.size(); ++i) {
        measure_pair next = M::combine(acc, children[i]);
        if (pred(next))
            return {true, i, acc};
        acc = next;
    }
    return {false, children.size(), acc};
}

} // namespace fpp
