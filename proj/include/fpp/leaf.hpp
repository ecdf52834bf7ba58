#pragma once

#include <cstring>
#include <type_traits>

#include "fpp/error.hpp"
#include "fpp/node.hpp"

namespace fpp::detail {

// ---------------------------------------------------------------------------
// UTF-8 primitives
// ---------------------------------------------------------------------------

inline std::size_t utf8_width(char32_t c) {
    if (c < 0x80)
        return 1;
    if (c < 0x800)
        return 2;
    if (c < 0x10000)
        return 3;
    return 4;
}

inline std::size_t utf8_encode(char32_t c, std::byte out[4]) {
    auto b = [&](int i, unsigned v) { out[i] = static_cast<std::byte>(v); };
    if (c < 0x80) {
        b(0, c);
        return 1;
    }
    if (c < 0x800) {
        b(0, 0xC0 | (c >> 6));
        b(1, 0x80 | (c & 0x3F));
        return 2;
    }
    if (c < 0x10000) {
        b(0, 0xE0 | (c >> 12));
        b(1, 0x80 | ((c >> 6) & 0x3F));
        b(2, 0x80 | (c & 0x3F));
        return 3;
    }
    b(0, 0xF0 | (c >> 18));
    b(1, 0x80 | ((c >> 12) & 0x3F));
    b(2, 0x80 | ((c >> 6) & 0x3F));
    b(3, 0x80 | (c & 0x3F));
    return 4;
}

inline bool utf8_is_cont(std::byte b) { return (static_cast<unsigned>(b) & 0xC0) == 0x80; }

inline std::size_t utf8_seq_width(std::byte first) {
    unsigned b = static_cast<unsigned>(first);
    if (b < 0x80)
        return 1;
    if ((b & 0xE0) == 0xC0)
        return 2;
    if ((b & 0xF0) == 0xE0)
        return 3;
    if ((b & 0xF8) == 0xF0)
        return 4;
    return 0; // invalid lead byte
}

inline char32_t utf8_decode(const std::byte* p) {
    unsigned b0 = static_cast<unsigned>(p[0]);
    if (b0 < 0x80)
        return b0;
    auto cont = [&](int i) { return static_cast<char32_t>(static_cast<unsigned>(p[i]) & 0x3F); };
    if ((b0 & 0xE0) == 0xC0)
        return ((b0 & 0x1F) << 6) | cont(1);
    if ((b0 & 0xF0) == 0xE0)
        return ((b0 & 0x0F) << 12) | (cont(1) << 6) | cont(2);
    return ((b0 & 0x07) << 18) | (cont(1) << 12) | (cont(2) << 6) | cont(3);
}

// Validates a byte range; returns the offset of the first invalid byte, or
// `len` when the whole range is well-formed.
inline std::size_t utf8_validate(const std::byte* p, std::size_t len) {
    std::size_t i = 0;
    while (i < len) {
        std::size_t w = utf8_seq_width(p[i]);
        if (w == 0 || i + w > len)
            return i;
        for (std::size_t j = 1; j < w; ++j)
            if (!utf8_is_cont(p[i + j]))
                return i;
        char32_t c = utf8_decode(p + i);
        // reject overlong encodings and surrogates
        if (utf8_width(c) != w || (c >= 0xD800 && c <= 0xDFFF) || c > 0x10FFFF)
            return i;
        i += w;
    }
    return len;
}

// ---------------------------------------------------------------------------
// Leaf layouts. Physical "units" are elements for fixed-width leaves and
// bytes for UTF-8 leaves; node::h.count stores the unit count.
// ---------------------------------------------------------------------------

template <class E>
struct fixed_leaf {
    // elems starts 8 bytes into a 64-byte-aligned cell
    static_assert(std::is_trivially_copyable_v<E> && sizeof(E) <= leaf_bytes &&
                  alignof(E) <= 8);
    using value = E;
    static constexpr std::size_t max_units = leaf_bytes / sizeof(E);

    static const E* data(const node* l) { return reinterpret_cast<const E*>(l->elems); }
    static E* data(node* l) { return reinterpret_cast<E*>(l->elems); }

    static std::size_t units(const node* l) { return l->h.count; }
    static std::size_t lcount(const node* l) { return l->h.count; }
    static std::size_t phys(const node*, std::size_t li) { return li; }
    static std::size_t logical(const node*, std::size_t p) { return p; }
    static value at_phys(const node* l, std::size_t p) { return data(l)[p]; }
    static std::size_t width(value) { return 1; }
    static std::size_t width_at(const node*, std::size_t) { return 1; }
    static bool has_room(const node* l, value) { return units(l) < max_units; }
    static bool assign_fits(const node*, std::size_t, value) { return true; }

    static node* make(pool& pl, const E* src, std::size_t n) {
        node* l = alloc_node(pl, node_kind::leaf);
        l->h.count = static_cast<std::uint8_t>(n);
        std::memcpy(l->elems, src, n * sizeof(E));
        return l;
    }
    static node* singleton(pool& pl, value v) { return make(pl, &v, 1); }

    static node* with_insert(pool& pl, const node* l, std::size_t p, value v) {
        node* r = alloc_node(pl, node_kind::leaf);
        std::size_t n = units(l);
        r->h.count = static_cast<std::uint8_t>(n + 1);
        E* d = data(r);
        std::memcpy(d, data(l), p * sizeof(E));
        d[p] = v;
        std::memcpy(d + p + 1, data(l) + p, (n - p) * sizeof(E));
        return r;
    }
    static node* with_erase(pool& pl, const node* l, std::size_t p) {
        std::size_t n = units(l);
        node* r = alloc_node(pl, node_kind::leaf);
        r->h.count = static_cast<std::uint8_t>(n - 1);
        E* d = data(r);
        std::memcpy(d, data(l), p * sizeof(E));
        std::memcpy(d + p, data(l) + p + 1, (n - p - 1) * sizeof(E));
        return r;
    }
    static node* with_assign(pool& pl, const node* l, std::size_t p, value v) {
        node* r = make(pl, data(l), units(l));
        data(r)[p] = v;
        return r;
    }
    // pre: room; caller owns l uniquely
    static void append_in_place(node* l, value v) {
        data(l)[l->h.count] = v;
        ++l->h.count;
    }
    static node* slice(pool& pl, const node* l, std::size_t from, std::size_t to) {
        return make(pl, data(l) + from, to - from);
    }
};

struct utf8_leaf {
    using value = char32_t;
    static constexpr std::size_t max_units = leaf_bytes; // bytes

    static const std::byte* data(const node* l) { return l->elems; }
    static std::byte* data(node* l) { return l->elems; }

    static std::size_t units(const node* l) { return l->h.count; }
    static std::size_t lcount(const node* l) {
        std::size_t c = 0;
        for (std::size_t i = 0; i < units(l); ++i)
            if (!utf8_is_cont(l->elems[i]))
                ++c;
        return c;
    }
    static std::size_t phys(const node* l, std::size_t li) {
        std::size_t p = 0;
        while (li--)
            p += utf8_seq_width(l->elems[p]);
        return p;
    }
    static std::size_t logical(const node* l, std::size_t p) {
        std::size_t c = 0;
        for (std::size_t i = 0; i < p; ++i)
            if (!utf8_is_cont(l->elems[i]))
                ++c;
        return c;
    }
    static value at_phys(const node* l, std::size_t p) { return utf8_decode(l->elems + p); }
    static std::size_t width(value v) { return utf8_width(v); }
    static std::size_t width_at(const node* l, std::size_t p) {
        return utf8_seq_width(l->elems[p]);
    }
    static bool has_room(const node* l, value v) { return units(l) + utf8_width(v) <= max_units; }
    static bool assign_fits(const node* l, std::size_t p, value v) {
        return units(l) - width_at(l, p) + utf8_width(v) <= max_units;
    }

    static node* make(pool& pl, const std::byte* src, std::size_t n) {
        node* l = alloc_node(pl, node_kind::leaf);
        l->h.count = static_cast<std::uint8_t>(n);
        std::memcpy(l->elems, src, n);
        return l;
    }
    static node* singleton(pool& pl, value v) {
        std::byte buf[4];
        return make(pl, buf, utf8_encode(v, buf));
    }
    static node* with_insert(pool& pl, const node* l, std::size_t p, value v) {
        std::byte buf[4];
        std::size_t w = utf8_encode(v, buf);
        std::size_t n = units(l);
        node* r = alloc_node(pl, node_kind::leaf);
        r->h.count = static_cast<std::uint8_t>(n + w);
        std::memcpy(r->elems, l->elems, p);
        std::memcpy(r->elems + p, buf, w);
        std::memcpy(r->elems + p + w, l->elems + p, n - p);
        return r;
    }
    static node* with_erase(pool& pl, const node* l, std::size_t p) {
        std::size_t w = width_at(l, p);
        std::size_t n = units(l);
        node* r = alloc_node(pl, node_kind::leaf);
        r->h.count = static_cast<std::uint8_t>(n - w);
        std::memcpy(r->elems, l->elems, p);
        std::memcpy(r->elems + p, l->elems + p + w, n - p - w);
        return r;
    }
    static node* with_assign(pool& pl, const node* l, std::size_t p, value v) {
        std::byte buf[4];
        std::size_t w = utf8_encode(v, buf);
        std::size_t ow = width_at(l, p);
        std::size_t n = units(l);
        node* r = alloc_node(pl, node_kind::leaf);
        r->h.count = static_cast<std::uint8_t>(n - ow + w);
        std::memcpy(r->elems, l->elems, p);
        std::memcpy(r->elems + p, buf, w);
        std::memcpy(r->elems + p + w, l->elems + p + ow, n - p - ow);
        return r;
    }
    static void append_in_place(node* l, value v) {
        std::byte buf[4];
        std::size_t w = utf8_encode(v, buf);
        std::memcpy(l->elems + l->h.count, buf, w);
        l->h.count = static_cast<std::uint8_t>(l->h.count + w);
    }
    static node* slice(pool& pl, const node* l, std::size_t from, std::size_t to) {
        return make(pl, l->elems + from, to - from);
    }
};

// ---------------------------------------------------------------------------
// Container policies: leaf layout + monoid + per-element measurement.
// ---------------------------------------------------------------------------

template <class E = std::uint64_t>
struct vector_policy {
    using leaf = fixed_leaf<E>;
    using monoid = size_monoid;
    using value = E;
    static constexpr bool update_preserves_measure = true;
    static measure_pair measure_leaf(const node* l) { return {leaf::lcount(l), 0}; }
    static measure_pair measure_value(const value&) { return {1, 0}; }
};

struct identity_key {
    static std::uint64_t key(std::uint64_t v) { return v; }
};

template <class E, class KeyOf>
struct keyrank_policy {
    using leaf = fixed_leaf<E>;
    using monoid = key_rank_monoid;
    using value = E;
    static constexpr bool update_preserves_measure = false;
    static measure_pair measure_leaf(const node* l) {
        std::size_t n = leaf::lcount(l);
        return {n, KeyOf::key(leaf::at_phys(l, n - 1))};
    }
    static measure_pair measure_value(const value& v) { return {1, KeyOf::key(v)}; }
};

struct utf8_policy {
    using leaf = utf8_leaf;
    using monoid = utf8_monoid;
    using value = char32_t;
    static constexpr bool update_preserves_measure = false;
    static measure_pair measure_leaf(const node* l) { return {leaf::lcount(l), leaf::units(l)}; }
    static measure_pair measure_value(value v) { return {1, utf8_width(v)}; }
};

struct byte_view_policy {
    using leaf = fixed_leaf<std::uint8_t>;
    using monoid = byte_view_monoid;
    using value = std::uint8_t;
    static constexpr bool update_preserves_measure = true;
    static measure_pair measure_leaf(const node* l) { return {0, leaf::lcount(l)}; }
    static measure_pair measure_value(value) { return {0, 1}; }
};

} // namespace fpp::detail
