#pragma once

#include <atomic>
#include <cstdint>
#include <cstring>

#include "fpp/measure.hpp"
#include "fpp/pool.hpp"

namespace fpp::detail {

enum class node_kind : std::uint8_t {
    leaf = 1,     // fat leaf: raw element storage, no measure cache
    interior = 2, // 2-3 node, one depth below its parent digit level
    digits = 3,   // finger: 1-4 same-depth children
    deep = 4,     // prefix digits / deeper spine / suffix digits
    path = 5,     // zipper path entry
};

struct node_header {
    node_kind kind;
    std::uint8_t count; // leaf: physical units; interior/digits: child count
    std::uint16_t pad = 0;
    std::uint32_t refs = 1;
};

inline constexpr std::size_t leaf_bytes = slot_size - sizeof(node_header);

// One 64-byte immutable tree cell. Every variant starts with the header;
// branch variants cache their measure at a common offset.
struct node {
    node_header h;
    union {
        struct {
            measure_pair m;
            node* child[4]; // interior uses [0..2], digits [0..3]
        } br;
        struct {
            measure_pair m;
            node* prefix; // digits
            node* spine;  // deeper tree root: null | interior | deep
            node* suffix; // digits
        } dp;
        std::byte elems[leaf_bytes];
    };
};
static_assert(sizeof(node) == slot_size);

// Zipper path entry: reversed root-ward path. `start` is the logical position
// of the first element of tnode's subtree in the iterator-local version.
struct path_node {
    node_header h; // kind == path; count unused
    node* tnode;
    path_node* parent; // null at the root entry
    std::uint64_t start;
    std::uint32_t child_index;
    bool dirty;
};
static_assert(sizeof(path_node) <= slot_size);

inline std::uint32_t refs(const node* n) {
    return std::atomic_ref<const std::uint32_t>(n->h.refs).load(std::memory_order_acquire);
}

inline std::uint32_t refs_path(const path_node* p) {
    return std::atomic_ref<const std::uint32_t>(p->h.refs).load(std::memory_order_acquire);
}

inline node* retain(node* n) {
    std::atomic_ref<std::uint32_t>(n->h.refs).fetch_add(1, std::memory_order_relaxed);
    return n;
}

inline path_node* retain(path_node* p) {
    std::atomic_ref<std::uint32_t>(p->h.refs).fetch_add(1, std::memory_order_relaxed);
    return p;
}

inline bool drop_ref(node_header& h) {
    return std::atomic_ref<std::uint32_t>(h.refs).fetch_sub(1, std::memory_order_acq_rel) == 1;
}

inline void release(pool& pl, node* n);

inline void release_children(pool& pl, node* n) {
    switch (n->h.kind) {
    case node_kind::leaf:
        break;
    case node_kind::interior:
    case node_kind::digits:
        for (int i = 0; i < n->h.count; ++i)
            release(pl, n->br.child[i]);
        break;
    case node_kind::deep:
        release(pl, n->dp.prefix);
        if (n->dp.spine)
            release(pl, n->dp.spine);
        release(pl, n->dp.suffix);
        break;
    default:
        break;
    }
}

inline void release(pool& pl, node* n) {
    if (!n)
        return;
    if (drop_ref(n->h)) {
        release_children(pl, n);
        pl.dealloc(n);
    }
}

inline void release(pool& pl, path_node* p) {
    while (p && drop_ref(p->h)) {
        release(pl, p->tnode);
        path_node* up = p->parent;
        pl.dealloc(p);
        p = up;
    }
}

inline node* alloc_node(pool& pl, node_kind k) {
    auto* n = static_cast<node*>(pl.alloc());
    n->h = node_header{k, 0, 0, 1};
    return n;
}

inline path_node* alloc_path(pool& pl, node* tnode /*consumed*/, std::uint32_t child_index,
                             bool dirty, path_node* parent /*consumed*/, std::uint64_t start) {
    auto* p = static_cast<path_node*>(pl.alloc());
    p->h = node_header{node_kind::path, 0, 0, 1};
    p->tnode = tnode;
    p->parent = parent;
    p->start = start;
    p->child_index = child_index;
    p->dirty = dirty;
    return p;
}

// Shallow copy; the clone takes fresh references on all children.
inline node* clone(pool& pl, const node* n) {
    auto* c = static_cast<node*>(pl.alloc());
    std::memcpy(c, n, slot_size);
    c->h.refs = 1;
    switch (n->h.kind) {
    case node_kind::interior:
    case node_kind::digits:
        for (int i = 0; i < n->h.count; ++i)
            retain(c->br.child[i]);
        break;
    case node_kind::deep:
        retain(c->dp.prefix);
        if (c->dp.spine)
            retain(c->dp.spine);
        retain(c->dp.suffix);
        break;
    default:
        break;
    }
    return c;
}

} // namespace fpp::detail
