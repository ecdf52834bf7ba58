#pragma once

#include <cstdint>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "fpp/config.hpp"
#include "fpp/error.hpp"
#include "fpp/leaf.hpp"
#include "fpp/node.hpp"

namespace fpp::detail {

// ---------------------------------------------------------------------------
// tree_ops<P>: structural operations on finger trees of policy P.
//
// Representation. A tree root at item level d is one of
//   nullptr            empty tree
//   item               leaf (d == 0) or interior 2-3 node (d > 0)
//   deep               prefix digits (1-4 items), spine (tree at level d+1),
//                      suffix digits (1-4 items)
// Spine items at level d+1 are interior nodes whose children are level-d
// items. Leaves pack multiple elements, so item counts and element counts
// differ; all cached measures are element-level.
//
// Ownership. Functions taking node* consume the caller's reference unless
// marked "borrows". Returned nodes are owned by the caller.
// ---------------------------------------------------------------------------

template <class P>
struct tree_ops {
    using L = typename P::leaf;
    using M = typename P::monoid;
    using value = typename P::value;

    static measure_pair mof(const node* n) {
        if (!n)
            return M::identity();
        switch (n->h.kind) {
        case node_kind::leaf:
            return P::measure_leaf(n);
        case node_kind::deep:
            return n->dp.m;
        default:
            return n->br.m;
        }
    }

    static std::uint64_t size(const node* t) { return M::count(mof(t)); }

    // --- builders (consume child references) -------------------------------

    static node* make_digits(pool& pl, node* const* items, int n) {
        node* d = alloc_node(pl, node_kind::digits);
        d->h.count = static_cast<std::uint8_t>(n);
        measure_pair m = M::identity();
        for (int i = 0; i < n; ++i) {
            d->br.child[i] = items[i];
            m = M::combine(m, mof(items[i]));
        }
        d->br.m = m;
        return d;
    }
    static node* make_digits1(pool& pl, node* a) { return make_digits(pl, &a, 1); }

    static node* make_interior(pool& pl, node* const* items, int n) {
        node* r = make_digits(pl, items, n);
        r->h.kind = node_kind::interior;
        return r;
    }

    static node* make_deep(pool& pl, node* prefix, node* spine, node* suffix) {
        node* d = alloc_node(pl, node_kind::deep);
        d->dp.prefix = prefix;
        d->dp.spine = spine;
        d->dp.suffix = suffix;
        d->dp.m = M::combine(M::combine(mof(prefix), mof(spine)), mof(suffix));
        return d;
    }

    // Recomputes a branch node's cached measure from its children.
    static void recompute(node* n) {
        if (n->h.kind == node_kind::deep) {
            n->dp.m = M::combine(M::combine(mof(n->dp.prefix), mof(n->dp.spine)),
                                 mof(n->dp.suffix));
            return;
        }
        measure_pair m = M::identity();
        for (int i = 0; i < n->h.count; ++i)
            m = M::combine(m, mof(n->br.child[i]));
        n->br.m = m;
    }

    // Consumes n; returns an equivalent node the caller may mutate. Reuses
    // the cell in place only when it is unshared and destructive update is
    // enabled; otherwise copies.
    static node* reuse(pool& pl, node* n) {
        if (refs(n) == 1 && config::destructive_update)
            return n;
        node* c = clone(pl, n);
        release(pl, n);
        return c;
    }

    // Moves n's children into out[]; consumes n. Steals references when n is
    // unshared (pure ownership transfer, legal even without destructive mode).
    static int take_children(pool& pl, node* n, node* out[4]) {
        int c = n->h.count;
        if (refs(n) == 1) {
            for (int i = 0; i < c; ++i)
                out[i] = n->br.child[i];
            pl.dealloc(n);
        } else {
            for (int i = 0; i < c; ++i)
                out[i] = retain(n->br.child[i]);
            release(pl, n);
        }
        return c;
    }

    static void take_deep(pool& pl, node* t, node** pre, node** spine, node** suf) {
        if (refs(t) == 1) {
            *pre = t->dp.prefix;
            *spine = t->dp.spine;
            *suf = t->dp.suffix;
            pl.dealloc(t);
        } else {
            *pre = retain(t->dp.prefix);
            *spine = t->dp.spine ? retain(t->dp.spine) : nullptr;
            *suf = retain(t->dp.suffix);
            release(pl, t);
        }
    }

    // --- canonicalizing constructors ----------------------------------------

    // 0-4 items of one level into a tree root at the same level. Two or more
    // items need a deep node: an interior would sit one item level higher.
    static node* items_to_tree(pool& pl, node* const* it, int n) {
        switch (n) {
        case 0:
            return nullptr;
        case 1:
            return it[0];
        default: {
            int nl = n / 2;
            node* a = make_digits(pl, it, nl);
            node* b = make_digits(pl, it + nl, n - nl);
            return make_deep(pl, a, nullptr, b);
        }
        }
    }

    static node* digits_to_tree(pool& pl, node* d) {
        node* c[4];
        int n = take_children(pl, d, c);
        return items_to_tree(pl, c, n);
    }

    // Digits from an interior node pulled out of a spine.
    static node* interior_to_digits(pool& pl, node* it) {
        node* c[4];
        int n = take_children(pl, it, c);
        return make_digits(pl, c, n);
    }

    // Deep constructor tolerating an empty prefix (0-4 left items given
    // as an array): borrows replacement items from the spine or suffix.
    static node* deep_l(pool& pl, node* const* pre, int npre, node* spine, node* suffix) {
        if (npre > 0) {
            return make_deep(pl, make_digits(pl, pre, npre), spine, suffix);
        }
        if (!spine)
            return digits_to_tree(pl, suffix);
        node* head = nullptr;
        node* rest = pop_front_item(pl, spine, &head);
        return make_deep(pl, interior_to_digits(pl, head), rest, suffix);
    }

    static node* deep_r(pool& pl, node* prefix, node* spine, node* const* suf, int nsuf) {
        if (nsuf > 0) {
            return make_deep(pl, prefix, spine, make_digits(pl, suf, nsuf));
        }
        if (!spine)
            return digits_to_tree(pl, prefix);
        node* last = nullptr;
        node* rest = pop_back_item(pl, spine, &last);
        return make_deep(pl, prefix, rest, interior_to_digits(pl, last));
    }

    // --- item-level push / pop ---------------------------------------------

    static node* push_back_item(pool& pl, node* t, node* item) {
        if (!t)
            return item;
        if (t->h.kind != node_kind::deep) {
            node* a = make_digits1(pl, t);
            node* b = make_digits1(pl, item);
            return make_deep(pl, a, nullptr, b);
        }
        measure_pair im = mof(item);
        node* d = reuse(pl, t);
        node* suf = d->dp.suffix;
        if (suf->h.count < 4) {
            node* c[4];
            int n = take_children(pl, suf, c);
            c[n] = item;
            d->dp.suffix = make_digits(pl, c, n + 1);
        } else {
            node* c[4];
            take_children(pl, suf, c);
            node* packed = make_interior(pl, c, 3);
            d->dp.spine = push_back_item(pl, d->dp.spine, packed);
            node* two[2] = {c[3], item};
            d->dp.suffix = make_digits(pl, two, 2);
        }
        d->dp.m = M::combine(d->dp.m, im);
        return d;
    }

    static node* push_front_item(pool& pl, node* t, node* item) {
        if (!t)
            return item;
        if (t->h.kind != node_kind::deep) {
            node* a = make_digits1(pl, item);
            node* b = make_digits1(pl, t);
            return make_deep(pl, a, nullptr, b);
        }
        measure_pair im = mof(item);
        node* d = reuse(pl, t);
        node* pre = d->dp.prefix;
        if (pre->h.count < 4) {
            node* c[4];
            int n = take_children(pl, pre, c);
            node* c2[4] = {item, c[0], c[1], c[2]};
            d->dp.prefix = make_digits(pl, c2, n + 1);
        } else {
            node* c[4];
            take_children(pl, pre, c);
            node* packed = make_interior(pl, c + 1, 3);
            d->dp.spine = push_front_item(pl, d->dp.spine, packed);
            node* two[2] = {item, c[0]};
            d->dp.prefix = make_digits(pl, two, 2);
        }
        d->dp.m = M::combine(im, d->dp.m);
        return d;
    }

    // Removes the last item; writes it (owned) to *out, returns the rest.
    static node* pop_back_item(pool& pl, node* t, node** out) {
        if (t->h.kind != node_kind::deep) {
            *out = t;
            return nullptr;
        }
        node *pre, *spine, *suf;
        take_deep(pl, t, &pre, &spine, &suf);
        node* c[4];
        int n = take_children(pl, suf, c);
        *out = c[n - 1];
        return deep_r(pl, pre, spine, c, n - 1);
    }

    static node* pop_front_item(pool& pl, node* t, node** out) {
        if (t->h.kind != node_kind::deep) {
            *out = t;
            return nullptr;
        }
        node *pre, *spine, *suf;
        take_deep(pl, t, &pre, &spine, &suf);
        node* c[4];
        int n = take_children(pl, pre, c);
        *out = c[0];
        return deep_l(pl, c + 1, n - 1, spine, suf);
    }

    // --- element-level push / pop -------------------------------------------

    static node* push_back_value(pool& pl, node* t, const value& v) {
        if (!t)
            return L::singleton(pl, v);
        if (t->h.kind == node_kind::leaf) {
            if (L::has_room(t, v)) {
                node* u = reuse(pl, t);
                L::append_in_place(u, v);
                return u;
            }
            return push_back_item(pl, t, L::singleton(pl, v));
        }
        const node* last = t->dp.suffix->br.child[t->dp.suffix->h.count - 1];
        if (L::has_room(last, v)) {
            measure_pair vm = P::measure_value(v);
            node* d = reuse(pl, t);
            node* s = reuse(pl, d->dp.suffix);
            node* lf = reuse(pl, s->br.child[s->h.count - 1]);
            L::append_in_place(lf, v);
            s->br.child[s->h.count - 1] = lf;
            s->br.m = M::combine(s->br.m, vm);
            d->dp.suffix = s;
            d->dp.m = M::combine(d->dp.m, vm);
            return d;
        }
        return push_back_item(pl, t, L::singleton(pl, v));
    }

    static node* push_front_value(pool& pl, node* t, const value& v) {
        if (!t)
            return L::singleton(pl, v);
        if (t->h.kind == node_kind::leaf) {
            if (L::has_room(t, v)) {
                node* u = L::with_insert(pl, t, 0, v);
                release(pl, t);
                return u;
            }
            return push_front_item(pl, t, L::singleton(pl, v));
        }
        const node* first = t->dp.prefix->br.child[0];
        if (L::has_room(first, v)) {
            measure_pair vm = P::measure_value(v);
            node* d = reuse(pl, t);
            node* s = reuse(pl, d->dp.prefix);
            node* lf = L::with_insert(pl, s->br.child[0], 0, v);
            release(pl, s->br.child[0]);
            s->br.child[0] = lf;
            s->br.m = M::combine(vm, s->br.m);
            d->dp.prefix = s;
            d->dp.m = M::combine(vm, d->dp.m);
            return d;
        }
        return push_front_item(pl, t, L::singleton(pl, v));
    }

    static node* pop_back_value(pool& pl, node* t, value* out) {
        if (!t)
            throw range_error("pop_back on empty tree");
        if (t->h.kind == node_kind::leaf) {
            std::size_t n = L::lcount(t);
            *out = L::at_phys(t, L::phys(t, n - 1));
            if (n == 1) {
                release(pl, t);
                return nullptr;
            }
            node* r = L::with_erase(pl, t, L::phys(t, n - 1));
            release(pl, t);
            return r;
        }
        const node* last = t->dp.suffix->br.child[t->dp.suffix->h.count - 1];
        if (L::lcount(last) > 1) {
            std::size_t p = L::phys(last, L::lcount(last) - 1);
            *out = L::at_phys(last, p);
            measure_pair vm = P::measure_value(*out);
            node* d = reuse(pl, t);
            node* s = reuse(pl, d->dp.suffix);
            node* lf = L::with_erase(pl, s->br.child[s->h.count - 1], p);
            release(pl, s->br.child[s->h.count - 1]);
            s->br.child[s->h.count - 1] = lf;
            recompute_sub(s, vm);
            d->dp.suffix = s;
            recompute_sub_deep(d, vm);
            return d;
        }
        node* lf = nullptr;
        node* rest = pop_back_item(pl, t, &lf);
        *out = L::at_phys(lf, 0);
        release(pl, lf);
        return rest;
    }

    static node* pop_front_value(pool& pl, node* t, value* out) {
        if (!t)
            throw range_error("pop_front on empty tree");
        if (t->h.kind == node_kind::leaf) {
            *out = L::at_phys(t, 0);
            if (L::lcount(t) == 1) {
                release(pl, t);
                return nullptr;
            }
            node* r = L::with_erase(pl, t, 0);
            release(pl, t);
            return r;
        }
        const node* first = t->dp.prefix->br.child[0];
        if (L::lcount(first) > 1) {
            *out = L::at_phys(first, 0);
            measure_pair vm = P::measure_value(*out);
            node* d = reuse(pl, t);
            node* s = reuse(pl, d->dp.prefix);
            node* lf = L::with_erase(pl, s->br.child[0], 0);
            release(pl, s->br.child[0]);
            s->br.child[0] = lf;
            recompute_sub(s, vm);
            d->dp.prefix = s;
            recompute_sub_deep(d, vm);
            return d;
        }
        node* lf = nullptr;
        node* rest = pop_front_item(pl, t, &lf);
        *out = L::at_phys(lf, 0);
        release(pl, lf);
        return rest;
    }

    // Measure subtraction is not defined for every monoid (key rank keeps a
    // rightmost key), so removals recompute caches from children.
    static void recompute_sub(node* n, measure_pair) { recompute(n); }
    static void recompute_sub_deep(node* n, measure_pair) { recompute(n); }

    // --- concatenation -------------------------------------------------------

    // Groups 2-12 items into 1-4 interior nodes of 2-3 children each.
    static int pack_nodes(pool& pl, node* const* c, int n, node* out[4]) {
        int k = 0, i = 0;
        while (n - i > 4) {
            out[k++] = make_interior(pl, c + i, 3);
            i += 3;
        }
        int rest = n - i;
        if (rest == 4) {
            out[k++] = make_interior(pl, c + i, 2);
            out[k++] = make_interior(pl, c + i + 2, 2);
        } else {
            out[k++] = make_interior(pl, c + i, rest);
        }
        return k;
    }

    static node* app3(pool& pl, node* t1, node* const* mid, int nmid, node* t2) {
        if (!t1) {
            node* r = t2;
            for (int i = nmid - 1; i >= 0; --i)
                r = push_front_item(pl, r, mid[i]);
            return r;
        }
        if (!t2) {
            node* r = t1;
            for (int i = 0; i < nmid; ++i)
                r = push_back_item(pl, r, mid[i]);
            return r;
        }
        if (t1->h.kind != node_kind::deep) {
            node* r = app3(pl, nullptr, mid, nmid, t2);
            return push_front_item(pl, r, t1);
        }
        if (t2->h.kind != node_kind::deep) {
            node* r = app3(pl, t1, mid, nmid, nullptr);
            return push_back_item(pl, r, t2);
        }
        node *pre1, *sp1, *suf1, *pre2, *sp2, *suf2;
        take_deep(pl, t1, &pre1, &sp1, &suf1);
        take_deep(pl, t2, &pre2, &sp2, &suf2);
        node* c[12];
        int n = take_children(pl, suf1, c);
        for (int i = 0; i < nmid; ++i)
            c[n++] = mid[i];
        n += take_children(pl, pre2, c + n);
        node* packed[4];
        int np = pack_nodes(pl, c, n, packed);
        node* spine = app3(pl, sp1, packed, np, sp2);
        return make_deep(pl, pre1, spine, suf2);
    }

    static node* concat(pool& pl, node* t1, node* t2) { return app3(pl, t1, nullptr, 0, t2); }

    // --- predicate-guided descent ---------------------------------------------
    // Predicates are monotone over prefix measures: false, then true forever.

    // Read-only: locates the leaf containing the first flip. Writes the
    // measure accumulated before the leaf; returns nullptr if no flip.
    template <class Pred>
    static const node* find_leaf(const node* t, Pred pred, measure_pair& acc) {
        while (t) {
            if (t->h.kind == node_kind::leaf)
                return t;
            if (t->h.kind == node_kind::deep) {
                measure_pair a = M::combine(acc, mof(t->dp.prefix));
                if (pred(a)) {
                    t = t->dp.prefix;
                    continue;
                }
                measure_pair b = M::combine(a, mof(t->dp.spine));
                if (pred(b)) {
                    acc = a;
                    t = t->dp.spine;
                } else {
                    acc = b;
                    t = t->dp.suffix;
                }
                continue;
            }
            // digits / interior
            const node* next = nullptr;
            for (int i = 0; i < t->h.count; ++i) {
                measure_pair a = M::combine(acc, mof(t->br.child[i]));
                if (pred(a)) {
                    next = t->br.child[i];
                    break;
                }
                acc = a;
            }
            t = next;
        }
        return nullptr;
    }

    // Element at logical index i (borrows t).
    static value get_at(const node* t, std::uint64_t i) {
        if (i >= size(t))
            throw range_error("index out of range");
        measure_pair acc = M::identity();
        const node* lf = find_leaf(
            t, [i](measure_pair m) { return M::count(m) > i; }, acc);
        std::size_t li = static_cast<std::size_t>(i - M::count(acc));
        return L::at_phys(lf, L::phys(lf, li));
    }

    // First element whose inclusion flips pred; throws not_found otherwise.
    template <class Pred>
    static value get_first(const node* t, Pred pred) {
        measure_pair acc = M::identity();
        const node* lf = find_leaf(t, pred, acc);
        if (!lf)
            throw not_found("no element satisfies predicate");
        std::size_t n = L::lcount(lf);
        for (std::size_t li = 0; li < n; ++li) {
            std::size_t p = L::phys(lf, li);
            value v = L::at_phys(lf, p);
            acc = M::combine(acc, P::measure_value(v));
            if (pred(acc))
                return v;
        }
        throw contract_error("descent lost the predicate flip");
    }

    // --- point update ----------------------------------------------------------

    static node* update_at(pool& pl, node* t, std::uint64_t i, const value& v) {
        node* u = reuse(pl, t);
        if (u->h.kind == node_kind::leaf) {
            std::size_t p = L::phys(u, static_cast<std::size_t>(i));
            if (L::width_at(u, p) == L::width(v)) {
                assign_same_width(u, p, v);
                return u;
            }
            node* r = L::with_assign(pl, u, p, v);
            release(pl, u);
            return r;
        }
        if (u->h.kind == node_kind::deep) {
            std::uint64_t a = M::count(mof(u->dp.prefix));
            std::uint64_t b = a + M::count(mof(u->dp.spine));
            if (i < a)
                u->dp.prefix = update_at(pl, u->dp.prefix, i, v);
            else if (i < b)
                u->dp.spine = update_at(pl, u->dp.spine, i - a, v);
            else
                u->dp.suffix = update_at(pl, u->dp.suffix, i - b, v);
            recompute(u);
            return u;
        }
        for (int k = 0; k < u->h.count; ++k) {
            std::uint64_t c = M::count(mof(u->br.child[k]));
            if (i < c) {
                u->br.child[k] = update_at(pl, u->br.child[k], i, v);
                recompute(u);
                return u;
            }
            i -= c;
        }
        throw range_error("index out of range");
    }

    static void assign_same_width(node* lf, std::size_t p, const value& v) {
        if constexpr (std::is_same_v<L, utf8_leaf>) {
            std::byte buf[4];
            std::size_t w = utf8_encode(v, buf);
            std::memcpy(lf->elems + p, buf, w);
        } else {
            L::data(lf)[p] = v;
        }
    }

    // --- split -----------------------------------------------------------------

    struct split3 {
        node* left;
        node* item;
        node* right;
    };

    template <class Pred>
    static int split_children(node* const* c, int n, Pred pred, measure_pair& acc) {
        for (int i = 0; i < n; ++i) {
            measure_pair a = M::combine(acc, mof(c[i]));
            if (pred(a))
                return i;
            acc = a;
        }
        throw contract_error("split lost the predicate flip");
    }

    // Pre: pred flips somewhere inside t. Consumes t.
    template <class Pred>
    static split3 split_tree(pool& pl, node* t, Pred pred, measure_pair acc) {
        if (t->h.kind != node_kind::deep)
            return {nullptr, t, nullptr};
        node *pre, *spine, *suf;
        take_deep(pl, t, &pre, &spine, &suf);
        measure_pair a = M::combine(acc, mof(pre));
        if (pred(a)) {
            node* c[4];
            int n = take_children(pl, pre, c);
            int k = split_children(c, n, pred, acc);
            node* left = items_to_tree(pl, c, k);
            node* right = deep_l(pl, c + k + 1, n - k - 1, spine, suf);
            return {left, c[k], right};
        }
        measure_pair b = M::combine(a, mof(spine));
        if (pred(b)) {
            split3 s = split_tree(pl, spine, pred, a);
            node* c[4];
            int n = take_children(pl, s.item, c);
            measure_pair acc2 = M::combine(a, mof(s.left));
            int k = split_children(c, n, pred, acc2);
            node* left = deep_r(pl, pre, s.left, c, k);
            node* right = deep_l(pl, c + k + 1, n - k - 1, s.right, suf);
            return {left, c[k], right};
        }
        node* c[4];
        int n = take_children(pl, suf, c);
        measure_pair acc2 = b;
        int k = split_children(c, n, pred, acc2);
        node* left = deep_r(pl, pre, spine, c, k);
        node* right = items_to_tree(pl, c + k + 1, n - k - 1);
        return {left, c[k], right};
    }

    struct split2 {
        node* left;
        node* right;
    };

    // Elements strictly before the first flip go left; the flip element and
    // everything after go right. Consumes t.
    template <class Pred>
    static split2 split_elements(pool& pl, node* t, Pred pred) {
        if (!t || !pred(mof(t)))
            return {t, nullptr};
        split3 s = split_tree(pl, t, pred, M::identity());
        // locate the flip inside the leaf
        measure_pair acc = M::combine(M::identity(), mof(s.left));
        node* lf = s.item;
        std::size_t n = L::lcount(lf);
        std::size_t li = 0;
        for (; li < n; ++li) {
            acc = M::combine(acc, P::measure_value(L::at_phys(lf, L::phys(lf, li))));
            if (pred(acc))
                break;
        }
        node* left = s.left;
        node* right = s.right;
        if (li > 0)
            left = push_back_item(pl, left, L::slice(pl, lf, 0, L::phys(lf, li)));
        if (li < n)
            right = push_front_item(pl, right,
                                    L::slice(pl, lf, L::phys(lf, li), L::units(lf)));
        release(pl, lf);
        return {left, right};
    }

    // Left part receives exactly i elements. Consumes t.
    static split2 split_at(pool& pl, node* t, std::uint64_t i) {
        return split_elements(pl, t, [i](measure_pair m) { return M::count(m) > i; });
    }

    // --- traversal / verification ------------------------------------------------

    template <class F>
    static void for_each(const node* t, F&& f) {
        if (!t)
            return;
        switch (t->h.kind) {
        case node_kind::leaf: {
            std::size_t u = L::units(t);
            for (std::size_t p = 0; p < u; p += L::width_at(t, p))
                f(L::at_phys(t, p));
            break;
        }
        case node_kind::deep:
            for_each(t->dp.prefix, f);
            for_each(t->dp.spine, f);
            for_each(t->dp.suffix, f);
            break;
        default:
            for (int i = 0; i < t->h.count; ++i)
                for_each(t->br.child[i], f);
            break;
        }
    }

    static std::vector<value> flatten(const node* t) {
        std::vector<value> out;
        out.reserve(static_cast<std::size_t>(size(t)));
        for_each(t, [&](value v) { out.push_back(v); });
        return out;
    }

    // Full structural check: node kinds per level, child counts, cached
    // measures. Throws contract_error on any violation; returns the measure.
    static measure_pair audit(const node* t) { return audit_tree(t, 0); }

    static measure_pair audit_tree(const node* t, int lvl) {
        if (!t)
            return M::identity();
        if (t->h.kind == node_kind::deep) {
            measure_pair m = M::identity();
            m = M::combine(m, audit_digits(t->dp.prefix, lvl));
            m = M::combine(m, audit_tree(t->dp.spine, lvl + 1));
            m = M::combine(m, audit_digits(t->dp.suffix, lvl));
            if (!M::equal(m, t->dp.m))
                throw contract_error("deep node measure cache is stale");
            return m;
        }
        return audit_item(t, lvl);
    }

    static measure_pair audit_digits(const node* d, int lvl) {
        if (!d || d->h.kind != node_kind::digits)
            throw contract_error("expected digits node");
        if (d->h.count < 1 || d->h.count > 4)
            throw contract_error("digits child count out of range");
        measure_pair m = M::identity();
        for (int i = 0; i < d->h.count; ++i)
            m = M::combine(m, audit_item(d->br.child[i], lvl));
        if (!M::equal(m, d->br.m))
            throw contract_error("digits measure cache is stale");
        return m;
    }

    static measure_pair audit_item(const node* n, int lvl) {
        if (lvl == 0) {
            if (n->h.kind != node_kind::leaf)
                throw contract_error("expected leaf at item level 0");
            if (L::units(n) < 1 || L::units(n) > L::max_units)
                throw contract_error("leaf unit count out of range");
            if constexpr (std::is_same_v<L, utf8_leaf>) {
                if (utf8_validate(n->elems, L::units(n)) != L::units(n))
                    throw contract_error("leaf holds malformed utf-8");
            }
            return P::measure_leaf(n);
        }
        if (n->h.kind != node_kind::interior)
            throw contract_error("expected interior node");
        if (n->h.count < 2 || n->h.count > 3)
            throw contract_error("interior child count out of range");
        measure_pair m = M::identity();
        for (int i = 0; i < n->h.count; ++i)
            m = M::combine(m, audit_item(n->br.child[i], lvl - 1));
        if (!M::equal(m, n->br.m))
            throw contract_error("interior measure cache is stale");
        return m;
    }

    // --- debug dump: (kind {f0 f1} child*) with leaves as [e0 e1 ...] ------------

    static void dump(std::ostream& os, const node* t) {
        if (!t) {
            os << "()";
            return;
        }
        switch (t->h.kind) {
        case node_kind::leaf: {
            os << '[';
            bool first = true;
            std::size_t u = L::units(t);
            for (std::size_t p = 0; p < u; p += L::width_at(t, p)) {
                if (!first)
                    os << ' ';
                first = false;
                dump_value(os, L::at_phys(t, p));
            }
            os << ']';
            break;
        }
        case node_kind::deep: {
            os << "(deep ";
            dump_measure(os, t->dp.m);
            os << ' ';
            dump(os, t->dp.prefix);
            os << ' ';
            dump(os, t->dp.spine);
            os << ' ';
            dump(os, t->dp.suffix);
            os << ')';
            break;
        }
        default: {
            os << (t->h.kind == node_kind::digits ? "(digits " : "(interior ");
            dump_measure(os, t->br.m);
            for (int i = 0; i < t->h.count; ++i) {
                os << ' ';
                dump(os, t->br.child[i]);
            }
            os << ')';
            break;
        }
        }
    }

    static std::string dump(const node* t) {
        std::ostringstream os;
        dump(os, t);
        return os.str();
    }

    static void dump_measure(std::ostream& os, measure_pair m) {
        os << '{' << m.f0 << ' ' << m.f1 << '}';
    }

    template <class V>
    static void dump_value(std::ostream& os, const V& v) {
        if constexpr (std::is_integral_v<V> || std::is_same_v<V, char32_t>)
            os << static_cast<std::uint64_t>(v);
        else
            os << v;
    }
};

} // namespace fpp::detail

namespace fpp {

// ---------------------------------------------------------------------------
// tree<P>: an owning handle over an immutable finger tree. Copies are O(1)
// snapshots; mutating members rebind this handle only, never other copies.
// ---------------------------------------------------------------------------

template <class P>
class tree {
public:
    using ops = detail::tree_ops<P>;
    using value = typename P::value;
    using monoid = typename P::monoid;

    explicit tree(pool& pl, detail::node* root = nullptr) : pl_(&pl), root_(root) {}
    tree(const tree& o) : pl_(o.pl_), root_(o.root_ ? detail::retain(o.root_) : nullptr) {}
    tree(tree&& o) noexcept : pl_(o.pl_), root_(o.root_) { o.root_ = nullptr; }
    tree& operator=(const tree& o) {
        tree t(o);
        swap(t);
        return *this;
    }
    tree& operator=(tree&& o) noexcept {
        swap(o);
        return *this;
    }
    ~tree() { detail::release(*pl_, root_); }

    void swap(tree& o) noexcept {
        std::swap(pl_, o.pl_);
        std::swap(root_, o.root_);
    }

    pool& backing_pool() const { return *pl_; }
    detail::node* root() const { return root_; }
    detail::node* take_root() {
        detail::node* r = root_;
        root_ = nullptr;
        return r;
    }

    std::uint64_t size() const { return ops::size(root_); }
    bool empty() const { return root_ == nullptr; }
    measure_pair measure() const { return ops::mof(root_); }

    value get(std::uint64_t i) const { return ops::get_at(root_, i); }

    void push_back(const value& v) { root_ = ops::push_back_value(*pl_, root_, v); }
    void push_front(const value& v) { root_ = ops::push_front_value(*pl_, root_, v); }
    value pop_back() {
        value v{};
        root_ = ops::pop_back_value(*pl_, root_, &v);
        return v;
    }
    value pop_front() {
        value v{};
        root_ = ops::pop_front_value(*pl_, root_, &v);
        return v;
    }
    void set(std::uint64_t i, const value& v) {
        if (i >= size())
            throw range_error("index out of range");
        root_ = ops::update_at(*pl_, root_, i, v);
    }

    // Appends o's elements; o is consumed.
    void concat(tree&& o) { root_ = ops::concat(*pl_, root_, o.take_root()); }

    // Splits off and returns the first i elements; this keeps the rest.
    tree split_off_front(std::uint64_t i) {
        auto s = ops::split_at(*pl_, root_, i);
        root_ = s.right;
        return tree(*pl_, s.left);
    }

    // Pure variants: this tree is untouched.
    tree pushed_back(const value& v) const {
        tree t(*this);
        t.push_back(v);
        return t;
    }
    tree pushed_front(const value& v) const {
        tree t(*this);
        t.push_front(v);
        return t;
    }
    tree updated(std::uint64_t i, const value& v) const {
        tree t(*this);
        t.set(i, v);
        return t;
    }
    tree concatenated(const tree& o) const {
        tree a(*this), b(o);
        a.concat(std::move(b));
        return a;
    }
    std::pair<tree, tree> split(std::uint64_t i) const {
        tree t(*this);
        tree left = t.split_off_front(i);
        return {std::move(left), std::move(t)};
    }

    std::vector<value> flatten() const { return ops::flatten(root_); }
    void audit() const { ops::audit(root_); }
    std::string dump() const { return ops::dump(root_); }

private:
    pool* pl_;
    detail::node* root_;
};

} // namespace fpp
