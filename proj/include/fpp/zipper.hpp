#pragma once

#include <cstdint>

#include "fpp/tree.hpp"

namespace fpp {

// ---------------------------------------------------------------------------
// iterator<P>: a persistent iterator with value semantics, backed by a zipper.
//
// The iterator owns a reversed root-ward path of refcounted path entries.
// Each entry pins one tree node; `start` is the logical position of the
// first element under that node and `child_index` is the node's position in
// its parent (for deep parents: 0 = prefix, 1 = spine, 2 = suffix). The
// bottom entry always pins a leaf; `phys_` is the current offset inside it
// (a byte offset at a scalar boundary for UTF-8 trees).
//
// Point edits replace only the bottom leaf and set its dirty flag; stale
// ancestors are rebuilt lazily, one fold per level, the next time the
// iterator ascends. Copying an iterator is O(1): path entries are shared and
// never mutated while shared. The source container is never invalidated —
// the iterator evolves its own version, extractable with value().
// ---------------------------------------------------------------------------

template <class P>
class iterator {
public:
    using ops = detail::tree_ops<P>;
    using L = typename P::leaf;
    using M = typename P::monoid;
    using value_type = typename P::value;

    // Pins `root` (borrowed: takes its own reference) and seeks position `at`.
    iterator(pool& pl, detail::node* root, std::uint64_t at) : pl_(&pl) {
        size_ = ops::size(root);
        if (at > size_)
            throw range_error("iterator position out of range");
        if (root)
            path_ = detail::alloc_path(pl, detail::retain(root), 0, false, nullptr, 0);
        pos_ = at;
        if (size_ > 0)
            seek_path(at < size_ ? at : size_ - 1);
    }

    iterator(const iterator& o)
        : pl_(o.pl_), path_(o.path_ ? detail::retain(o.path_) : nullptr), pos_(o.pos_),
          size_(o.size_), phys_(o.phys_) {}
    iterator(iterator&& o) noexcept
        : pl_(o.pl_), path_(o.path_), pos_(o.pos_), size_(o.size_), phys_(o.phys_) {
        o.path_ = nullptr;
    }
    iterator& operator=(const iterator& o) {
        iterator t(o);
        swap(t);
        return *this;
    }
    iterator& operator=(iterator&& o) noexcept {
        swap(o);
        return *this;
    }
    ~iterator() { detail::release(*pl_, path_); }

    void swap(iterator& o) noexcept {
        std::swap(pl_, o.pl_);
        std::swap(path_, o.path_);
        std::swap(pos_, o.pos_);
        std::swap(size_, o.size_);
        std::swap(phys_, o.phys_);
    }

    std::uint64_t position() const { return pos_; }
    std::uint64_t count() const { return size_; }
    bool at_end() const { return pos_ == size_; }

    value_type operator*() const {
        if (at_end())
            throw contract_error("dereference at end");
        return L::at_phys(path_->tnode, phys_);
    }

    iterator& operator++() {
        if (at_end())
            throw contract_error("increment past end");
        ++pos_;
        if (at_end())
            return *this; // path stays pinned to the last leaf
        phys_ += L::width_at(path_->tnode, phys_);
        if (phys_ >= L::units(path_->tnode))
            seek_path(pos_);
        return *this;
    }

    iterator& operator--() {
        if (pos_ == 0)
            throw contract_error("decrement before begin");
        --pos_;
        if (in_bottom(pos_))
            phys_ = static_cast<std::uint32_t>(
                L::phys(path_->tnode, static_cast<std::size_t>(pos_ - path_->start)));
        else
            seek_path(pos_);
        return *this;
    }

    void seek(std::uint64_t i) {
        if (i > size_)
            throw range_error("seek out of range");
        pos_ = i;
        if (size_ == 0)
            return;
        seek_path(i < size_ ? i : size_ - 1);
    }

    // Replaces the current element. The iterator does not move.
    void assign(const value_type& v) {
        if (at_end())
            throw contract_error("assign at end");
        detail::node* lf = path_->tnode;
        if (L::assign_fits(lf, phys_, v)) {
            if (detail::refs(lf) == 1 && config::destructive_update &&
                L::width_at(lf, phys_) == L::width(v)) {
                own_bottom();
                ops::assign_same_width(path_->tnode, phys_, v);
                path_->dirty = true;
            } else {
                set_leaf(L::with_assign(*pl_, lf, phys_, v));
            }
            return;
        }
        // replacement scalar overflows this leaf: splice instead
        erase();
        insert(v);
        --*this;
    }

    // Inserts v before the current element; lands just after v, i.e. back on
    // the element that was current (or at end when inserting at end).
    void insert(const value_type& v) {
        if (!path_) {
            detail::node* root = L::singleton(*pl_, v);
            path_ = detail::alloc_path(*pl_, root, 0, false, nullptr, 0);
            size_ = 1;
            pos_ = 1;
            phys_ = 0;
            return;
        }
        detail::node* lf = path_->tnode;
        std::uint32_t ip = at_end() ? static_cast<std::uint32_t>(L::units(lf)) : phys_;
        if (L::has_room(lf, v)) {
            set_leaf(L::with_insert(*pl_, lf, ip, v));
            ++size_;
            ++pos_;
            phys_ = at_end() ? ip : ip + static_cast<std::uint32_t>(L::width(v));
            return;
        }
        // leaf overflow: rebuild through split/concat and re-seek
        std::uint64_t at = pos_;
        detail::node* root = rebuild_root();
        auto s = ops::split_at(*pl_, root, at);
        s.left = ops::push_back_value(*pl_, s.left, v);
        reset(ops::concat(*pl_, s.left, s.right), at + 1, size_ + 1);
    }

    // Removes the current element; lands on its successor.
    void erase() {
        if (at_end())
            throw contract_error("erase at end");
        detail::node* lf = path_->tnode;
        if (L::lcount(lf) > 1) {
            set_leaf(L::with_erase(*pl_, lf, phys_));
            --size_;
            if (at_end()) {
                // pin the new last element for a later decrement
                std::size_t n = L::lcount(path_->tnode);
                if (in_bottom(size_ - 1))
                    phys_ = static_cast<std::uint32_t>(L::phys(path_->tnode, n - 1));
                else
                    seek_path(size_ - 1);
            } else if (phys_ >= L::units(path_->tnode)) {
                seek_path(pos_);
            }
            return;
        }
        // the leaf empties: rebuild structurally
        std::uint64_t at = pos_;
        detail::node* root = rebuild_root();
        auto s = ops::split_at(*pl_, root, at);
        value_type dropped{};
        s.right = ops::pop_front_value(*pl_, s.right, &dropped);
        reset(ops::concat(*pl_, s.left, s.right), at, size_ - 1);
    }

    // Extracts the iterator's version as a container root; O(path length).
    // The iterator remains valid and keeps its position.
    tree<P> value() const {
        if (!path_)
            return tree<P>(*pl_);
        detail::path_node* p = detail::retain(path_);
        while (p->parent)
            p = fold_pop(p);
        detail::node* r = detail::retain(p->tnode);
        detail::release(*pl_, p);
        return tree<P>(*pl_, r);
    }

    // Iterators over the same lineage compare by position.
    friend bool operator==(const iterator& a, const iterator& b) {
        return a.pos_ == b.pos_ && a.size_ == b.size_;
    }

private:
    bool in_bottom(std::uint64_t i) const {
        if (!path_)
            return false;
        const detail::node* lf = path_->tnode;
        return path_->start <= i && i < path_->start + L::lcount(lf);
    }

    // Makes the bottom entry exclusively ours so its fields can be mutated.
    void own_bottom() {
        if (detail::refs_path(path_) == 1)
            return;
        detail::path_node* p = detail::alloc_path(
            *pl_, detail::retain(path_->tnode), path_->child_index, path_->dirty,
            path_->parent ? detail::retain(path_->parent) : nullptr, path_->start);
        detail::release(*pl_, path_);
        path_ = p;
    }

    void set_leaf(detail::node* nl /*owned*/) {
        own_bottom();
        detail::release(*pl_, path_->tnode);
        path_->tnode = nl;
        path_->dirty = true;
    }

    // Rebuilds c's parent from its (possibly dirty) child and pops one level.
    // Consumes the reference on c; returns an owned entry one level up.
    detail::path_node* fold_pop(detail::path_node* c) const {
        detail::path_node* par = c->parent;
        if (!c->dirty) {
            detail::path_node* r = detail::retain(par);
            detail::release(*pl_, c);
            return r;
        }
        detail::node* nt = replace_child(par->tnode, c->child_index, c->tnode);
        detail::path_node* r =
            detail::alloc_path(*pl_, nt, par->child_index, true,
                               par->parent ? detail::retain(par->parent) : nullptr, par->start);
        detail::release(*pl_, c);
        return r;
    }

    // Copy of pt with child `ci` swapped for nc (borrowed); measure refreshed.
    detail::node* replace_child(detail::node* pt, std::uint32_t ci, detail::node* nc) const {
        detail::node* nt = detail::clone(*pl_, pt);
        if (nt->h.kind == detail::node_kind::deep) {
            detail::node** slot = ci == 0   ? &nt->dp.prefix
                                  : ci == 1 ? &nt->dp.spine
                                            : &nt->dp.suffix;
            detail::release(*pl_, *slot);
            *slot = detail::retain(nc);
        } else {
            detail::release(*pl_, nt->br.child[ci]);
            nt->br.child[ci] = detail::retain(nc);
        }
        ops::recompute(nt);
        return nt;
    }

    // Folds the whole path into a root and drops the path. Returns the root.
    detail::node* rebuild_root() {
        detail::path_node* p = detail::retain(path_);
        while (p->parent)
            p = fold_pop(p);
        detail::node* r = detail::retain(p->tnode);
        detail::release(*pl_, p);
        detail::release(*pl_, path_);
        path_ = nullptr;
        return r;
    }

    void reset(detail::node* root /*owned*/, std::uint64_t at, std::uint64_t new_size) {
        detail::release(*pl_, path_);
        path_ = nullptr;
        size_ = new_size;
        pos_ = at;
        if (root)
            path_ = detail::alloc_path(*pl_, root, 0, false, nullptr, 0);
        else
            phys_ = 0;
        if (size_ > 0)
            seek_path(at < size_ ? at : size_ - 1);
    }

    // Moves the bottom of the path to the leaf containing element `target`,
    // folding dirty entries on the way up. Pre: target < size_, path_ set.
    void seek_path(std::uint64_t target) {
        while (!(path_->start <= target &&
                 target < path_->start + M::count(ops::mof(path_->tnode)))) {
            if (!path_->parent)
                throw contract_error("seek target outside the tree");
            path_ = fold_pop(path_);
        }
        while (path_->tnode->h.kind != detail::node_kind::leaf) {
            detail::node* t = path_->tnode;
            std::uint64_t s = path_->start;
            detail::node* ch = nullptr;
            std::uint32_t ci = 0;
            if (t->h.kind == detail::node_kind::deep) {
                std::uint64_t a = s + M::count(ops::mof(t->dp.prefix));
                std::uint64_t b = a + M::count(ops::mof(t->dp.spine));
                if (target < a) {
                    ch = t->dp.prefix;
                    ci = 0;
                } else if (target < b) {
                    ch = t->dp.spine;
                    ci = 1;
                    s = a;
                } else {
                    ch = t->dp.suffix;
                    ci = 2;
                    s = b;
                }
            } else {
                for (int i = 0; i < t->h.count; ++i) {
                    std::uint64_t c = M::count(ops::mof(t->br.child[i]));
                    if (target < s + c) {
                        ch = t->br.child[i];
                        ci = static_cast<std::uint32_t>(i);
                        break;
                    }
                    s += c;
                }
            }
            path_ = detail::alloc_path(*pl_, detail::retain(ch), ci, false, path_, s);
        }
        phys_ = static_cast<std::uint32_t>(
            L::phys(path_->tnode, static_cast<std::size_t>(target - path_->start)));
    }

    pool* pl_;
    detail::path_node* path_ = nullptr;
    std::uint64_t pos_ = 0;
    std::uint64_t size_ = 0;
    std::uint32_t phys_ = 0;
};

template <class P>
iterator<P> begin(const tree<P>& t) {
    return iterator<P>(t.backing_pool(), t.root(), 0);
}

template <class P>
iterator<P> end(const tree<P>& t) {
    return iterator<P>(t.backing_pool(), t.root(), t.size());
}

template <class P>
iterator<P> iter_at(const tree<P>& t, std::uint64_t i) {
    return iterator<P>(t.backing_pool(), t.root(), i);
}

} // namespace fpp
