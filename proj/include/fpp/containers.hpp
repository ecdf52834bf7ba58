#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "fpp/zipper.hpp"

namespace fpp {

// ---------------------------------------------------------------------------
// Container façade. Every container is the same finger tree under a different
// monoid. Methods mutate by rebinding this handle's root; other handles and
// iterators keep their versions. Each mutator has a pure *ed/with_* variant
// returning the new value and leaving *this untouched.
//
// Sorted containers use the natural order on 64-bit keys: the cached
// (count, rightmost-key) measure stores raw key words, so the order must be
// the numeric order of those words.
// ---------------------------------------------------------------------------

template <class P>
class basic_vector {
public:
    using value_type = typename P::value;
    using iter = fpp::iterator<P>;
    using ops = detail::tree_ops<P>;

    explicit basic_vector(pool& pl) : t_(pl) {}
    explicit basic_vector(tree<P> t) : t_(std::move(t)) {}

    std::uint64_t size() const { return t_.size(); }
    bool empty() const { return t_.empty(); }
    value_type get(std::uint64_t i) const { return t_.get(i); }
    value_type front() const { return t_.get(0); }
    value_type back() const { return t_.get(size() - 1); }

    void push_back(value_type v) { t_.push_back(v); }
    void push_front(value_type v) { t_.push_front(v); }
    value_type pop_back() { return t_.pop_back(); }
    value_type pop_front() { return t_.pop_front(); }
    void set(std::uint64_t i, value_type v) { t_.set(i, v); }
    void concat(const basic_vector& o) { t_.concat(tree<P>(o.t_)); }

    basic_vector pushed_back(value_type v) const { return basic_vector(t_.pushed_back(v)); }
    basic_vector pushed_front(value_type v) const { return basic_vector(t_.pushed_front(v)); }
    basic_vector with_set(std::uint64_t i, value_type v) const {
        return basic_vector(t_.updated(i, v));
    }
    basic_vector concatenated(const basic_vector& o) const {
        return basic_vector(t_.concatenated(o.t_));
    }

    iter begin() const { return fpp::begin(t_); }
    iter end() const { return fpp::end(t_); }
    iter iter_at(std::uint64_t i) const { return fpp::iter_at(t_, i); }

    // Adopts an iterator's version as this handle's new value.
    void adopt(const iter& it) { t_ = it.value(); }

    std::vector<value_type> flatten() const { return t_.flatten(); }
    void audit() const { t_.audit(); }
    std::string dump() const { return t_.dump(); }
    const tree<P>& backing_tree() const { return t_; }

private:
    tree<P> t_;
};

using Vector = basic_vector<detail::vector_policy<std::uint64_t>>;
using ByteVector = basic_vector<detail::byte_view_policy>;

// ---------------------------------------------------------------------------
// Sorted containers over 64-bit keys.
// ---------------------------------------------------------------------------

struct kv_pair {
    std::uint64_t key = 0;
    std::uint64_t val = 0;
    friend bool operator==(kv_pair, kv_pair) = default;
};

inline std::ostream& operator<<(std::ostream& os, kv_pair p) {
    return os << p.key << ':' << p.val;
}

namespace detail {

struct kv_key {
    static std::uint64_t key(kv_pair p) { return p.key; }
};

// Machinery shared by set/multiset/map/multimap: splits and searches keyed on
// the (count, rightmost-key) measure.
template <class P, class KeyOf>
class sorted_base {
public:
    using value_type = typename P::value;
    using iter = fpp::iterator<P>;
    using ops = tree_ops<P>;
    using K = key_rank_monoid;

    explicit sorted_base(pool& pl) : t_(pl) {}
    explicit sorted_base(tree<P> t) : t_(std::move(t)) {}

    std::uint64_t size() const { return t_.size(); }
    bool empty() const { return t_.empty(); }

    // Rank of the first element with key >= k (== size() when none).
    std::uint64_t lower_bound_rank(std::uint64_t k) const {
        measure_pair acc = K::identity();
        const node* lf = ops::find_leaf(t_.root(), pred_ge(k), acc);
        if (!lf)
            return size();
        std::uint64_t rank = K::count(acc);
        std::size_t n = P::leaf::lcount(lf);
        for (std::size_t li = 0; li < n; ++li, ++rank)
            if (KeyOf::key(P::leaf::at_phys(lf, P::leaf::phys(lf, li))) >= k)
                break;
        return rank;
    }

    bool contains(std::uint64_t k) const {
        std::uint64_t r = lower_bound_rank(k);
        return r < size() && KeyOf::key(get_by_rank(r)) == k;
    }

    // Iterator parked on the first element with key k, or end().
    iter find(std::uint64_t k) const {
        std::uint64_t r = lower_bound_rank(k);
        if (r < size() && KeyOf::key(get_by_rank(r)) == k)
            return fpp::iter_at(t_, r);
        return fpp::end(t_);
    }

    value_type get_by_rank(std::uint64_t idx) const { return t_.get(idx); }

    // Plain keyed lookup; absence is reported, never papered over.
    value_type get_by_key(std::uint64_t k) const {
        std::uint64_t r = lower_bound_rank(k);
        if (r >= size())
            throw not_found("key " + std::to_string(k) + " absent");
        value_type v = get_by_rank(r);
        if (KeyOf::key(v) != k)
            throw not_found("key " + std::to_string(k) + " absent");
        return v;
    }

    // Removes the leftmost element with key k; false if absent.
    bool erase(std::uint64_t k) {
        pool& pl = t_.backing_pool();
        auto s = ops::split_elements(pl, t_.take_root(), pred_ge(k));
        bool hit = s.right && KeyOf::key(ops::get_at(s.right, 0)) == k;
        if (hit) {
            value_type dropped{};
            s.right = ops::pop_front_value(pl, s.right, &dropped);
        }
        rebind(ops::concat(pl, s.left, s.right));
        return hit;
    }

    iter begin() const { return fpp::begin(t_); }
    iter end() const { return fpp::end(t_); }

    std::vector<value_type> flatten() const { return t_.flatten(); }

    // Tree invariants plus global key order (strict when unique_keys).
    void audit_sorted(bool unique_keys) const {
        t_.audit();
        bool have = false;
        std::uint64_t prev = 0;
        ops::for_each(t_.root(), [&](value_type v) {
            std::uint64_t k = KeyOf::key(v);
            if (have && (unique_keys ? k <= prev : k < prev))
                throw contract_error("sorted-container key order violated");
            prev = k;
            have = true;
        });
    }

    std::string dump() const { return t_.dump(); }
    const tree<P>& backing_tree() const { return t_; }

protected:
    static auto pred_ge(std::uint64_t k) {
        return [k](measure_pair m) { return K::has_key(m) && K::key(m) >= k; };
    }
    static auto pred_gt(std::uint64_t k) {
        return [k](measure_pair m) { return K::has_key(m) && K::key(m) > k; };
    }

    void rebind(node* root /*owned*/) { t_ = tree<P>(t_.backing_pool(), root); }

    tree<P> t_;
};

using set_policy = keyrank_policy<std::uint64_t, identity_key>;
using map_policy = keyrank_policy<kv_pair, kv_key>;

} // namespace detail

class SortedSet : public detail::sorted_base<detail::set_policy, detail::identity_key> {
public:
    using base = detail::sorted_base<detail::set_policy, detail::identity_key>;
    using base::base;

    // No-op when the key is already present.
    bool insert(std::uint64_t k) {
        pool& pl = t_.backing_pool();
        auto s = ops::split_elements(pl, t_.take_root(), pred_ge(k));
        bool fresh = !(s.right && ops::get_at(s.right, 0) == k);
        if (fresh)
            s.left = ops::push_back_value(pl, s.left, k);
        rebind(ops::concat(pl, s.left, s.right));
        return fresh;
    }

    SortedSet inserted(std::uint64_t k) const {
        SortedSet c(*this);
        c.insert(k);
        return c;
    }
    SortedSet erased(std::uint64_t k) const {
        SortedSet c(*this);
        c.erase(k);
        return c;
    }
    void audit() const { audit_sorted(true); }
};

class MultiSet : public detail::sorted_base<detail::set_policy, detail::identity_key> {
public:
    using base = detail::sorted_base<detail::set_policy, detail::identity_key>;
    using base::base;

    // Placed after all elements with equal keys.
    void insert(std::uint64_t k) {
        pool& pl = t_.backing_pool();
        auto s = ops::split_elements(pl, t_.take_root(), pred_gt(k));
        s.left = ops::push_back_value(pl, s.left, k);
        rebind(ops::concat(pl, s.left, s.right));
    }

    // Removes every element with key k; returns how many went away.
    std::uint64_t erase_all(std::uint64_t k) {
        pool& pl = t_.backing_pool();
        auto s = ops::split_elements(pl, t_.take_root(), pred_ge(k));
        auto s2 = ops::split_elements(pl, s.right, pred_gt(k));
        std::uint64_t n = ops::size(s2.left);
        detail::release(pl, s2.left);
        rebind(ops::concat(pl, s.left, s2.right));
        return n;
    }

    MultiSet inserted(std::uint64_t k) const {
        MultiSet c(*this);
        c.insert(k);
        return c;
    }
    void audit() const { audit_sorted(false); }
};

class SortedMap : public detail::sorted_base<detail::map_policy, detail::kv_key> {
public:
    using base = detail::sorted_base<detail::map_policy, detail::kv_key>;
    using base::base;

    // Replaces the mapped value when the key exists.
    void insert(std::uint64_t k, std::uint64_t v) {
        pool& pl = t_.backing_pool();
        auto s = ops::split_elements(pl, t_.take_root(), pred_ge(k));
        if (s.right && ops::get_at(s.right, 0).key == k) {
            kv_pair dropped{};
            s.right = ops::pop_front_value(pl, s.right, &dropped);
        }
        s.left = ops::push_back_value(pl, s.left, kv_pair{k, v});
        rebind(ops::concat(pl, s.left, s.right));
    }

    std::optional<std::uint64_t> find_value(std::uint64_t k) const {
        std::uint64_t r = lower_bound_rank(k);
        if (r >= size())
            return std::nullopt;
        kv_pair p = get_by_rank(r);
        return p.key == k ? std::optional(p.val) : std::nullopt;
    }

    // Keyed read, inserting `fallback` first when the key is absent.
    std::uint64_t get_or_insert(std::uint64_t k, std::uint64_t fallback) {
        if (auto v = find_value(k))
            return *v;
        insert(k, fallback);
        return fallback;
    }

    SortedMap with(std::uint64_t k, std::uint64_t v) const {
        SortedMap c(*this);
        c.insert(k, v);
        return c;
    }
    SortedMap erased(std::uint64_t k) const {
        SortedMap c(*this);
        c.erase(k);
        return c;
    }
    void audit() const { audit_sorted(true); }
};

class MultiMap : public detail::sorted_base<detail::map_policy, detail::kv_key> {
public:
    using base = detail::sorted_base<detail::map_policy, detail::kv_key>;
    using base::base;

    // Placed after all pairs with equal keys.
    void insert(std::uint64_t k, std::uint64_t v) {
        pool& pl = t_.backing_pool();
        auto s = ops::split_elements(pl, t_.take_root(), pred_gt(k));
        s.left = ops::push_back_value(pl, s.left, kv_pair{k, v});
        rebind(ops::concat(pl, s.left, s.right));
    }

    std::uint64_t erase_all(std::uint64_t k) {
        pool& pl = t_.backing_pool();
        auto s = ops::split_elements(pl, t_.take_root(), pred_ge(k));
        auto s2 = ops::split_elements(pl, s.right, pred_gt(k));
        std::uint64_t n = ops::size(s2.left);
        detail::release(pl, s2.left);
        rebind(ops::concat(pl, s.left, s2.right));
        return n;
    }

    MultiMap with(std::uint64_t k, std::uint64_t v) const {
        MultiMap c(*this);
        c.insert(k, v);
        return c;
    }
    void audit() const { audit_sorted(false); }
};

// ---------------------------------------------------------------------------
// Utf8String: code-point indexed, byte-measured.
// ---------------------------------------------------------------------------

class Utf8String {
public:
    using P = detail::utf8_policy;
    using iter = fpp::iterator<P>;
    using ops = detail::tree_ops<P>;
    using L = detail::utf8_leaf;

    explicit Utf8String(pool& pl) : t_(pl) {}
    explicit Utf8String(tree<P> t) : t_(std::move(t)) {}

    // Validates, then bulk-loads whole chunks cut at scalar boundaries.
    static Utf8String from_utf8(pool& pl, std::string_view bytes) {
        const auto* p = reinterpret_cast<const std::byte*>(bytes.data());
        std::size_t n = bytes.size();
        std::size_t ok = detail::utf8_validate(p, n);
        if (ok != n)
            throw utf8_error(ok);
        detail::node* root = nullptr;
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j < n) {
                std::size_t w = detail::utf8_seq_width(p[j]);
                if (j + w - i > L::max_units)
                    break;
                j += w;
            }
            root = ops::push_back_item(pl, root, L::make(pl, p + i, j - i));
            i = j;
        }
        return Utf8String(tree<P>(pl, root));
    }

    std::string to_bytes() const {
        std::string out;
        out.reserve(static_cast<std::size_t>(byte_size()));
        ops::for_each(t_.root(), [&](char32_t c) {
            std::byte buf[4];
            std::size_t w = detail::utf8_encode(c, buf);
            out.append(reinterpret_cast<const char*>(buf), w);
        });
        return out;
    }

    std::uint64_t size() const { return t_.size(); } // Unicode scalars
    std::uint64_t byte_size() const { return t_.measure().f1; }
    bool empty() const { return t_.empty(); }

    char32_t get(std::uint64_t i) const { return t_.get(i); }
    // Iterator-based: a wider scalar can overflow the leaf, which assign()
    // handles by splicing; the plain positional update path does not.
    void set(std::uint64_t i, char32_t c) {
        if (i >= size())
            throw range_error("index out of range");
        iter it = iter_at(i);
        it.assign(c);
        adopt(it);
    }
    void append_char(char32_t c) { t_.push_back(c); }
    void push_front(char32_t c) { t_.push_front(c); }
    void append(const Utf8String& o) { t_.concat(tree<P>(o.t_)); }

    // Code-point suffix from idx; shares structure with the source.
    Utf8String substr(std::uint64_t idx) const {
        auto [head, tail] = t_.split(idx);
        (void)head;
        return Utf8String(std::move(tail));
    }
    Utf8String substr(std::uint64_t idx, std::uint64_t n) const {
        auto [head, tail] = t_.split(idx);
        (void)head;
        auto [mid, rest] = tail.split(n);
        (void)rest;
        return Utf8String(std::move(mid));
    }

    Utf8String appended_char(char32_t c) const { return Utf8String(t_.pushed_back(c)); }
    Utf8String appended(const Utf8String& o) const { return Utf8String(t_.concatenated(o.t_)); }

    iter begin() const { return fpp::begin(t_); }
    iter end() const { return fpp::end(t_); }
    iter iter_at(std::uint64_t i) const { return fpp::iter_at(t_, i); }
    void adopt(const iter& it) { t_ = it.value(); }

    void audit() const { t_.audit(); } // includes per-leaf UTF-8 validation
    std::string dump() const { return t_.dump(); }
    const tree<P>& backing_tree() const { return t_; }

private:
    tree<P> t_;
};

// ---------------------------------------------------------------------------
// Zero-cost upcasts: the result wraps the SAME root under a weaker monoid.
// The measure layouts agree on the fields the weaker monoid reads, so not a
// single node is copied; the result is an independent value from then on.
// ---------------------------------------------------------------------------

inline Vector upcast_set_to_vector(const SortedSet& s) {
    detail::node* r = s.backing_tree().root();
    using vt = tree<detail::vector_policy<std::uint64_t>>;
    return Vector(vt(s.backing_tree().backing_pool(), r ? detail::retain(r) : nullptr));
}

inline ByteVector upcast_string_to_byte_vector(const Utf8String& s) {
    detail::node* r = s.backing_tree().root();
    using bt = tree<detail::byte_view_policy>;
    return ByteVector(bt(s.backing_tree().backing_pool(), r ? detail::retain(r) : nullptr));
}

} // namespace fpp
