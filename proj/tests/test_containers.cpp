#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <fpp/containers.hpp>

using namespace fpp;

TEST_CASE("vector API matches a growable-array oracle") {
    pool pl(1 << 20);
    Vector v(pl);
    const std::uint64_t n = 4000;
    for (std::uint64_t i = 0; i < n; ++i)
        v.push_back(i);
    for (std::uint64_t i = 0; i < n; ++i)
        CHECK(v.get(i) == i);
    CHECK(v.front() == 0);
    CHECK(v.back() == n - 1);
    v.push_front(999);
    CHECK(v.front() == 999);
    CHECK(v.pop_front() == 999);
    CHECK(v.pop_back() == n - 1);
    CHECK(v.size() == n - 1);
    v.set(10, 1234);
    CHECK(v.get(10) == 1234);
    v.audit();
}

TEST_CASE("concatenating ten 1000-element vectors gives 10^4 in oracle order") {
    pool pl(1 << 21);
    Vector all(pl);
    std::vector<std::uint64_t> oracle;
    for (int b = 0; b < 10; ++b) {
        Vector part(pl);
        for (std::uint64_t i = 0; i < 1000; ++i) {
            part.push_back(b * 1000 + i);
            oracle.push_back(b * 1000 + i);
        }
        all.concat(part);
        CHECK(part.size() == 1000); // operand untouched
    }
    CHECK(all.size() == 10000);
    CHECK(all.flatten() == oracle);
    all.audit();
}

TEST_CASE("sorted set: shuffled inserts come out sorted and deduplicated") {
    pool pl(1 << 20);
    SortedSet s(pl);
    std::vector<std::uint64_t> keys(1000);
    std::iota(keys.begin(), keys.end(), 0);
    std::shuffle(keys.begin(), keys.end(), std::mt19937_64(3));
    for (auto k : keys)
        CHECK(s.insert(k));
    CHECK(s.size() == 1000);
    s.audit();
    auto flat = s.flatten();
    CHECK(std::is_sorted(flat.begin(), flat.end()));
    for (std::uint64_t i = 0; i < 1000; ++i)
        CHECK(s.get_by_rank(i) == i); // rank access == sorted oracle

    CHECK(!s.insert(5)); // duplicate is a no-op
    CHECK(s.size() == 1000);
    CHECK(s.contains(5));
    CHECK(!s.contains(1000));
    CHECK(s.erase(5));
    CHECK(!s.erase(5));
    CHECK(!s.contains(5));
    CHECK_THROWS_AS(s.get_by_key(5), not_found);
    CHECK(s.get_by_key(6) == 6);
    auto it = s.find(7);
    CHECK(*it == 7);
    CHECK(s.find(5).at_end());
}

TEST_CASE("multiset keeps duplicates; erase takes the leftmost, erase_all every one") {
    pool pl(1 << 16);
    MultiSet m(pl);
    m.insert(5);
    m.insert(5);
    m.insert(5);
    CHECK(m.size() == 3);
    m.insert(3);
    m.insert(7);
    m.audit();
    CHECK(m.flatten() == std::vector<std::uint64_t>{3, 5, 5, 5, 7});
    CHECK(m.erase(5));
    CHECK(m.size() == 4);
    CHECK(m.erase_all(5) == 2);
    CHECK(m.flatten() == std::vector<std::uint64_t>{3, 7});
    CHECK(m.erase_all(99) == 0);
    m.audit();
}

TEST_CASE("sorted map replaces on duplicate key; lookup never inserts silently") {
    pool pl(1 << 18);
    SortedMap m(pl);
    m.insert(10, 100);
    m.insert(20, 200);
    m.insert(10, 111); // replace
    CHECK(m.size() == 2);
    CHECK(m.get_by_key(10).val == 111);
    CHECK(m.find_value(30) == std::nullopt);
    CHECK_THROWS_AS(m.get_by_key(30), not_found);
    CHECK(m.size() == 2); // the plain lookup did NOT insert
    CHECK(m.get_or_insert(30, 7) == 7);
    CHECK(m.size() == 3); // the explicit variant did
    CHECK(m.get_or_insert(30, 999) == 7);
    m.audit();
    CHECK(m.get_by_rank(0) == kv_pair{10, 111});
}

TEST_CASE("multimap inserts after equal keys, pinning duplicate order") {
    pool pl(1 << 16);
    MultiMap m(pl);
    m.insert(5, 1);
    m.insert(2, 9);
    m.insert(5, 2);
    m.insert(5, 3);
    m.audit();
    auto flat = m.flatten();
    CHECK(flat == std::vector<kv_pair>{{2, 9}, {5, 1}, {5, 2}, {5, 3}});
    CHECK(m.erase(5)); // leftmost equal key
    CHECK(m.flatten() == std::vector<kv_pair>{{2, 9}, {5, 2}, {5, 3}});
    CHECK(m.erase_all(5) == 2);
    CHECK(m.size() == 1);
}

TEST_CASE("sorted containers fuzz against std oracles with per-op audits") {
    pool pl(1 << 22);
    SortedSet s(pl);
    std::set<std::uint64_t> s_oracle;
    MultiMap mm(pl);
    std::multimap<std::uint64_t, std::uint64_t> mm_oracle;
    std::mt19937_64 rng(17);

    for (int op = 0; op < 10000; ++op) {
        std::uint64_t k = rng() % 300;
        switch (rng() % 4) {
        case 0:
            CHECK(s.insert(k) == s_oracle.insert(k).second);
            mm.insert(k, static_cast<std::uint64_t>(op));
            mm_oracle.emplace(k, op);
            break;
        case 1:
            CHECK(s.erase(k) == (s_oracle.erase(k) > 0));
            break;
        case 2: {
            CHECK(s.contains(k) == s_oracle.contains(k));
            auto c = mm_oracle.count(k);
            if (c > 0 && rng() % 2) {
                CHECK(mm.erase_all(k) == c);
                mm_oracle.erase(k);
            }
            break;
        }
        case 3:
            if (!s_oracle.empty()) {
                std::uint64_t r = rng() % s_oracle.size();
                CHECK(s.get_by_rank(r) == *std::next(s_oracle.begin(), r));
            }
            break;
        }
        if (op % 97 == 0) {
            s.audit();
            mm.audit();
        }
    }
    s.audit();
    mm.audit();
    CHECK(s.flatten() == std::vector<std::uint64_t>(s_oracle.begin(), s_oracle.end()));
    std::vector<kv_pair> mo;
    for (auto [k, v] : mm_oracle)
        mo.push_back({k, v});
    // std::multimap preserves insertion order among equal keys, same as ours
    CHECK(mm.flatten() == mo);
}

TEST_CASE("value semantics: mutating any copy leaves the original alone") {
    pool pl(1 << 20);
    SortedSet s(pl);
    for (std::uint64_t i = 0; i < 500; ++i)
        s.insert(i * 2);
    SortedSet snap = s; // O(1)
    s.insert(1);
    s.erase(0);
    CHECK(snap.size() == 500);
    CHECK(snap.contains(0));
    CHECK(!snap.contains(1));
    SortedSet pure = snap.inserted(1);
    CHECK(pure.contains(1));
    CHECK(!snap.contains(1));

    Vector v(pl);
    for (std::uint64_t i = 0; i < 100; ++i)
        v.push_back(i);
    Vector w = v.with_set(3, 99);
    CHECK(v.get(3) == 3);
    CHECK(w.get(3) == 99);
}

TEST_CASE("utf-8 string round-trips and counts scalars vs bytes") {
    pool pl(1 << 18);
    Utf8String s = Utf8String::from_utf8(pl, "héllo");
    CHECK(s.size() == 5);
    CHECK(s.byte_size() == 6);
    CHECK(s.get(0) == U'h');
    CHECK(s.get(1) == U'é');
    CHECK(s.to_bytes() == "héllo");
    s.audit();

    Utf8String w = Utf8String::from_utf8(pl, "hello world");
    CHECK(w.substr(6).to_bytes() == "world");
    CHECK(w.substr(0, 5).to_bytes() == "hello");

    CHECK_THROWS_AS(Utf8String::from_utf8(pl, std::string_view("ab\xffz", 4)), utf8_error);
    try {
        Utf8String::from_utf8(pl, std::string_view("ab\xffz", 4));
    } catch (const utf8_error& e) {
        CHECK(e.offset == 2);
    }
}

TEST_CASE("utf-8 fuzz: mixed-width edits stay valid and match a char32 oracle") {
    pool pl(1 << 21);
    std::mt19937_64 rng(23);
    auto rand_scalar = [&]() -> char32_t {
        static const char32_t pick[] = {U'a', U'Z', U'é', U'Ж', U'€',
                                        U'中', U'\U0001F600', U'\U00010348'};
        return pick[rng() % 8];
    };
    Utf8String s(pl);
    std::vector<char32_t> oracle;
    for (int op = 0; op < 4000; ++op) {
        switch (rng() % 5) {
        case 0:
        case 1: {
            char32_t c = rand_scalar();
            s.append_char(c);
            oracle.push_back(c);
            break;
        }
        case 2: {
            char32_t c = rand_scalar();
            s.push_front(c);
            oracle.insert(oracle.begin(), c);
            break;
        }
        case 3:
            if (!oracle.empty()) {
                std::uint64_t i = rng() % oracle.size();
                char32_t c = rand_scalar(); // width may grow or shrink
                s.set(i, c);
                oracle[i] = c;
            }
            break;
        case 4:
            if (!oracle.empty()) {
                std::uint64_t i = rng() % oracle.size();
                CHECK(s.get(i) == oracle[i]);
            }
            break;
        }
        if (op % 211 == 0)
            s.audit(); // includes UTF-8 validity of every leaf
    }
    s.audit();
    CHECK(s.size() == oracle.size());
    // byte round trip equals independently encoded oracle
    std::string expect;
    for (char32_t c : oracle) {
        std::byte buf[4];
        expect.append(reinterpret_cast<const char*>(buf), fpp::detail::utf8_encode(c, buf));
    }
    CHECK(s.to_bytes() == expect);
    Utf8String back = Utf8String::from_utf8(pl, expect);
    CHECK(back.to_bytes() == expect);
}

TEST_CASE("string append concatenates without copying content") {
    pool pl(1 << 18);
    Utf8String a = Utf8String::from_utf8(pl, std::string(3000, 'x'));
    Utf8String b = Utf8String::from_utf8(pl, std::string(3000, 'y'));
    auto base = pl.stats().allocations;
    Utf8String c = a.appended(b);
    auto delta = pl.stats().allocations - base;
    CHECK(delta <= 40); // a root-ward zipper of nodes, not 6000 bytes
    CHECK(c.size() == 6000);

    base = pl.stats().allocations;
    Utf8String d = a.appended(Utf8String(pl)); // s += "" is the identity
    CHECK(pl.stats().allocations == base);
    CHECK(d.to_bytes() == a.to_bytes());
}

TEST_CASE("upcasts share the root: zero allocations, reads intact") {
    pool pl(1 << 18);
    SortedSet s(pl);
    std::vector<std::uint64_t> keys(1000);
    std::iota(keys.begin(), keys.end(), 0);
    std::shuffle(keys.begin(), keys.end(), std::mt19937_64(5));
    for (auto k : keys)
        s.insert(k);

    auto base = pl.stats().allocations;
    Vector v = upcast_set_to_vector(s);
    CHECK(pl.stats().allocations == base); // exactly zero new nodes
    CHECK(v.size() == 1000);
    auto flat = v.flatten();
    CHECK(std::is_sorted(flat.begin(), flat.end()));
    for (std::uint64_t i = 0; i < 1000; ++i)
        CHECK(v.get(i) == i);
    v.audit();

    v.push_back(17); // writes follow vector semantics on a distinct value
    v.set(0, 42);
    CHECK(v.get(0) == 42);
    CHECK(s.contains(0)); // the set never noticed
    CHECK(s.size() == 1000);
    s.audit();

    SortedSet e(pl);
    CHECK(upcast_set_to_vector(e).size() == 0);

    Utf8String h = Utf8String::from_utf8(pl, "héllo");
    base = pl.stats().allocations;
    ByteVector bytes = upcast_string_to_byte_vector(h);
    CHECK(pl.stats().allocations == base);
    CHECK(bytes.size() == 6);
    std::string raw;
    for (std::uint64_t i = 0; i < bytes.size(); ++i)
        raw.push_back(static_cast<char>(bytes.get(i)));
    CHECK(raw == "héllo");
    bytes.audit();
}

TEST_CASE("iterator round trip through a container adopt") {
    pool pl(1 << 18);
    Vector v(pl);
    for (std::uint64_t i = 0; i < 200; ++i)
        v.push_back(i);
    auto it = v.iter_at(100);
    it.insert(5555);
    it.erase(); // removed 100
    v.adopt(it);
    CHECK(v.size() == 200);
    CHECK(v.get(100) == 5555);
    CHECK(v.get(101) == 101);
    v.audit();
}
