#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "fpp/containers.hpp"

// Benchmark core shared by the CLI and the acceptance suite.
//
// Cell semantics: per-op nanoseconds for element-wise benchmarks, total
// nanoseconds for concat (one concat chain is a single operation at scale n),
// live bytes for memory. Time cells are clamped to >= 1ns.

namespace fpp::bench {

// Keeps summing loops observable so the optimizer can't delete them.
inline void keep(std::uint64_t v) { asm volatile("" : : "r"(v) : "memory"); }

inline const std::vector<std::string> bench_names = {
    "access", "append", "update", "concat", "erase",
    "access_it", "append_it", "update_it", "erase_it", "memory"};
inline const std::vector<std::string> container_names = {"vector", "set", "map", "string"};

inline bool supported(const std::string& bench, const std::string& cont) {
    auto in = [&](std::initializer_list<const char*> l) {
        return std::find(l.begin(), l.end(), bench) != l.end();
    };
    if (cont == "vector")
        return in({"access", "append", "update", "concat", "erase", "access_it", "append_it",
                   "update_it", "erase_it", "memory"});
    if (cont == "set" || cont == "map")
        return in({"access", "append", "erase", "access_it", "erase_it", "memory"});
    if (cont == "string")
        return in({"access", "append", "update", "concat", "access_it", "append_it",
                   "update_it", "erase_it", "memory"});
    return false;
}

inline std::string supported_pairs() {
    std::string out;
    for (const auto& c : container_names) {
        out += "  " + c + ":";
        for (const auto& b : bench_names)
            if (supported(b, c))
                out += " " + b;
        out += "\n";
    }
    return out;
}

template <class F>
std::uint64_t time_ns(F&& f) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    auto t1 = std::chrono::steady_clock::now();
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
}

namespace detail_bench {

inline std::uint64_t per_op(std::uint64_t total, std::uint64_t n) {
    std::uint64_t v = total / (n ? n : 1);
    return v ? v : 1;
}

inline Vector build_vector(pool& pl, std::uint64_t n) {
    Vector v(pl);
    for (std::uint64_t i = 0; i < n; ++i)
        v.push_back(i);
    return v;
}

inline SortedSet build_set(pool& pl, std::uint64_t n) {
    SortedSet s(pl);
    for (std::uint64_t i = 0; i < n; ++i)
        s.insert(i);
    return s;
}

inline SortedMap build_map(pool& pl, std::uint64_t n) {
    SortedMap m(pl);
    for (std::uint64_t i = 0; i < n; ++i)
        m.insert(i, i);
    return m;
}

inline Utf8String build_string(pool& pl, std::uint64_t n) {
    Utf8String s(pl);
    for (std::uint64_t i = 0; i < n; ++i)
        s.append_char(static_cast<char32_t>(U'a' + i % 26));
    return s;
}

// ---- persistent-container cells -------------------------------------------

inline std::uint64_t run_fpp_vector(const std::string& b, std::uint64_t n, pool& pl) {
    if (b == "append")
        return per_op(time_ns([&] { keep(build_vector(pl, n).size()); }), n);
    if (b == "append_it")
        return per_op(time_ns([&] {
                          Vector v(pl);
                          auto it = v.end();
                          for (std::uint64_t i = 0; i < n; ++i)
                              it.insert(i);
                          keep(it.count());
                      }),
                      n);
    if (b == "concat") {
        std::vector<Vector> parts;
        for (int i = 0; i < 10; ++i)
            parts.push_back(build_vector(pl, n / 10));
        return std::max<std::uint64_t>(1, time_ns([&] {
                                           Vector all(pl);
                                           for (auto& p : parts)
                                               all.concat(p);
                                           keep(all.size());
                                       }));
    }
    Vector v = build_vector(pl, n);
    if (b == "memory")
        return pl.stats().live * slot_size;
    if (b == "access")
        return per_op(time_ns([&] {
                          std::uint64_t s = 0;
                          for (std::uint64_t i = 0; i < n; ++i)
                              s += v.get(i);
                          keep(s);
                      }),
                      n);
    if (b == "update")
        return per_op(time_ns([&] {
                          for (std::uint64_t i = 0; i < n; ++i)
                              v.set(i, i + 1);
                      }),
                      n);
    if (b == "erase")
        return per_op(time_ns([&] {
                          for (std::uint64_t i = 0; i < n; ++i)
                              keep(v.pop_back());
                      }),
                      n);
    if (b == "access_it")
        return per_op(time_ns([&] {
                          std::uint64_t s = 0;
                          for (auto it = v.begin(); !it.at_end(); ++it)
                              s += *it;
                          keep(s);
                      }),
                      n);
    if (b == "update_it")
        return per_op(time_ns([&] {
                          auto it = v.begin();
                          while (!it.at_end()) {
                              it.assign(*it + 1);
                              ++it;
                          }
                          v.adopt(it);
                      }),
                      n);
    // erase_it
    return per_op(time_ns([&] {
                      auto it = v.begin();
                      while (!it.at_end())
                          it.erase();
                      v.adopt(it);
                  }),
                  n);
}

inline std::uint64_t key_of(std::uint64_t k) { return k; }
inline std::uint64_t key_of(kv_pair p) { return p.key; }

template <class S>
std::uint64_t run_fpp_sorted(const std::string& b, std::uint64_t n, pool& pl, S (*build)(pool&, std::uint64_t)) {
    if (b == "append")
        return per_op(time_ns([&] { keep(build(pl, n).size()); }), n);
    S s = build(pl, n);
    if (b == "memory")
        return pl.stats().live * slot_size;
    if (b == "access")
        return per_op(time_ns([&] {
                          std::uint64_t acc = 0;
                          for (std::uint64_t i = 0; i < n; ++i)
                              acc += key_of(s.get_by_rank(i));
                          keep(acc);
                      }),
                      n);
    if (b == "access_it")
        return per_op(time_ns([&] {
                          std::uint64_t acc = 0;
                          for (auto it = s.begin(); !it.at_end(); ++it)
                              acc += key_of(*it);
                          keep(acc);
                      }),
                      n);
    if (b == "erase") // decreasing keys so the array baseline stays honest
        return per_op(time_ns([&] {
                          for (std::uint64_t i = n; i-- > 0;)
                              s.erase(i);
                      }),
                      n);
    // erase_it
    return per_op(time_ns([&] {
                      auto it = s.begin();
                      while (!it.at_end())
                          it.erase();
                  }),
                  n);
}

inline std::uint64_t run_fpp_string(const std::string& b, std::uint64_t n, pool& pl) {
    if (b == "append")
        return per_op(time_ns([&] { keep(build_string(pl, n).size()); }), n);
    if (b == "append_it")
        return per_op(time_ns([&] {
                          Utf8String s(pl);
                          auto it = s.end();
                          for (std::uint64_t i = 0; i < n; ++i)
                              it.insert(static_cast<char32_t>(U'a' + i % 26));
                          keep(it.count());
                      }),
                      n);
    if (b == "concat") {
        std::vector<Utf8String> parts;
        for (int i = 0; i < 10; ++i)
            parts.push_back(build_string(pl, n / 10));
        return std::max<std::uint64_t>(1, time_ns([&] {
                                           Utf8String all(pl);
                                           for (auto& p : parts)
                                               all.append(p);
                                           keep(all.size());
                                       }));
    }
    Utf8String s = build_string(pl, n);
    if (b == "memory")
        return pl.stats().live * slot_size;
    if (b == "access")
        return per_op(time_ns([&] {
                          std::uint64_t acc = 0;
                          for (std::uint64_t i = 0; i < n; ++i)
                              acc += s.get(i);
                          keep(acc);
                      }),
                      n);
    if (b == "update")
        return per_op(time_ns([&] {
                          for (std::uint64_t i = 0; i < n; ++i)
                              s.set(i, static_cast<char32_t>(U'a' + (i + 1) % 26));
                      }),
                      n);
    if (b == "access_it")
        return per_op(time_ns([&] {
                          std::uint64_t acc = 0;
                          for (auto it = s.begin(); !it.at_end(); ++it)
                              acc += *it;
                          keep(acc);
                      }),
                      n);
    if (b == "update_it")
        return per_op(time_ns([&] {
                          auto it = s.begin();
                          while (!it.at_end()) {
                              it.assign(static_cast<char32_t>(U'a' + (*it + 1) % 26));
                              ++it;
                          }
                          s.adopt(it);
                      }),
                      n);
    // erase_it
    return per_op(time_ns([&] {
                      auto it = s.begin();
                      while (!it.at_end())
                          it.erase();
                  }),
                  n);
}

// ---- mutable-array baseline cells ------------------------------------------

inline std::uint64_t run_baseline(const std::string& b, const std::string& cont,
                                  std::uint64_t n) {
    if (b == "memory") // contiguous elements: 8 bytes each (16 for kv pairs)
        return n * (cont == "map" ? 16 : cont == "string" ? 1 : 8);

    if (cont == "set" || cont == "map") { // naive sorted array
        auto build = [&] {
            std::vector<std::uint64_t> a;
            for (std::uint64_t i = 0; i < n; ++i)
                a.insert(std::lower_bound(a.begin(), a.end(), i), i);
            return a;
        };
        if (b == "append")
            return per_op(time_ns([&] { keep(build().size()); }), n);
        std::vector<std::uint64_t> a = build();
        if (b == "access" || b == "access_it")
            return per_op(time_ns([&] {
                              std::uint64_t s = 0;
                              for (auto v : a)
                                  s += v;
                              keep(s);
                          }),
                          n);
        // erase / erase_it: decreasing keys, matching the tree run
        return per_op(time_ns([&] {
                          for (std::uint64_t i = n; i-- > 0;)
                              a.erase(std::lower_bound(a.begin(), a.end(), i));
                      }),
                      n);
    }

    // vector and string share the flat-array baseline
    auto mk = [&](std::uint64_t i) {
        return cont == "string" ? (U'a' + i % 26) : i;
    };
    if (b == "append" || b == "append_it")
        return per_op(time_ns([&] {
                          std::vector<std::uint64_t> a;
                          for (std::uint64_t i = 0; i < n; ++i)
                              a.push_back(mk(i));
                          keep(a.size());
                      }),
                      n);
    if (b == "concat") {
        std::vector<std::vector<std::uint64_t>> parts(10);
        for (auto& p : parts)
            for (std::uint64_t i = 0; i < n / 10; ++i)
                p.push_back(mk(i));
        return std::max<std::uint64_t>(1, time_ns([&] {
                                           std::vector<std::uint64_t> all;
                                           for (auto& p : parts)
                                               all.insert(all.end(), p.begin(), p.end());
                                           keep(all.size());
                                       }));
    }
    std::vector<std::uint64_t> a;
    for (std::uint64_t i = 0; i < n; ++i)
        a.push_back(mk(i));
    if (b == "access" || b == "access_it")
        return per_op(time_ns([&] {
                          std::uint64_t s = 0;
                          for (auto v : a)
                              s += v;
                          keep(s);
                      }),
                      n);
    if (b == "update" || b == "update_it")
        return per_op(time_ns([&] {
                          for (std::uint64_t i = 0; i < n; ++i)
                              a[i] = mk(i + 1);
                      }),
                      n);
    // erase / erase_it: element-by-element from the cheap end
    return per_op(time_ns([&] {
                      while (!a.empty())
                          a.pop_back();
                  }),
                  n);
}

} // namespace detail_bench

struct cell {
    std::uint64_t fpp = 0;
    std::uint64_t baseline = 0;
};

// One CSV cell pair: median over `reps` measurements after a discarded
// warm-up, each on a fresh pool.
inline cell run_cell(const std::string& bench, const std::string& cont, std::uint64_t n,
                     int reps, alloc_backend backend) {
    using namespace detail_bench;
    auto one_fpp = [&] {
        pool_options o;
        o.backend = backend;
        pool pl(4 * n + (1u << 20), o);
        if (cont == "vector")
            return run_fpp_vector(bench, n, pl);
        if (cont == "set")
            return run_fpp_sorted<SortedSet>(bench, n, pl, &build_set);
        if (cont == "map")
            return run_fpp_sorted<SortedMap>(bench, n, pl, &build_map);
        return run_fpp_string(bench, n, pl);
    };
    std::vector<std::uint64_t> fs, bs;
    for (int r = 0; r <= reps; ++r) {
        std::uint64_t f = one_fpp();
        std::uint64_t b = run_baseline(bench, cont, n);
        if (r == 0)
            continue; // warm-up: first-touch page commits distort it
        fs.push_back(f);
        bs.push_back(b);
    }
    auto median = [](std::vector<std::uint64_t>& v) {
        std::sort(v.begin(), v.end());
        return v[v.size() / 2];
    };
    return {median(fs), median(bs)};
}

inline std::string csv_header(const std::string& cont) {
    return "Size,fpp_" + cont + ",baseline_array";
}

} // namespace fpp::bench
