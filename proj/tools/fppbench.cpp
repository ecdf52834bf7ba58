// fppbench: micro-benchmark CSV emitter and worked-example verifier for the
// fpp persistent containers.
//
// Bench mode writes one CSV per (bench, container) pair:
//   Size,fpp_<container>,baseline_array
// Cells are median per-operation nanoseconds over --reps runs (one extra
// warm-up run is discarded), except: `concat` rows report the total time of
// one ten-way concatenation chain, and `memory` rows report live bytes.
// The baseline column is a mutable flat array (std::vector; kept sorted for
// set/map).
//
// Exit codes: 0 success, 1 verification failure, 2 usage error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fpp/bench.hpp"
#include "fpp/examples.hpp"

namespace {

int fail(const std::string& what) {
    std::cerr << "FAIL: " << what << "\n";
    return 1;
}

std::u32string to_u32(const fpp::Utf8String& s) {
    std::u32string out;
    for (std::uint64_t i = 0; i < s.size(); ++i)
        out.push_back(s.get(i));
    return out;
}

char32_t random_scalar(std::mt19937_64& rng, bool ascii_only) {
    static const char32_t pool[] = {U'a', U'Z', U'0', U' ', U'\n', 0xE9,   0x3B1,
                                    0x4E2D, 0x1F600, 0x10FFFF, 0x7E, 0x7F, 0x80};
    if (ascii_only)
        return pool[rng() % 5];
    return pool[rng() % (sizeof(pool) / sizeof(pool[0]))];
}

int run_examples(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    fpp::pool pl(1u << 22);
    using namespace fpp;
    using namespace fpp::examples;

    // 1. filter_ascii against a plain code-point filter, mixed-width corpora.
    for (int rep = 0; rep < 20; ++rep) {
        std::uint64_t len = rng() % 2000;
        Utf8String s(pl);
        std::u32string oracle;
        for (std::uint64_t i = 0; i < len; ++i) {
            char32_t c = random_scalar(rng, false);
            s.append_char(c);
            if (c < 0x7F)
                oracle.push_back(c);
        }
        Utf8String got = filter_ascii(s);
        if (to_u32(got) != oracle)
            return fail("filter_ascii mismatch vs code-point oracle");
        if (to_u32(s).size() != len)
            return fail("filter_ascii mutated its input");
    }

    // Sharing: filtering an all-ASCII string must reuse it nearly whole.
    {
        Utf8String s(pl);
        for (int i = 0; i < 10000; ++i)
            s.append_char(random_scalar(rng, true));
        std::uint64_t before = pl.stats().live;
        Utf8String out = filter_ascii(s);
        std::uint64_t after = pl.stats().live;
        if (to_u32(out) != to_u32(s))
            return fail("filter_ascii changed an all-ASCII string");
        if (after - before > 64)
            return fail("filter_ascii of ASCII input allocated " +
                        std::to_string(after - before) + " nodes; expected O(log n)");
    }

    // 2. filter_reachable against a straightforward two-pass oracle.
    for (int rep = 0; rep < 20; ++rep) {
        std::uint64_t len = rng() % 2000;
        Vector prog(pl);
        std::vector<std::uint64_t> src;
        for (std::uint64_t i = 0; i < len; ++i) {
            auto k = static_cast<stmt_kind>(rng() % 3);
            std::uint64_t s = make_stmt(k, rng() % 1000);
            prog.push_back(s);
            src.push_back(s);
        }
        std::vector<std::uint64_t> oracle;
        bool reach = true;
        for (std::uint64_t s : src) {
            if (is_label(s))
                reach = true;
            if (reach)
                oracle.push_back(s);
            if (reach && is_goto(s))
                reach = false;
        }
        if (filter_reachable(prog).flatten() != oracle)
            return fail("filter_reachable mismatch vs oracle");
        if (prog.flatten() != src)
            return fail("filter_reachable mutated its input");
    }

    // 3. Editor vs a naive full-copy editor; commits allocate nothing.
    for (int rep = 0; rep < 10; ++rep) {
        Editor ed(pl);
        std::u32string buf;
        std::size_t cur = 0;
        std::vector<std::pair<std::u32string, std::size_t>> undo, redo;
        for (int step = 0; step < 600; ++step) {
            switch (rng() % 6) {
            case 0:
            case 1: {
                char32_t c = random_scalar(rng, false);
                undo.push_back({buf, cur});
                redo.clear();
                buf.insert(buf.begin() + static_cast<std::ptrdiff_t>(cur), c);
                ++cur;
                ed.insert(c);
                break;
            }
            case 2:
                if (cur > 0) {
                    undo.push_back({buf, cur});
                    redo.clear();
                    buf.erase(buf.begin() + static_cast<std::ptrdiff_t>(cur) - 1);
                    --cur;
                }
                ed.backspace();
                break;
            case 3:
                if (cur > 0)
                    --cur;
                ed.left();
                break;
            case 4:
                if (cur < buf.size())
                    ++cur;
                ed.right();
                break;
            case 5:
                if (rng() % 2) {
                    if (!undo.empty()) {
                        redo.push_back({buf, cur});
                        std::tie(buf, cur) = undo.back();
                        undo.pop_back();
                    }
                    ed.undo();
                } else {
                    if (!redo.empty()) {
                        undo.push_back({buf, cur});
                        std::tie(buf, cur) = redo.back();
                        redo.pop_back();
                    }
                    ed.redo();
                }
                break;
            }
            if (ed.position() != cur)
                return fail("editor cursor position diverged from oracle");
        }
        if (to_u32(ed.text()) != buf)
            return fail("editor buffer diverged from full-copy oracle");
    }

    // A commit is one iterator copy: zero pool allocations.
    {
        Editor ed(pl);
        for (char32_t c : U"hello world")
            if (c)
                ed.insert(c);
        std::uint64_t before = pl.stats().allocations;
        ed.commit();
        if (pl.stats().allocations != before)
            return fail("editor commit allocated pool nodes");
        // and undo/redo restore content exactly
        Editor e2(pl);
        e2.insert(U'a');
        e2.insert(U'b');
        e2.undo();
        if (to_u32(e2.text()) != U"a")
            return fail("editor undo mismatch");
        e2.redo();
        if (to_u32(e2.text()) != U"ab" || e2.position() != 2)
            return fail("editor redo mismatch");
    }

    std::cout << "examples: all checks passed (seed " << seed << ")\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "fpp benchmark driver.\n"
        "CSV cells are median per-op nanoseconds (concat: total ns for a ten-way\n"
        "concat chain; memory: live bytes). Column layout: Size,fpp_<container>,\n"
        "baseline_array, where the baseline is a mutable flat array."};
    app.require_subcommand(0, 1);

    std::string bench, container = "vector", alloc = "pool", out_path;
    std::vector<std::uint64_t> sizes = {1000, 10000, 100000, 1000000};
    int reps = 3;
    app.add_option("--bench", bench, "Benchmark: " + [] {
        std::string s;
        for (const auto& b : fpp::bench::bench_names)
            s += (s.empty() ? "" : "|") + b;
        return s;
    }());
    app.add_option("--container", container, "Container: vector|set|map|string");
    app.add_option("--sizes", sizes, "Element counts to measure")->delimiter(',');
    app.add_option("--reps", reps, "Timed repetitions per cell (median taken)")
        ->check(CLI::PositiveNumber);
    app.add_option("--alloc", alloc, "Allocator backend: pool|system (also FPP_ALLOC env)")
        ->check(CLI::IsMember({"pool", "system"}));
    app.add_option("--out", out_path, "CSV output file (default: stdout)");

    std::uint64_t seed = 42;
    CLI::App* ex = app.add_subcommand("examples", "Verify the worked examples against oracles");
    ex->add_option("--seed", seed, "PRNG seed for the generated corpora");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (ex->parsed())
        return run_examples(seed);

    if (bench.empty()) {
        std::cerr << "error: --bench is required (or use the `examples` subcommand)\n";
        return 2;
    }
    if (!fpp::bench::supported(bench, container)) {
        std::cerr << "error: unsupported bench/container pair: " << bench << "/" << container
                  << "\nsupported pairs:\n"
                  << fpp::bench::supported_pairs();
        return 2;
    }
    fpp::alloc_backend backend =
        alloc == "system" ? fpp::alloc_backend::system : fpp::alloc_backend::pool;
    if (const char* env = std::getenv("FPP_ALLOC"); env && app.count("--alloc") == 0)
        backend = std::string(env) == "system" ? fpp::alloc_backend::system
                                               : fpp::alloc_backend::pool;

    std::ostringstream csv;
    csv << fpp::bench::csv_header(container) << "\n";
    for (std::uint64_t n : sizes) {
        auto c = fpp::bench::run_cell(bench, container, n, reps, backend);
        csv << n << "," << c.fpp << "," << c.baseline << "\n";
    }
    if (out_path.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream f(out_path);
        if (!f) {
            std::cerr << "error: cannot open " << out_path << "\n";
            return 1;
        }
        f << csv.str();
        std::cout << "wrote " << out_path << "\n";
    }
    return 0;
}
