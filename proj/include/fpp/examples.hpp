#pragma once

#include <cstdint>
#include <vector>

#include "fpp/containers.hpp"

// Worked example programs: a linear-scan character filter, a stateful
// reachability filter, and a snapshot text editor whose undo/redo history is
// a vector of O(1) cursor copies.

namespace fpp::examples {

// Drops every non-ASCII scalar. The loop runs on an iterator-local version;
// the input string is untouched and the result shares its ASCII runs.
inline Utf8String filter_ascii(const Utf8String& s) {
    auto i = s.begin();
    while (!i.at_end()) {
        if (*i >= 0x7F)
            i.erase();
        else
            ++i;
    }
    return Utf8String(i.value());
}

// Statements for the reachability filter, packed into uint64 payloads.
enum class stmt_kind : std::uint64_t { plain = 0, label = 1, jump = 2 };

inline std::uint64_t make_stmt(stmt_kind k, std::uint64_t payload) {
    return payload * 4 + static_cast<std::uint64_t>(k);
}
inline bool is_label(std::uint64_t s) { return s % 4 == 1; }
inline bool is_goto(std::uint64_t s) { return s % 4 == 2; }

// Keeps only statements reachable by straight-line flow: a goto kills flow
// until the next label revives it.
inline Vector filter_reachable(const Vector& stmts) {
    bool reach = true;
    auto it = stmts.begin();
    while (!it.at_end()) {
        if (is_label(*it))
            reach = true;
        if (reach) {
            if (is_goto(*it))
                reach = false;
            ++it;
        } else {
            it.erase();
        }
    }
    return Vector(it.value());
}

// Text editor whose cursor IS a persistent iterator: committing a snapshot is
// one iterator copy — no tree nodes are allocated.
struct Editor {
    using Cursor = Utf8String::iter;

    explicit Editor(pool& pl) : cursor(Utf8String(pl).end()) {}

    Cursor cursor;
    struct {
        std::vector<Cursor> undo, redo;
    } history;

    void commit() {
        history.undo.push_back(cursor);
        history.redo.clear();
    }
    void insert(char32_t c) {
        commit();
        cursor.insert(c);
    }
    void backspace() {
        if (cursor.position() == 0)
            return;
        commit();
        --cursor;
        cursor.erase();
    }
    void left() {
        if (cursor.position() > 0)
            --cursor;
    }
    void right() {
        if (!cursor.at_end())
            ++cursor;
    }
    void undo() {
        if (history.undo.empty())
            return;
        history.redo.push_back(cursor);
        cursor = std::move(history.undo.back());
        history.undo.pop_back();
    }
    void redo() {
        if (history.redo.empty())
            return;
        history.undo.push_back(cursor);
        cursor = std::move(history.redo.back());
        history.redo.pop_back();
    }

    Utf8String text() const { return Utf8String(cursor.value()); }
    std::uint64_t position() const { return cursor.position(); }
};

} // namespace fpp::examples
