#pragma once

#include <stdexcept>
#include <string>

namespace fpp {

// Pool capacity exhausted (the region is bounded; the caller decides policy).
struct pool_exhausted : std::bad_alloc {
    const char* what() const noexcept override { return "fpp: pool capacity exhausted"; }
};

// Out-of-range index, position, or key-rank.
struct range_error : std::out_of_range {
    explicit range_error(const std::string& msg) : std::out_of_range("fpp: " + msg) {}
};

// Precondition violated (double free, deref at end, cross-lineage compare, ...).
struct contract_error : std::logic_error {
    explicit contract_error(const std::string& msg) : std::logic_error("fpp: " + msg) {}
};

// Invalid UTF-8 input; `offset` is the byte offset of the first bad byte.
struct utf8_error : std::runtime_error {
    std::size_t offset;
    explicit utf8_error(std::size_t off)
        : std::runtime_error("fpp: invalid UTF-8 at byte " + std::to_string(off)), offset(off) {}
};

struct not_found : std::runtime_error {
    explicit not_found(const std::string& msg = "not found")
        : std::runtime_error("fpp: " + msg) {}
};

} // namespace fpp
