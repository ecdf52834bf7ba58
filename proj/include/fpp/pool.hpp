#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <unordered_set>
#include <vector>

#include <sys/mman.h>

#include "fpp/error.hpp"

namespace fpp {

inline constexpr std::size_t slot_size = 64;

// Which allocator backs a pool. `pool_backend` is the free-list arena; `system`
// routes every slot through the host allocator behind the same interface
// (selectable via the FPP_ALLOC environment variable).
enum class alloc_backend : std::uint8_t { pool, system };

enum class pool_threading : std::uint8_t { confined, concurrent };

struct pool_stats {
    std::uint64_t allocations = 0;
    std::uint64_t deallocations = 0;
    std::uint64_t live = 0;
    std::uint64_t peak_live = 0;
};

struct pool_options {
    alloc_backend backend = alloc_backend::pool;
    pool_threading threading = pool_threading::confined;
    bool debug_checks = false; // track liveness, detect double free / foreign slots

    static pool_options from_env() {
        pool_options o;
        if (const char* v = std::getenv("FPP_ALLOC"); v && std::strcmp(v, "system") == 0)
            o.backend = alloc_backend::system;
        return o;
    }
};

// Fixed-size slot arena. All slots are 64 bytes, 64-byte aligned. Free slots
// form an intrusive list encoded as a signed 8-byte delta stored at the start
// of the slot: next = slot + 64 + delta. A zero-filled region is therefore
// already a valid free list in ascending address order, so no initialization
// pass is needed; the region is acquired zeroed and lazily committed via mmap.
class pool {
  public:
    explicit pool(std::size_t capacity, pool_options opts = {})
        : opts_(opts), capacity_(capacity) {
        if (capacity == 0)
            throw contract_error("pool capacity must be positive");
        if (opts_.backend == alloc_backend::pool) {
            std::size_t bytes = capacity * slot_size;
            void* p = ::mmap(nullptr, bytes, PROT_READ | PROT_WRITE,
                             MAP_PRIVATE | MAP_ANONYMOUS | MAP_NORESERVE, -1, 0);
            if (p == MAP_FAILED)
                throw std::bad_alloc();
            base_ = static_cast<std::byte*>(p);
            end_ = base_ + bytes;
            head_ = base_;
            if (opts_.debug_checks)
                live_bits_.assign(capacity, false);
        }
    }

    ~pool() {
        if (base_)
            ::munmap(base_, capacity_ * slot_size);
    }

    pool(const pool&) = delete;
    pool& operator=(const pool&) = delete;

    void* alloc() {
        void* p;
        if (opts_.backend == alloc_backend::system) {
            p = std::aligned_alloc(slot_size, slot_size);
            if (!p)
                throw std::bad_alloc();
        } else if (opts_.threading == pool_threading::concurrent) {
            p = alloc_concurrent();
        } else {
            if (head_ == end_)
                throw pool_exhausted();
            std::byte* h = head_;
            head_ = h + slot_size + read_delta(h);
            p = h;
        }
        note_alloc(p);
        return p;
    }

    void dealloc(void* slot) {
        note_dealloc(slot);
        if (opts_.backend == alloc_backend::system) {
            std::free(slot);
            return;
        }
        auto* s = static_cast<std::byte*>(slot);
        if (opts_.threading == pool_threading::concurrent) {
            dealloc_concurrent(s);
        } else {
            write_delta(s, head_ - (s + slot_size));
            head_ = s;
        }
    }

    pool_stats stats() const {
        pool_stats s;
        s.allocations = allocations_.load(std::memory_order_relaxed);
        s.deallocations = deallocations_.load(std::memory_order_relaxed);
        s.live = s.allocations - s.deallocations;
        s.peak_live = peak_live_.load(std::memory_order_relaxed);
        return s;
    }

    std::size_t capacity() const { return capacity_; }
    alloc_backend backend() const { return opts_.backend; }
    pool_threading threading() const { return opts_.threading; }

    // Debug inspection: the raw signed delta stored in a (free) slot.
    std::int64_t raw_delta(const void* slot) const {
        return read_delta(static_cast<const std::byte*>(slot));
    }

    const std::byte* base() const { return base_; }

    bool debug_is_live(const void* slot) const {
        if (!opts_.debug_checks)
            throw contract_error("pool built without debug_checks");
        if (opts_.backend == alloc_backend::system)
            return live_set_.count(slot) != 0;
        return live_bits_[slot_index(slot)];
    }

  private:
    static std::int64_t read_delta(const std::byte* p) {
        std::int64_t d;
        std::memcpy(&d, p, sizeof d);
        return d;
    }
    static void write_delta(std::byte* p, std::int64_t d) { std::memcpy(p, &d, sizeof d); }

    void* alloc_concurrent() {
        std::atomic_ref<std::byte*> head(head_);
        std::byte* h = head.load(std::memory_order_acquire);
        for (;;) {
            if (h == end_)
                throw pool_exhausted();
            std::byte* next = h + slot_size + read_delta(h);
            if (head.compare_exchange_weak(h, next, std::memory_order_acq_rel))
                return h;
        }
    }

    void dealloc_concurrent(std::byte* s) {
        std::atomic_ref<std::byte*> head(head_);
        std::byte* h = head.load(std::memory_order_acquire);
        do {
            write_delta(s, h - (s + slot_size));
        } while (!head.compare_exchange_weak(h, s, std::memory_order_acq_rel));
    }

    std::size_t slot_index(const void* slot) const {
        auto* s = static_cast<const std::byte*>(slot);
        if (s < base_ || s >= end_ || (s - base_) % slot_size != 0)
            throw contract_error("slot does not belong to this pool");
        return static_cast<std::size_t>(s - base_) / slot_size;
    }

    void note_alloc(void* p) {
        std::uint64_t live =
            allocations_.fetch_add(1, std::memory_order_relaxed) + 1 -
            deallocations_.load(std::memory_order_relaxed);
        std::uint64_t peak = peak_live_.load(std::memory_order_relaxed);
        while (live > peak &&
               !peak_live_.compare_exchange_weak(peak, live, std::memory_order_relaxed)) {
        }
        if (opts_.debug_checks) {
            if (opts_.backend == alloc_backend::system)
                live_set_.insert(p);
            else
                live_bits_[slot_index(p)] = true;
        }
    }

    void note_dealloc(void* p) {
        if (opts_.debug_checks) {
            if (opts_.backend == alloc_backend::system) {
                if (live_set_.erase(p) == 0)
                    throw contract_error("double free or foreign slot");
            } else {
                std::size_t i = slot_index(p);
                if (!live_bits_[i])
                    throw contract_error("double free");
                live_bits_[i] = false;
            }
        }
        deallocations_.fetch_add(1, std::memory_order_relaxed);
    }

    pool_options opts_;
    std::size_t capacity_;
    std::byte* base_ = nullptr;
    std::byte* end_ = nullptr;
    alignas(8) std::byte* head_ = nullptr;

    std::atomic<std::uint64_t> allocations_{0};
    std::atomic<std::uint64_t> deallocations_{0};
    std::atomic<std::uint64_t> peak_live_{0};

    std::vector<bool> live_bits_;          // debug_checks, pool backend
    std::unordered_set<const void*> live_set_; // debug_checks, system backend
};

} // namespace fpp
