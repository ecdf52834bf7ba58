#pragma once

// Default for the in-place update optimization: when a node's reclamation
// count is exactly one, update paths may mutate it instead of copying.
// Override at build time with -DFPP_DESTRUCTIVE_UPDATE=0.
#ifndef FPP_DESTRUCTIVE_UPDATE
#define FPP_DESTRUCTIVE_UPDATE 1
#endif

namespace fpp::config {

inline thread_local bool destructive_update = (FPP_DESTRUCTIVE_UPDATE != 0);

// RAII toggle, used by the A/B test suites.
struct scoped_destructive_update {
    bool saved;
    explicit scoped_destructive_update(bool on) : saved(destructive_update) {
        destructive_update = on;
    }
    ~scoped_destructive_update() { destructive_update = saved; }
};

} // namespace fpp::config
