#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace cforge {

class error : public std::runtime_error {
  public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw error(msg);
}

/// Worker cap for verification sweeps.  COCYCLE_FORGE_THREADS overrides the
/// hardware default; results never depend on the thread count.
inline unsigned thread_limit() {
    static const unsigned cached = [] {
        if (const char* s = std::getenv("COCYCLE_FORGE_THREADS")) {
            long v = std::strtol(s, nullptr, 10);
            if (v >= 1) return static_cast<unsigned>(v);
        }
        unsigned hw = std::thread::hardware_concurrency();
        return hw ? hw : 1u;
    }();
    return cached;
}

/// Evaluates pred(i) for all i in [0, n); true iff every call is true.
/// Slices are contiguous and the aggregation is a plain AND, so the result
/// is identical for any worker count.
template <class Pred>
bool all_of_n(uint64_t n, Pred&& pred) {
    unsigned workers = thread_limit();
    if (workers <= 1 || n < 1u << 16) {
        for (uint64_t i = 0; i < n; ++i)
            if (!pred(i)) return false;
        return true;
    }
    if (workers > n) workers = static_cast<unsigned>(n);
    std::atomic<bool> ok{true};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    uint64_t chunk = n / workers, extra = n % workers, lo = 0;
    for (unsigned w = 0; w < workers; ++w) {
        uint64_t hi = lo + chunk + (w < extra ? 1 : 0);
        pool.emplace_back([&, lo, hi] {
            for (uint64_t i = lo; i < hi; ++i) {
                if (!ok.load(std::memory_order_relaxed)) return;
                if (!pred(i)) {
                    ok.store(false, std::memory_order_relaxed);
                    return;
                }
            }
        });
        lo = hi;
    }
    for (auto& t : pool) t.join();
    return ok.load();
}

/// splitmix64: deterministic cross-platform stream for sampled checks.
struct SplitMix64 {
    uint64_t state;
    explicit SplitMix64(uint64_t seed) : state(seed) {}
    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    uint64_t below(uint64_t bound) { return next() % bound; }
};

}  // namespace cforge
