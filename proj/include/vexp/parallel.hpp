#pragma once

#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace vexp {

inline int hardware_workers() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

// Process-wide worker count for Monte Carlo chunk execution (CLI --threads).
// Results never depend on this value; only wall time does.
inline int& worker_count() {
    static int w = hardware_workers();
    return w;
}

// Fixed chunk size shared by all Monte Carlo loops.  It must not depend on
// the worker count: chunk boundaries define the RNG substreams, and changing
// them would change the sampled values.
inline constexpr std::size_t mc_chunk_size = 16384;

inline std::size_t num_chunks_for(std::size_t n) {
    return (n + mc_chunk_size - 1) / mc_chunk_size;
}

// Run body(chunk_index) for every chunk, possibly on several threads.
// Work-stealing order is nondeterministic, but each chunk writes only to
// state keyed by its own index, so callers get scheduling-independent
// results by folding per-chunk outputs in index order afterwards.
template <class Body>
void parallel_for_chunks(std::size_t num_chunks, Body&& body, int workers = worker_count()) {
    if (num_chunks == 0) return;
    const std::size_t nw =
        std::min<std::size_t>(static_cast<std::size_t>(workers > 1 ? workers : 1), num_chunks);
    if (nw <= 1) {
        for (std::size_t i = 0; i < num_chunks; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= num_chunks) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                next.store(num_chunks, std::memory_order_relaxed); // drain remaining work
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(nw);
    for (std::size_t t = 0; t < nw; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

// Streaming first/second-moment accumulator with deterministic merge.
struct MeanVar {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t n = 0;

    void add(double x) {
        sum += x;
        sum_sq += x * x;
        ++n;
    }
    void merge(const MeanVar& o) {
        sum += o.sum;
        sum_sq += o.sum_sq;
        n += o.n;
    }
    double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
    double variance() const { // sample variance, ddof = 1
        if (n < 2) return 0.0;
        const double m = mean();
        const double v = (sum_sq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
        return v > 0.0 ? v : 0.0;
    }
    double stderr_mean() const {
        return n ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
    }
};

} // namespace vexp
