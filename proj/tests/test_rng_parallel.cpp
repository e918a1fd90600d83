// Reproducible sampling streams and the scheduling-independent chunk runner.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "vexp/parallel.hpp"
#include "vexp/rng.hpp"

using Catch::Approx;
using namespace vexp;

namespace {
struct WorkerGuard {
    int saved = worker_count();
    ~WorkerGuard() { worker_count() = saved; }
};
} // namespace

TEST_CASE("substream derivation", "[rng-parallel]") {
    SECTION("pure function of (master, task, chunk)") {
        REQUIRE(derive_stream_seed(1, 2, 3) == derive_stream_seed(1, 2, 3));
        REQUIRE(derive_stream_seed(1, 2, 3) != derive_stream_seed(1, 2, 4));
        REQUIRE(derive_stream_seed(1, 2, 3) != derive_stream_seed(1, 3, 3));
        REQUIRE(derive_stream_seed(1, 2, 3) != derive_stream_seed(2, 2, 3));
        // task/chunk roles are not interchangeable
        REQUIRE(derive_stream_seed(1, 2, 3) != derive_stream_seed(1, 3, 2));
    }

    SECTION("identical streams replay identical draws") {
        RngStream a = substream(42, 7, 0);
        RngStream b = substream(42, 7, 0);
        for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());
        RngStream c = substream(42, 7, 0);
        RngStream d = substream(42, 7, 0);
        for (int i = 0; i < 100; ++i) REQUIRE(c.normal() == d.normal());
    }

    SECTION("no short-range collisions across a block of substreams") {
        std::vector<std::uint64_t> seen;
        for (std::uint64_t task = 0; task < 32; ++task)
            for (std::uint64_t chunk = 0; chunk < 32; ++chunk)
                seen.push_back(derive_stream_seed(20260814, task, chunk));
        std::sort(seen.begin(), seen.end());
        REQUIRE(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
    }
}

TEST_CASE("uniform and normal transforms", "[rng-parallel]") {
    RngStream rng = substream(9, 0, 0);
    SECTION("ranges") {
        for (int i = 0; i < 10000; ++i) {
            const double up = rng.uniform_pos();
            const double u = rng.uniform();
            REQUIRE(up > 0.0);
            REQUIRE(up <= 1.0);
            REQUIRE(u >= 0.0);
            REQUIRE(u < 1.0);
        }
    }
    SECTION("normal moments at Monte Carlo accuracy") {
        MeanVar acc;
        for (int i = 0; i < 200000; ++i) acc.add(rng.normal());
        REQUIRE(acc.mean() == Approx(0.0).margin(0.01));
        REQUIRE(acc.variance() == Approx(1.0).epsilon(0.02));
    }
    SECTION("fill_normal matches scalar draws from the same seed") {
        RngStream s1 = substream(3, 1, 2);
        RngStream s2 = substream(3, 1, 2);
        std::vector<double> block(7);
        s1.fill_normal(block);
        for (const double v : block) REQUIRE(v == s2.normal());
    }
}

TEST_CASE("chunk runner is scheduling independent", "[rng-parallel]") {
    WorkerGuard guard;

    SECTION("per-chunk outputs identical across worker counts") {
        const std::size_t chunks = 13;
        auto run = [&](int workers) {
            std::vector<double> out(chunks);
            parallel_for_chunks(
                chunks,
                [&](std::size_t ci) {
                    RngStream rng = substream(11, 4, ci);
                    MeanVar mv;
                    for (int i = 0; i < 2000; ++i) mv.add(rng.normal());
                    out[ci] = mv.mean();
                },
                workers);
            return out;
        };
        const auto serial = run(1);
        const auto par = run(4);
        REQUIRE(serial == par);
    }

    SECTION("worker_count is the process-wide default") {
        worker_count() = 3;
        REQUIRE(worker_count() == 3);
        std::vector<int> hits(5, 0);
        parallel_for_chunks(5, [&](std::size_t ci) { hits[ci] = 1; });
        REQUIRE(std::accumulate(hits.begin(), hits.end(), 0) == 5);
    }

    SECTION("exceptions from chunks propagate") {
        auto boom = [](std::size_t ci) {
            if (ci == 2) throw std::runtime_error("chunk failure");
        };
        REQUIRE_THROWS_AS(parallel_for_chunks(8, boom, 4), std::runtime_error);
        REQUIRE_THROWS_AS(parallel_for_chunks(8, boom, 1), std::runtime_error);
    }

    SECTION("chunk count covers the sample budget") {
        REQUIRE(num_chunks_for(1) == 1);
        REQUIRE(num_chunks_for(mc_chunk_size) == 1);
        REQUIRE(num_chunks_for(mc_chunk_size + 1) == 2);
        REQUIRE(num_chunks_for(10 * mc_chunk_size) == 10);
    }
}

TEST_CASE("moment accumulator", "[rng-parallel]") {
    SECTION("merge equals one-shot accumulation") {
        MeanVar whole, left, right;
        for (int i = 1; i <= 10; ++i) {
            const double x = 0.37 * i * i - 1.5 * i;
            whole.add(x);
            (i <= 4 ? left : right).add(x);
        }
        left.merge(right);
        REQUIRE(left.n == whole.n);
        REQUIRE(left.mean() == Approx(whole.mean()).epsilon(1e-15));
        REQUIRE(left.variance() == Approx(whole.variance()).epsilon(1e-13));
    }

    SECTION("known small-sample values") {
        MeanVar mv;
        for (const double x : {1.0, 2.0, 3.0, 4.0}) mv.add(x);
        REQUIRE(mv.mean() == 2.5);
        REQUIRE(mv.variance() == Approx(5.0 / 3.0).epsilon(1e-14));
        REQUIRE(mv.stderr_mean() == Approx(std::sqrt(5.0 / 12.0)).epsilon(1e-14));
    }

    SECTION("degenerate sizes") {
        MeanVar mv;
        REQUIRE(mv.mean() == 0.0);
        REQUIRE(mv.stderr_mean() == 0.0);
        mv.add(2.0);
        REQUIRE(mv.variance() == 0.0);
    }
}
