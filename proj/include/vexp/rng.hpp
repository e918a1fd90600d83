#pragma once

#include <cmath>
#include <cstdint>
#include <span>

namespace vexp {

// Output function of splitmix64; also used as the mixing hash for substream
// derivation below.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

// xoshiro256++ with explicit state; all sampling in this project flows
// through this engine plus hand-rolled transforms, so a (seed, stream)
// pair maps to identical draws for every build of the same binary,
// independent of the standard library's distribution internals.
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed = 1) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64_next(sm);
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl64(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl64(s_[3], 45);
        return result;
    }

private:
    std::uint64_t s_[4];
};

// One reproducible sampling stream: uniforms from the top 53 bits, normals
// via Box-Muller with the second deviate cached.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : eng_(seed) {}

    // uniform on (0, 1]: never 0, so log(u) below is always finite
    double uniform_pos() { return (static_cast<double>(eng_.next() >> 11) + 1.0) * 0x1.0p-53; }

    // uniform on [0, 1)
    double uniform() { return static_cast<double>(eng_.next() >> 11) * 0x1.0p-53; }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_pos();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586477 * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    void fill_normal(std::span<double> out) {
        for (auto& v : out) v = normal();
    }

    std::uint64_t next_u64() { return eng_.next(); }

private:
    Xoshiro256pp eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Counter-based substream derivation: the stream for (master seed, task,
// chunk) is a pure hash of the three values.  Chunk indices are assigned by
// position in the work list, never by scheduling order, which is what makes
// parallel results independent of the worker count.
inline std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t task_id,
                                        std::uint64_t chunk_id) {
    std::uint64_t h = master;
    h = splitmix64_next(h) ^ (0xA0761D6478BD642Full * (task_id + 1));
    h = splitmix64_next(h) ^ (0xE7037ED1A0B428DBull * (chunk_id + 1));
    return splitmix64_next(h);
}

inline RngStream substream(std::uint64_t master, std::uint64_t task_id, std::uint64_t chunk_id) {
    return RngStream(derive_stream_seed(master, task_id, chunk_id));
}

} // namespace vexp
