#pragma once

#include <cmath>
#include <cstdint>

namespace plq {

// Deterministic random streams for the simulator. std::normal_distribution is
// implementation-defined, so Gaussians are produced here with a fixed
// algorithm: xoshiro256++ uniforms fed through Box-Muller. Identical seeds
// give bitwise-identical streams on every platform/compiler.

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64_next(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on (0, 1]: 53-bit mantissa, never exactly 0 so log() is safe.
    double uniform_pos() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t state_[4];
};

// Standard normal via Box-Muller; generates two values per trig/log call.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = rng_.uniform_pos();
        const double u2 = rng_.uniform_pos();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * M_PI * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    Xoshiro256pp rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Splitting rule for per-path substreams: mixes (seed, path, substream)
// through splitmix64 so that streams are independent of execution order and
// of the number of workers. Substream 0 drives the signal noise W, substream
// 1 the observation noise B; W therefore does not depend on the device
// precision b, and runs at different b share the W realization path-by-path.
inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t path_index,
                                        std::uint64_t substream) {
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64_next(s);
    s = a ^ (0x9E3779B97F4A7C15ULL * (path_index + 1));
    std::uint64_t b = splitmix64_next(s);
    s = b ^ (0xD1B54A32D192ED03ULL * (substream + 1));
    return splitmix64_next(s);
}

}  // namespace plq
