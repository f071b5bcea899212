#pragma once

#include <cmath>
#include <cstdint>

namespace telewell {

/// SplitMix64 keyed by (seed, stream): each Monte Carlo path owns its own
/// stream, so runs are reproducible and embarrassingly parallel.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t state) : state_(state) {}

    static SplitMix64 for_stream(std::uint64_t seed, std::uint64_t stream) {
        // two finalizer rounds decorrelate neighbouring stream keys
        std::uint64_t s = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
        s = mix(s);
        s = mix(s ^ 0xD1B54A32D192ED03ULL);
        return SplitMix64(s);
    }

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// uniform in [0, 1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double exponential(double rate) {
        // -log1p(-u) stays finite for u in [0, 1)
        return -std::log1p(-uniform()) / rate;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

} // namespace telewell
