#pragma once

#include <cstdint>

namespace fk {

// Counter-based splittable generator (splitmix64 finalizer). Every consumer
// derives its own stream from (seed, stream id), so parallel schedules cannot
// change the draws any worker sees.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key = 0) : key_(key) {}

    CounterRng derive(std::uint64_t stream) const {
        return CounterRng(mix(key_ ^ (0x9E3779B97F4A7C15ULL + stream * 0xBF58476D1CE4E5B9ULL)));
    }

    std::uint64_t next_u64() { return mix(key_ + 0x9E3779B97F4A7C15ULL * ++counter_); }

    // Uniform in [0, 1), 53-bit resolution, bit-identical across platforms.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace fk
