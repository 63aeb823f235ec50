#pragma once

// Deterministic RNG with explicit value mappings so streams are identical
// across platforms and standard libraries (std distributions are not
// portable between implementations).

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace tildeq {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform in [lo, hi) built from the top 53 bits
    double uniform(double lo, double hi) {
        const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return lo + u * (hi - lo);
    }

    // uniform integer in [0, n), n >= 1; multiply-shift keeps the mapping
    // platform-stable
    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(engine_()) * static_cast<unsigned __int128>(n)) >> 64);
    }

    // Fisher-Yates
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[index(i)]);
    }

private:
    std::mt19937_64 engine_;
};

} // namespace tildeq
