#pragma once

#include <cstdint>
#include <vector>

namespace dars {

// splitmix64: the 64-bit generator used everywhere results must be reproducible
// bit-for-bit across platforms and standard-library versions. Distribution helpers
// are hand-rolled for the same reason (std::uniform_real_distribution is not
// portable across implementations).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1]; rejects the zero mantissa so strengths are never absent.
    double next_unit_open() {
        double d;
        do {
            d = next_double();
        } while (d == 0.0);
        return d;
    }

    // Unbiased uniform integer in [0, bound) by rejection.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t v;
        do {
            v = next();
        } while (v >= limit);
        return v % bound;
    }

    // Fisher-Yates with the portable integer draw above.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Derives an independent stream for a grid cell so parallel evaluation order
    // cannot change results.
    static SplitMix64 stream(std::uint64_t seed, std::uint64_t index) {
        SplitMix64 mix(seed ^ (0x9e3779b97f4a7c15ULL + index * 0xbf58476d1ce4e5b9ULL));
        return SplitMix64(mix.next());
    }

    static constexpr const char* algorithm_name() { return "splitmix64"; }

private:
    std::uint64_t state_;
};

}  // namespace dars
