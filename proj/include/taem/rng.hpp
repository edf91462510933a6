#pragma once

#include <cstdint>
#include <random>

namespace taem {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

/// Stream of independent standard normals.  Streams derived from the same
/// (master_seed, index) pair are identical within a build; streams with
/// different indices are decorrelated through a splitmix64 hash chain.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

    static NormalStream derived(std::uint64_t master_seed, std::uint64_t index) {
        std::uint64_t s = master_seed;
        std::uint64_t a = detail::splitmix64(s);
        s ^= index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL;
        std::uint64_t b = detail::splitmix64(s);
        return NormalStream(a ^ (b + 0x9e3779b97f4a7c15ULL));
    }

    /// One draw from N(0, 1).
    double operator()() { return normal_(engine_); }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace taem
