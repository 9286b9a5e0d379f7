#pragma once

#include <cstdint>
#include <random>

namespace etd {

// splitmix64 finalizer; used to derive independent stream seeds from a root
// seed and integer coordinates (probe index, trial index, ...).
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t s = mix64(root);
    s = mix64(s ^ (a + 0x632be59bd9b4e019ULL));
    s = mix64(s ^ (b + 0x8cb92ba72f3d8dd7ULL));
    s = mix64(s ^ (c + 0xd1b54a32d192ed03ULL));
    return s;
}

// Standard normal stream with a fixed seed.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : eng_(seed) {}
    double operator()() { return dist_(eng_); }

private:
    std::mt19937_64 eng_;
    std::normal_distribution<double> dist_{0.0, 1.0};
};

}  // namespace etd
