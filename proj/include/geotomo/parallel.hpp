#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace geotomo {

void set_worker_count(int workers);
int worker_count();

// Runs fn(i) for i in [0, n). Each index is handled by exactly one thread, so
// results written per index do not depend on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

std::uint64_t splitmix64(std::uint64_t x);

// Seed for the i-th independent stream of a run.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t i) {
    return splitmix64(splitmix64(seed) ^ (0x9e3779b97f4a7c15ULL * (i + 1)));
}

// Small wrapper so streams are identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return (eng_() >> 11) * 0x1.0p-53; }
    // (0, 1], safe for logs and negative powers
    double uniform_pos() { return ((eng_() >> 11) + 1) * 0x1.0p-53; }
    double normal();

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace geotomo
