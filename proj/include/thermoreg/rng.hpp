#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace thermo {

// Portable seeded generator. The standard distributions are
// implementation-defined, so every derived quantity is computed here from
// raw 64-bit draws to keep results identical across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform integer in [0, n). Rejection sampling, no modulo bias.
    std::uint64_t uniform_index(std::uint64_t n);

    // Uniform double in [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal();
    double normal(double mean, double sd) { return mean + sd * normal(); }

    template <typename T>
    void shuffle(std::vector<T>& items)
    {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = uniform_index(i);
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Derives an independent stream seed from a base seed and a stream id.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

std::vector<std::size_t> iota_indices(std::size_t n);

} // namespace thermo
