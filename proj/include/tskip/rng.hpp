#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace tskip {

// Deterministic random source. All randomness in the project flows through
// this class so that runs are bit-reproducible across platforms; the standard
// distributions are implementation-defined, so we derive values from the raw
// mt19937_64 stream ourselves.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1) with 53 bits of mantissa.
    double next_unit() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_unit();
    }

    // Uniform in [0, n). Modulo bias is irrelevant at the sizes used here;
    // determinism is what matters.
    std::size_t below(std::size_t n) {
        return static_cast<std::size_t>(gen_() % n);
    }

    // Fisher-Yates; std::shuffle is implementation-defined, this is not.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = below(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace tskip
