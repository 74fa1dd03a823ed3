#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace intercloud {

// Deterministic RNG for the simulator. std::mt19937_64 output is fully
// specified by the standard; std::uniform_int_distribution is not, so the
// uniform draws are done here to keep runs byte-identical across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, n) without modulo bias.
    std::uint64_t uniform(std::uint64_t n) {
        if (n == 0) return 0;
        const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % n;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

    std::uint64_t uniform_range(std::uint64_t lo, std::uint64_t hi_inclusive) {
        return lo + uniform(hi_inclusive - lo + 1);
    }

    bool chance(double p) {
        return double(engine_()) / double(std::uint64_t(-1)) < p;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[uniform(i)]);
    }

    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[uniform(v.size())];
    }

    // Derives an independent child generator; used to keep per-scenario
    // substreams stable under config additions.
    Rng fork() { return Rng(next_u64() ^ 0x9e3779b97f4a7c15ull); }

private:
    std::mt19937_64 engine_;
};

}  // namespace intercloud
