#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace ewd {

// Deterministic random source. mt19937_64 output is fixed by the standard and
// all variate transforms are spelled out here, so identical seeds give
// identical streams on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_raw() { return gen_(); }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // Box-Muller, spare discarded to keep the stream position predictable.
    double normal(double mu, double sigma) {
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mu + sigma * r * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Uniform integer in [0, n), rejection-free enough for our n.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t bound = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x = gen_();
        while (x >= bound) x = gen_();
        return x % n;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[static_cast<std::size_t>(below(i))]);
        }
    }

private:
    std::mt19937_64 gen_;
};

// Stable stream derivation so that nested loops (iteration, combo, restart)
// can draw independently of execution order.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (a + 1) + 0xbf58476d1ce4e5b9ULL * (b + 1) +
                      0x94d049bb133111ebULL * (c + 1);
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

}  // namespace ewd
