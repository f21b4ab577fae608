#ifndef KBR_RNG_HPP
#define KBR_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

#include "kbr/types.hpp"

namespace kbr {

// All randomness in the library flows through this wrapper. Named substreams
// let independent parts of an experiment (model draw, training data, test
// points, ABC proposals) share one root seed without correlation.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    // Deterministic child stream: root seed mixed with an FNV-1a hash of the name.
    Rng substream(std::string_view name) const {
        std::uint64_t h = 14695981039346656037ull;
        for (char c : name) {
            h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
            h *= 1099511628211ull;
        }
        return Rng(splitmix(seed_ ^ h));
    }

    double uniform() {  // [0, 1)
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Box-Muller; avoids the implementation-defined std::normal_distribution.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 == 0.0) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    Vector gaussian_vector(int n) {
        Vector v(n);
        for (int i = 0; i < n; ++i) v(i) = gaussian();
        return v;
    }

    std::uint64_t next_u64() { return engine_(); }

    std::uint64_t seed() const { return seed_; }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;

    static std::uint64_t splitmix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }
};

}  // namespace kbr

#endif
