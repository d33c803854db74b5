#pragma once

#include <cstdint>
#include <string_view>

#include "o2nc/vec.hpp"

namespace o2nc {

// Counter-based pseudorandom stream.  Output i is a pure function of
// (key, i), so streams can be split by deriving child keys from names
// without any shared mutable state, and a run is reproducible bit for
// bit from the master seed alone.  The mixer is the splitmix64 finalizer
// evaluated at an arbitrary counter offset.
class RngStream {
public:
    explicit RngStream(std::uint64_t key) : key_(key) {}

    RngStream(std::uint64_t master_seed, std::string_view name, std::uint64_t index = 0)
        : key_(derive_key(master_seed, name, index)) {}

    // Child stream with an independent counter, keyed off this stream.
    RngStream child(std::string_view name, std::uint64_t index = 0) const {
        return RngStream(derive_key(key_, name, index));
    }

    std::uint64_t next_u64() { return value_at(key_, counter_++); }

    // Uniform on [0, 1), 53-bit resolution.
    double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_uniform(); }

    // Standard normal via Box-Muller; consumes exactly two counter values.
    double next_normal() {
        const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        const double u2 = next_uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    Vec next_normal_vec(std::size_t dim) {
        Vec r(dim);
        for (std::size_t i = 0; i < dim; ++i) r[i] = next_normal();
        return r;
    }

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

    static std::uint64_t derive_key(std::uint64_t parent, std::string_view name, std::uint64_t index) {
        // FNV-1a over the name bytes, then splitmix finalization folding in
        // the parent key and the child index.
        std::uint64_t h = 1469598103934665603ULL;
        for (char c : name) {
            h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
            h *= 1099511628211ULL;
        }
        h = mix(h ^ mix(parent));
        h = mix(h + 0x9e3779b97f4a7c15ULL * (index + 1));
        return h;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t value_at(std::uint64_t key, std::uint64_t ctr) {
        return mix(key + (ctr + 1) * 0x9e3779b97f4a7c15ULL);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace o2nc
