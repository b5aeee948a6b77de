#pragma once

#include <cstdint>
#include <cmath>
#include <utility>

namespace mscbf {

// Philox4x32-10 keyed counter block cipher.  Every random number in the
// project is a pure function of (seed, stream words, counter), so any
// draw can be replayed bit-exactly from anywhere, including other
// processes and other thread schedules.
struct Philox4x32 {
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    struct Block {
        std::uint32_t v[4];
    };

    static inline void round(std::uint32_t& c0, std::uint32_t& c1,
                             std::uint32_t& c2, std::uint32_t& c3,
                             std::uint32_t k0, std::uint32_t k1) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c0;
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c2;
        const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
        const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
        const std::uint32_t n0 = hi1 ^ c1 ^ k0;
        const std::uint32_t n2 = hi0 ^ c3 ^ k1;
        c0 = n0;
        c1 = lo1;
        c2 = n2;
        c3 = lo0;
    }

    static Block encrypt(std::uint64_t key, std::uint32_t c0, std::uint32_t c1,
                         std::uint32_t c2, std::uint32_t c3) {
        std::uint32_t k0 = static_cast<std::uint32_t>(key);
        std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
        for (int r = 0; r < 10; ++r) {
            round(c0, c1, c2, c3, k0, k1);
            k0 += kWeyl0;
            k1 += kWeyl1;
        }
        return Block{{c0, c1, c2, c3}};
    }
};

// Logical channels of randomness.  Q1/Q2 drive the coupled system, Q2bar
// drives frozen-equation runs and must stay independent of the other two;
// the remaining channels serve bookkeeping (bootstrap resampling, random
// field samplers, ...) without ever colliding with the Wiener channels.
enum class RngChannel : std::uint32_t {
    Q1 = 0,
    Q2 = 1,
    Q2bar = 2,
    Bootstrap = 3,
    FieldSampler = 4,
    Initial = 5,
};

inline std::uint64_t uniform_bits(std::uint32_t hi, std::uint32_t lo) {
    return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

// Uniform in (0,1]; never returns 0 so log() below is safe.
inline double to_unit_double(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

// Two independent standard Gaussians from one cipher block (Box-Muller).
inline std::pair<double, double> gaussian_pair(std::uint64_t key,
                                               std::uint32_t c0, std::uint32_t c1,
                                               std::uint32_t c2, std::uint32_t c3) {
    const Philox4x32::Block b = Philox4x32::encrypt(key, c0, c1, c2, c3);
    const double u1 = to_unit_double(uniform_bits(b.v[0], b.v[1]));
    const double u2 = to_unit_double(uniform_bits(b.v[2], b.v[3]));
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

// Convenience view for non-Wiener randomness (bootstrap indices, field
// samplers).  `slot` enumerates draws inside one logical event.
struct ScalarRng {
    std::uint64_t seed = 0;
    std::uint32_t id = 0;
    RngChannel channel = RngChannel::Bootstrap;

    std::pair<double, double> gaussians(std::uint64_t event, std::uint32_t slot) const {
        return gaussian_pair(seed, static_cast<std::uint32_t>(event),
                             static_cast<std::uint32_t>(event >> 32), id,
                             slot | (static_cast<std::uint32_t>(channel) << 24));
    }

    // Uniform integer in [0, n) for resampling.
    std::uint64_t uniform_index(std::uint64_t event, std::uint32_t slot, std::uint64_t n) const {
        const Philox4x32::Block b =
            Philox4x32::encrypt(seed, static_cast<std::uint32_t>(event),
                                static_cast<std::uint32_t>(event >> 32), id,
                                slot | (static_cast<std::uint32_t>(channel) << 24));
        return uniform_bits(b.v[0], b.v[1]) % n;
    }
};

}  // namespace mscbf
