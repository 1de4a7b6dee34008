#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace impulse_games {

/// Philox4x32-10 counter-based generator. Streams are keyed by
/// (seed, path, player); draws are a pure function of the counter, so paths
/// are reproducible and trivially parallelizable, and common random numbers
/// across policy candidates come for free.
struct Philox {
    static std::array<std::uint32_t, 4> block(std::uint64_t seed, std::uint64_t path,
                                              std::uint32_t player, std::uint32_t index) {
        std::uint32_t c0 = static_cast<std::uint32_t>(path);
        std::uint32_t c1 = static_cast<std::uint32_t>(path >> 32);
        std::uint32_t c2 = player;
        std::uint32_t c3 = index;
        std::uint32_t k0 = static_cast<std::uint32_t>(seed);
        std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t(0xD2511F53u) * c0;
            const std::uint64_t p1 = std::uint64_t(0xCD9E8D57u) * c2;
            const std::uint32_t h0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t l0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t h1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t l1 = static_cast<std::uint32_t>(p1);
            const std::uint32_t n0 = h1 ^ c1 ^ k0;
            const std::uint32_t n2 = h0 ^ c3 ^ k1;
            c0 = n0;
            c1 = l1;
            c2 = n2;
            c3 = l0;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        return {c0, c1, c2, c3};
    }
};

/// Two uniforms in (0, 1] from one Philox block.
inline std::array<double, 2> uniform_pair(std::uint64_t seed, std::uint64_t path,
                                          std::uint32_t player, std::uint32_t index) {
    const auto b = Philox::block(seed, path, player, index);
    const std::uint64_t w0 = (std::uint64_t(b[0]) << 32) | b[1];
    const std::uint64_t w1 = (std::uint64_t(b[2]) << 32) | b[3];
    constexpr double scale = 1.0 / 9007199254740992.0;  // 2^-53
    return {((w0 >> 11) + 1) * scale, ((w1 >> 11) + 1) * scale};
}

/// Two standard normals (Box-Muller) from one Philox block.
inline std::array<double, 2> normal_pair(std::uint64_t seed, std::uint64_t path,
                                         std::uint32_t player, std::uint32_t index) {
    const auto u = uniform_pair(seed, path, player, index);
    const double radius = std::sqrt(-2.0 * std::log(u[0]));
    const double angle = 6.283185307179586476925286766559 * u[1];
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

/// Sequential per-(path, player) stream of standard normals; one normal per
/// simulation step, generated two at a time.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t path, std::uint32_t player)
        : seed_(seed), path_(path), player_(player) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const auto z = normal_pair(seed_, path_, player_, index_++);
        spare_ = z[1];
        have_spare_ = true;
        return z[0];
    }

private:
    std::uint64_t seed_;
    std::uint64_t path_;
    std::uint32_t player_;
    std::uint32_t index_ = 0;
    double spare_ = 0;
    bool have_spare_ = false;
};

} // namespace impulse_games
