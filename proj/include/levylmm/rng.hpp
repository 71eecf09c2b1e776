#ifndef LEVYLMM_RNG_HPP
#define LEVYLMM_RNG_HPP

#include <array>
#include <cstdint>
#include <limits>

#include <boost/math/special_functions/erf.hpp>

namespace levylmm {

/// Philox4x32-10 counter-based block cipher.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter encrypt(Counter ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += 0x9E3779B9u;
                key[1] += 0xBB67AE85u;
            }
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }
};

/// Which part of a path's randomness a stream feeds.
enum class StreamTag : std::uint32_t { jumps = 0, gaussians = 1, auxiliary = 2 };

/// Deterministic substream identified by (seed, path id, tag).  Draw k of the
/// stream is a pure function of k: block k/2 of Philox with counter
/// (k/2 lo, k/2 hi, path id, tag) and the seed as key, so any consumer that
/// reads position k sees the same value regardless of scheduling.
/// Satisfies UniformRandomBitGenerator with 64-bit output.
class RandomStream {
public:
    using result_type = std::uint64_t;

    RandomStream(std::uint64_t seed, std::uint32_t path_id, StreamTag tag)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          path_id_(path_id),
          tag_(static_cast<std::uint32_t>(tag)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (slot_ == 2) refill();
        return buffer_[slot_++];
    }

    /// Uniform on the open interval (0,1) with 53 random bits.
    double uniform() {
        const result_type bits = (*this)() >> 11;
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal by inversion: exactly one uniform per draw.
    double normal() {
        const double u = uniform();
        return -1.4142135623730951 * boost::math::erfc_inv(2.0 * u);
    }

    /// Number of 64-bit draws consumed so far.
    std::uint64_t position() const { return block_ * 2 - (2 - slot_); }

    /// Jump to absolute draw position.
    void seek(std::uint64_t position) {
        block_ = position / 2;
        slot_ = 2;
        if (position % 2 == 1) {
            refill();
            slot_ = 1;
        }
    }

private:
    void refill() {
        const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block_),
                                      static_cast<std::uint32_t>(block_ >> 32), path_id_, tag_};
        const auto out = Philox4x32::encrypt(ctr, key_);
        buffer_[0] = (std::uint64_t{out[0]} << 32) | out[1];
        buffer_[1] = (std::uint64_t{out[2]} << 32) | out[3];
        ++block_;
        slot_ = 0;
    }

    Philox4x32::Key key_;
    std::uint32_t path_id_;
    std::uint32_t tag_;
    std::uint64_t block_ = 0;
    std::array<result_type, 2> buffer_{};
    int slot_ = 2;
};

/// Substream for one path and one randomness category.
inline RandomStream common_randomness(std::uint64_t seed, std::uint32_t path_id,
                                      StreamTag tag = StreamTag::jumps) {
    return RandomStream(seed, path_id, tag);
}

} // namespace levylmm

#endif // LEVYLMM_RNG_HPP
