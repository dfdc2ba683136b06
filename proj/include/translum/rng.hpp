#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace translum {

namespace detail_zig {

/// Ziggurat layer tables for the standard normal (Marsaglia & Tsang 2000).
struct Tables {
    std::array<std::uint32_t, 128> kn{};
    std::array<double, 128> wn{};
    std::array<double, 128> fn{};

    Tables() {
        const double m1 = 2147483648.0;
        double dn = 3.442619855899;
        const double tn0 = dn;
        const double vn = 9.91256303526217e-3;
        double tn = tn0;
        const double q = vn / std::exp(-0.5 * dn * dn);
        kn[0] = static_cast<std::uint32_t>((dn / q) * m1);
        kn[1] = 0;
        wn[0] = q / m1;
        wn[127] = dn / m1;
        fn[0] = 1.0;
        fn[127] = std::exp(-0.5 * dn * dn);
        for (int i = 126; i >= 1; --i) {
            dn = std::sqrt(-2.0 * std::log(vn / dn + std::exp(-0.5 * dn * dn)));
            kn[static_cast<std::size_t>(i + 1)] = static_cast<std::uint32_t>((dn / tn) * m1);
            tn = dn;
            fn[static_cast<std::size_t>(i)] = std::exp(-0.5 * dn * dn);
            wn[static_cast<std::size_t>(i)] = dn / m1;
        }
    }
};

inline const Tables& tables() {
    static const Tables t;
    return t;
}

inline constexpr double kTailStart = 3.442619855899;

}  // namespace detail_zig

/**
 * Counter-based random stream (Philox 4x32-10, Salmon et al. 2011).
 *
 * A stream is fully determined by (master_seed, stream_id): the key is the
 * master seed and the upper counter words are the stream id, so every
 * substream is an independent slice of one keyed permutation. Draws depend
 * only on the block counter, which makes output independent of evaluation
 * order, thread count, or how many sibling streams were consumed first.
 *
 * One stream has a single owner; streams themselves are cheap value types.
 */
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
        : key0_(static_cast<std::uint32_t>(master_seed)),
          key1_(static_cast<std::uint32_t>(master_seed >> 32)),
          sid0_(static_cast<std::uint32_t>(stream_id)),
          sid1_(static_cast<std::uint32_t>(stream_id >> 32)) {}

    std::uint64_t next_u64() {
        if (idx_ >= 2) refill();
        return out_[idx_++];
    }

    std::uint32_t next_u32() {
        if (have_half_) {
            have_half_ = false;
            return half_;
        }
        const std::uint64_t v = next_u64();
        half_ = static_cast<std::uint32_t>(v >> 32);
        have_half_ = true;
        return static_cast<std::uint32_t>(v);
    }

    /// Uniform double in [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in (0, 1), safe under log().
    double next_double_open() {
        return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
    }

    /// Standard normal deviate (Marsaglia-Tsang ziggurat, 128 layers).
    double next_gaussian() {
        const auto& z = detail_zig::tables();
        for (;;) {
            const auto hz = static_cast<std::int32_t>(next_u32());
            const std::uint32_t iz = static_cast<std::uint32_t>(hz) & 127u;
            const auto mag = static_cast<std::uint32_t>(
                hz == std::numeric_limits<std::int32_t>::min() ? 2147483648u
                                                               : std::abs(static_cast<long>(hz)));
            if (mag < z.kn[iz]) return hz * z.wn[iz];

            double x = hz * z.wn[iz];
            if (iz == 0) {  // tail beyond the base layer
                double y;
                do {
                    x = -std::log(next_double_open()) / detail_zig::kTailStart;
                    y = -std::log(next_double_open());
                } while (y + y < x * x);
                return hz > 0 ? detail_zig::kTailStart + x : -detail_zig::kTailStart - x;
            }
            if (z.fn[iz] + next_double() * (z.fn[iz - 1] - z.fn[iz]) < std::exp(-0.5 * x * x))
                return x;
        }
    }

    // UniformRandomBitGenerator interface
    using result_type = std::uint64_t;
    static constexpr std::uint64_t min() { return 0; }
    static constexpr std::uint64_t max() { return std::numeric_limits<std::uint64_t>::max(); }
    std::uint64_t operator()() { return next_u64(); }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
        const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
        hi = static_cast<std::uint32_t>(p >> 32);
        lo = static_cast<std::uint32_t>(p);
    }

    void refill() {
        std::uint32_t c0 = static_cast<std::uint32_t>(block_);
        std::uint32_t c1 = static_cast<std::uint32_t>(block_ >> 32);
        std::uint32_t c2 = sid0_;
        std::uint32_t c3 = sid1_;
        std::uint32_t k0 = key0_;
        std::uint32_t k1 = key1_;
        for (int round = 0; round < 10; ++round) {
            std::uint32_t hi0, lo0, hi1, lo1;
            mulhilo(kMul0, c0, hi0, lo0);
            mulhilo(kMul1, c2, hi1, lo1);
            c0 = hi1 ^ c1 ^ k0;
            c1 = lo1;
            c2 = hi0 ^ c3 ^ k1;
            c3 = lo0;
            k0 += kWeyl0;
            k1 += kWeyl1;
        }
        out_[0] = (static_cast<std::uint64_t>(c1) << 32) | c0;
        out_[1] = (static_cast<std::uint64_t>(c3) << 32) | c2;
        ++block_;
        idx_ = 0;
    }

    std::uint32_t key0_, key1_, sid0_, sid1_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> out_{};
    int idx_ = 2;
    std::uint32_t half_ = 0;
    bool have_half_ = false;
};

inline RngStream make_substream(std::uint64_t master_seed, std::uint64_t stream_id) {
    return RngStream(master_seed, stream_id);
}

}  // namespace translum
