#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "translum/link_config.hpp"

namespace translum {

/// Measured transmitter operating point (power figures are inputs, not predictions).
struct RatePowerPoint {
    double data_rate = 0.0;  // bit/s
    double power = 0.0;      // W
    std::string tissue_preset;
    Modulation modulation = Modulation::PWM;
};

/// Transmit energy per bit, J/bit.
inline double energy_per_bit(const RatePowerPoint& p) {
    if (!(p.data_rate > 0)) throw std::invalid_argument("energy_per_bit: data_rate must be > 0");
    return p.power / p.data_rate;
}

/// Raw aggregate sensing rate, exact integer arithmetic.
inline std::uint64_t required_rate(std::uint64_t channels, std::uint64_t fs_hz, std::uint64_t resolution_bits) {
    if (channels == 0 || fs_hz == 0 || resolution_bits == 0)
        throw std::invalid_argument("required_rate: all arguments must be positive");
    return channels * fs_hz * resolution_bits;
}

// Frame overhead: 32 prefix bits on a 1520-bit payload.
inline constexpr std::uint64_t kFrameBits = 1552;
inline constexpr std::uint64_t kPayloadBits = 1520;

/// Required rate including prefix overhead, rounded up to a whole bit/s.
inline std::uint64_t framed_required_rate(std::uint64_t channels, std::uint64_t fs_hz,
                                          std::uint64_t resolution_bits) {
    const std::uint64_t raw = required_rate(channels, fs_hz, resolution_bits);
    return (raw * kFrameBits + kPayloadBits - 1) / kPayloadBits;
}

struct FeasibilityReport {
    std::uint64_t raw_bps = 0;
    std::uint64_t framed_bps = 0;
    bool raw_ok = false;
    bool framed_ok = false;
    double margin_bps = 0.0;  // link rate minus framed requirement
};

inline FeasibilityReport feasibility(std::uint64_t channels, std::uint64_t fs_hz,
                                     std::uint64_t resolution_bits, double link_rate_bps) {
    if (!(link_rate_bps > 0)) throw std::invalid_argument("feasibility: link_rate must be > 0");
    FeasibilityReport r;
    r.raw_bps = required_rate(channels, fs_hz, resolution_bits);
    r.framed_bps = framed_required_rate(channels, fs_hz, resolution_bits);
    r.raw_ok = static_cast<double>(r.raw_bps) <= link_rate_bps;
    r.framed_ok = static_cast<double>(r.framed_bps) <= link_rate_bps;
    r.margin_bps = link_rate_bps - static_cast<double>(r.framed_bps);
    return r;
}

// ---------------------------------------------------------------------------
// Bench measurement table: twelve operating points
// ---------------------------------------------------------------------------

struct BenchRow {
    double rate_mbps;
    int bone_mm;  // skin is 7 mm in every row
    Modulation modulation;
    double power_mw;          // measured at the transmitter supply
    double printed_nj_per_bit;  // efficiency figure as published
};

inline constexpr std::array<BenchRow, 12> kBenchTable{{
    {0.5, 5, Modulation::PWM, 1.1, 2.3},
    {1.0, 5, Modulation::PWM, 1.3, 1.3},
    {2.0, 5, Modulation::PWM, 1.8, 0.9},
    {5.0, 5, Modulation::PWM, 2.7, 0.54},
    {1.0, 5, Modulation::PDM, 1.4, 1.4},
    {3.0, 5, Modulation::PDM, 2.7, 0.9},
    {2.0, 8, Modulation::PWM, 2.1, 1.05},
    {5.0, 8, Modulation::PWM, 3.4, 0.68},
    {3.0, 8, Modulation::PDM, 2.4, 0.8},
    {2.0, 10, Modulation::PWM, 2.6, 1.3},
    {5.0, 10, Modulation::PWM, 3.8, 0.76},
    {3.0, 10, Modulation::PDM, 2.9, 0.96},
}};

inline std::string bench_preset_name(const BenchRow& row) {
    return "bone" + std::to_string(row.bone_mm) + "_skin7";
}

inline RatePowerPoint bench_point(const BenchRow& row) {
    return {row.rate_mbps * 1e6, row.power_mw * 1e-3, bench_preset_name(row), row.modulation};
}

inline double computed_nj_per_bit(const BenchRow& row) {
    return energy_per_bit(bench_point(row)) * 1e9;
}

/// True when the published efficiency disagrees with power/rate by more than
/// 0.01 nJ/bit (the 0.5 Mbit/s row: 1.1 mW / 0.5 Mbit/s is 2.2, printed 2.3).
inline bool efficiency_flagged(const BenchRow& row) {
    return std::abs(computed_nj_per_bit(row) - row.printed_nj_per_bit) > 0.01;
}

}  // namespace translum
