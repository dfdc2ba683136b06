#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "translum/channel.hpp"
#include "translum/framing.hpp"
#include "translum/link_config.hpp"
#include "translum/modem.hpp"
#include "translum/powerbudget.hpp"
#include "translum/rng.hpp"
#include "translum/stats.hpp"

namespace translum {

struct BerReport {
    std::uint64_t bits_compared = 0;
    std::uint64_t bit_errors = 0;
    std::uint64_t frames_sent = 0;
    std::uint64_t sync_failures = 0;  // lost frames, excluded from bits_compared
    double ber = 0.0;
    double ber_upper_95 = 1.0;
    double wall_seconds = 0.0;
    std::uint64_t config_digest = 0;

    void finalize() {
        ber = bits_compared > 0 ? static_cast<double>(bit_errors) / static_cast<double>(bits_compared) : 0.0;
        ber_upper_95 = bits_compared > 0 ? ber_upper_bound(bit_errors, bits_compared, 0.95) : 1.0;
    }
};

namespace detail {

// Substream layout: frame i draws its payload from stream 2i and its channel
// noise from stream 2i+1, so frames are reproducible in any execution order.
inline constexpr std::uint64_t kPayloadStream = 0;
inline constexpr std::uint64_t kNoiseStream = 1;

/// Idle transmitter time around each frame: gives the first pulse a real
/// rising edge and lets the receiver filter settle.
inline constexpr std::size_t kLeadSymbols = 4;
inline constexpr std::size_t kTailSymbols = 2;

struct FrameOutcome {
    bool synced = false;
    std::uint64_t errors = 0;
};

inline FrameOutcome run_frame(std::uint64_t frame_index, const LinkConfig& cfg,
                              const TissueStack& stack, const RxModel& rx) {
    RngStream payload_rng(cfg.seed, 2 * frame_index + kPayloadStream);
    RngStream noise_rng(cfg.seed, 2 * frame_index + kNoiseStream);

    std::vector<std::uint8_t> payload(cfg.payload_len);
    for (auto& b : payload) b = static_cast<std::uint8_t>(payload_rng.next_u64() & 0xFF);

    const Frame frame = build_frame(payload, cfg.prefix_pattern);
    const BitStream sent = BitStream::from_bytes(frame.payload);
    const PulseTrain train = encode(frame.bits(), cfg);
    Waveform tx = rasterize(train, cfg.sample_rate(), cfg.led_peak_power);
    tx = pad_waveform(tx, kLeadSymbols * static_cast<std::size_t>(cfg.oversampling),
                      kTailSymbols * static_cast<std::size_t>(cfg.oversampling));

    const Waveform rx_wave = end_to_end(tx, stack, rx, noise_rng);
    try {
        const BitStream decoded = decode(rx_wave, cfg);
        const std::size_t offset = locate_prefix(decoded, cfg.prefix_pattern);
        const BitStream recovered = extract_payload(decoded, offset, sent.size());
        return {true, recovered.hamming_distance(sent)};
    } catch (const no_signal_error&) {
        return {false, 0};
    } catch (const sync_failure_error&) {
        return {false, 0};
    } catch (const truncated_frame_error&) {
        return {false, 0};
    }
}

}  // namespace detail

/**
 * Monte Carlo link experiment: n_frames random frames through the full
 * modem + channel chain, payloads compared bit-for-bit after prefix sync.
 * Deterministic for a fixed (config, seed) regardless of thread count.
 */
inline BerReport run_link(const LinkConfig& cfg, const TissueStack& stack, const RxModel& rx,
                          std::uint64_t n_frames, unsigned threads = 0) {
    if (n_frames < 1) throw config_error("run_link: n_frames must be >= 1");
    cfg.validate();

    const auto t_start = std::chrono::steady_clock::now();
    const std::uint64_t payload_bits = static_cast<std::uint64_t>(cfg.payload_len) * 8;

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, n_frames));

    struct Partial {
        std::uint64_t frames = 0, synced = 0, errors = 0;
    };
    std::vector<Partial> partials(threads);
    std::atomic<std::uint64_t> next{0};

    auto worker = [&](unsigned w) {
        Partial& acc = partials[w];
        for (;;) {
            const std::uint64_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n_frames) break;
            const auto outcome = detail::run_frame(i, cfg, stack, rx);
            ++acc.frames;
            if (outcome.synced) {
                ++acc.synced;
                acc.errors += outcome.errors;
            }
        }
    };

    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker, w);
        for (auto& t : pool) t.join();
    }

    BerReport report;
    for (const Partial& p : partials) {  // commutative counter merge
        report.frames_sent += p.frames;
        report.bits_compared += p.synced * payload_bits;
        report.bit_errors += p.errors;
        report.sync_failures += p.frames - p.synced;
    }
    report.finalize();
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return report;
}

// ---------------------------------------------------------------------------
// Sweeps over operating points
// ---------------------------------------------------------------------------

struct SweepRowResult {
    BenchRow row;
    BerReport report;
    double power_mw = 0.0;
    double nj_per_bit = 0.0;
    std::string error;  // non-empty when the row failed to run
};

/**
 * Run each bench-table row through the simulator. Rows derive disjoint seed
 * spaces from their content, so duplicated rows reproduce identical reports
 * and row order never matters.
 */
inline std::vector<SweepRowResult> sweep(std::span<const BenchRow> rows, const LinkConfig& base_cfg,
                                         const RxModel& rx, std::uint64_t frames_per_row,
                                         unsigned threads = 0) {
    std::vector<SweepRowResult> out;
    out.reserve(rows.size());
    for (const BenchRow& row : rows) {
        SweepRowResult res;
        res.row = row;
        res.power_mw = row.power_mw;
        res.nj_per_bit = computed_nj_per_bit(row);
        try {
            LinkConfig cfg = base_cfg;
            cfg.data_rate = row.rate_mbps * 1e6;
            cfg.modulation = row.modulation;
            // 0.2T PDM pulses need >= 20 samples/symbol to rasterize
            if (row.modulation == Modulation::PDM && cfg.oversampling < 20) cfg.oversampling = 24;
            // row-content hash keeps substreams disjoint across distinct rows
            std::uint64_t row_tag = 1469598103934665603ull;
            auto mix = [&row_tag](std::uint64_t v) {
                row_tag = (row_tag ^ v) * 1099511628211ull;
            };
            mix(static_cast<std::uint64_t>(row.rate_mbps * 1e6));
            mix(static_cast<std::uint64_t>(row.bone_mm));
            mix(row.modulation == Modulation::PWM ? 1 : 2);
            cfg.seed = base_cfg.seed ^ row_tag;
            res.report = run_link(cfg, tissue_preset(bench_preset_name(row)), rx, frames_per_row, threads);
        } catch (const std::exception& e) {
            res.error = e.what();
        }
        out.push_back(std::move(res));
    }
    return out;
}

inline constexpr const char* kSweepCsvHeader =
    "rate_bps,modulation,preset,frames,bits,errors,sync_failures,ber,ber_upper_95,power_mw,"
    "nj_per_bit,seconds";

inline void write_sweep_csv(std::ostream& os, std::span<const SweepRowResult> results) {
    os << kSweepCsvHeader << '\n';
    for (const SweepRowResult& r : results) {
        os << r.row.rate_mbps * 1e6 << ',' << to_string(r.row.modulation) << ','
           << bench_preset_name(r.row) << ',' << r.report.frames_sent << ',' << r.report.bits_compared
           << ',' << r.report.bit_errors << ',' << r.report.sync_failures << ',' << r.report.ber << ','
           << r.report.ber_upper_95 << ',' << r.power_mw << ',' << r.nj_per_bit << ','
           << r.report.wall_seconds << '\n';
    }
}

}  // namespace translum
