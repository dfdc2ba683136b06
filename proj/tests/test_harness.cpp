// End-to-end BER harness: accounting, determinism, confidence bounds, sweeps.

#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cmath>
#include <set>
#include <sstream>

#include "translum/config.hpp"
#include "translum/harness.hpp"
#include "translum/io.hpp"

using namespace translum;

namespace {

SimConfig noiseless_config() {
    SimConfig cfg = default_sim_config();
    cfg.receiver.shot_noise = false;
    cfg.receiver.thermal_noise_vrms = 0.0;
    return cfg;
}

// Independent check for small error counts: direct binomial CDF in log space,
// bisected over p. Distinct route from the incomplete-beta implementation.
double binomial_upper_oracle(std::uint64_t k, std::uint64_t n, double confidence) {
    auto cdf = [&](double p) {
        double acc = 0.0;
        for (std::uint64_t i = 0; i <= k; ++i) {
            double log_term = std::lgamma(static_cast<double>(n) + 1) -
                              std::lgamma(static_cast<double>(i) + 1) -
                              std::lgamma(static_cast<double>(n - i) + 1) +
                              static_cast<double>(i) * std::log(p) +
                              static_cast<double>(n - i) * std::log1p(-p);
            acc += std::exp(log_term);
        }
        return acc;
    };
    double lo = 1e-12, hi = 1.0 - 1e-12;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (cdf(mid) > 1.0 - confidence) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("noiseless link carries every frame error free", "[harness]") {
    const SimConfig cfg = noiseless_config();
    const BerReport rep = run_link(cfg.link, cfg.tissue, cfg.receiver, 20, 1);
    REQUIRE(rep.frames_sent == 20);
    REQUIRE(rep.sync_failures == 0);
    REQUIRE(rep.bits_compared == 20ull * 1520);
    REQUIRE(rep.bit_errors == 0);
    REQUIRE(rep.ber == 0.0);
    REQUIRE(rep.ber_upper_95 > 0.0);
}

TEST_CASE("dark transmitter loses every frame", "[harness]") {
    SimConfig cfg = default_sim_config();
    cfg.link.led_peak_power = 0.0;
    const BerReport rep = run_link(cfg.link, cfg.tissue, cfg.receiver, 8, 1);
    REQUIRE(rep.sync_failures == 8);
    REQUIRE(rep.bits_compared == 0);
    REQUIRE(rep.ber == 0.0);
    REQUIRE(rep.ber_upper_95 == 1.0);
}

TEST_CASE("invalid config is rejected before any frame runs", "[harness]") {
    SimConfig cfg = noiseless_config();
    cfg.link.oversampling = 2;
    REQUIRE_THROWS_AS(run_link(cfg.link, cfg.tissue, cfg.receiver, 1, 1), config_error);
    REQUIRE_THROWS_AS(run_link(noiseless_config().link, cfg.tissue, cfg.receiver, 0, 1), config_error);
}

TEST_CASE("ber_upper_bound matches closed forms and the rule of three", "[harness]") {
    // 0 errors in 3e8 bits: ln(20)/n within 1%
    const double n = 3e8;
    const double bound = ber_upper_bound(0, 300000000ull, 0.95);
    REQUIRE(std::abs(bound - std::log(20.0) / n) / (std::log(20.0) / n) < 0.01);
    REQUIRE(bound == Catch::Approx(9.9857e-9).epsilon(1e-3));

    REQUIRE(ber_upper_bound(0, 1, 0.95) == Catch::Approx(0.95).epsilon(1e-9));
    REQUIRE(ber_upper_bound(5, 5, 0.95) == 1.0);
    REQUIRE_THROWS_AS(ber_upper_bound(2, 1, 0.95), std::invalid_argument);
    REQUIRE_THROWS_AS(ber_upper_bound(0, 0, 0.95), std::invalid_argument);
}

TEST_CASE("ber_upper_bound agrees with a direct binomial oracle", "[harness]") {
    const struct {
        std::uint64_t k, n;
    } cases[] = {{0, 1000}, {1, 1000}, {3, 1000000}, {7, 50000}, {2, 100}};
    for (const auto& c : cases) {
        const double got = ber_upper_bound(c.k, c.n, 0.95);
        const double want = binomial_upper_oracle(c.k, c.n, 0.95);
        REQUIRE(got == Catch::Approx(want).epsilon(1e-6));
    }
}

TEST_CASE("injected bit flips are counted exactly", "[harness]") {
    // decode a clean frame, flip k payload bits, re-run the comparison
    const SimConfig cfg = noiseless_config();
    RngStream payload_rng(cfg.link.seed, 0);
    std::vector<std::uint8_t> payload(cfg.link.payload_len);
    for (auto& b : payload) b = static_cast<std::uint8_t>(payload_rng.next_u64() & 0xFF);
    const Frame frame = build_frame(payload, cfg.link.prefix_pattern);
    const BitStream sent = BitStream::from_bytes(frame.payload);

    RngStream noise(cfg.link.seed, 1);
    Waveform tx = rasterize(encode(frame.bits(), cfg.link), cfg.link.sample_rate(), cfg.link.led_peak_power);
    tx = pad_waveform(tx, 64, 32);
    const Waveform rxw = end_to_end(tx, cfg.tissue, cfg.receiver, noise);
    BitStream decoded = decode(rxw, cfg.link);

    const std::size_t off = locate_prefix(decoded, cfg.link.prefix_pattern);
    REQUIRE(extract_payload(decoded, off, sent.size()).hamming_distance(sent) == 0);

    RngStream pick(9, 9);
    for (std::uint64_t k : {1ull, 7ull, 100ull}) {
        BitStream corrupted = decoded;
        std::set<std::size_t> positions;
        while (positions.size() < k)
            positions.insert(off + kPrefixBits + pick.next_u64() % sent.size());
        for (std::size_t pos : positions) corrupted.flip(pos);
        REQUIRE(extract_payload(corrupted, off, sent.size()).hamming_distance(sent) == k);
    }
}

TEST_CASE("reports are identical across thread counts", "[harness]") {
    SimConfig cfg = default_sim_config();  // noisy calibration
    cfg.link.payload_len = 64;
    const BerReport a = run_link(cfg.link, cfg.tissue, cfg.receiver, 12, 1);
    const BerReport b = run_link(cfg.link, cfg.tissue, cfg.receiver, 12, 4);
    const BerReport c = run_link(cfg.link, cfg.tissue, cfg.receiver, 12, 3);
    REQUIRE(a.bits_compared == b.bits_compared);
    REQUIRE(a.bit_errors == b.bit_errors);
    REQUIRE(a.sync_failures == b.sync_failures);
    REQUIRE(a.ber == b.ber);
    REQUIRE(a.ber_upper_95 == b.ber_upper_95);
    REQUIRE(a.bits_compared == c.bits_compared);
    REQUIRE(a.bit_errors == c.bit_errors);
}

TEST_CASE("higher noise never lowers measured BER (two-point smoke)", "[harness]") {
    SimConfig cfg = default_sim_config();
    cfg.link.seed = 77;
    const BerReport quiet = run_link(cfg.link, cfg.tissue, cfg.receiver, 30, 0);
    cfg.receiver.thermal_noise_vrms = 0.040;
    const BerReport loud = run_link(cfg.link, cfg.tissue, cfg.receiver, 30, 0);
    REQUIRE(quiet.bit_errors == 0);
    REQUIRE(loud.ber >= quiet.ber);
}

TEST_CASE("sweep: row integrity, determinism, csv shape", "[harness]") {
    const SimConfig cfg = noiseless_config();
    const BenchRow rows[] = {kBenchTable[3], kBenchTable[3], kBenchTable[5]};  // duplicate + pdm
    const auto results = sweep(rows, cfg.link, cfg.receiver, 2, 1);
    REQUIRE(results.size() == 3);
    for (const auto& r : results) {
        REQUIRE(r.error.empty());
        REQUIRE(r.report.frames_sent == 2);
        REQUIRE(r.report.bit_errors == 0);
        REQUIRE(r.report.sync_failures == 0);
    }
    // duplicated rows give byte-identical counters
    REQUIRE(results[0].report.bits_compared == results[1].report.bits_compared);
    REQUIRE(results[0].report.ber == results[1].report.ber);
    REQUIRE(results[0].nj_per_bit == Catch::Approx(0.54));

    std::ostringstream csv;
    write_sweep_csv(csv, results);
    std::istringstream lines(csv.str());
    std::string header;
    std::getline(lines, header);
    REQUIRE(header == kSweepCsvHeader);
    int data_lines = 0;
    for (std::string line; std::getline(lines, line);) ++data_lines;
    REQUIRE(data_lines == 3);

    std::ostringstream empty_csv;
    write_sweep_csv(empty_csv, {});
    REQUIRE(empty_csv.str() == std::string(kSweepCsvHeader) + "\n");
}

TEST_CASE("throughput gate: at least 1e6 modulated+decoded bits per second", "[harness]") {
    const SimConfig cfg = noiseless_config();
    const std::uint64_t frames = 300;
    const BerReport rep = run_link(cfg.link, cfg.tissue, cfg.receiver, frames, 0);
    REQUIRE(rep.bit_errors == 0);
    const double bits = static_cast<double>(rep.bits_compared);
    REQUIRE(bits / rep.wall_seconds >= 1e6);
}
