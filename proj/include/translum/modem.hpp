#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "translum/bitstream.hpp"
#include "translum/errors.hpp"
#include "translum/link_config.hpp"

namespace translum {

struct Pulse {
    double start;      // s
    double width;      // s
    double amplitude;  // normalized 0..1
};

/// Symbol-level description of an on-off keyed optical signal.
struct PulseTrain {
    double symbol_period = 0.0;  // s
    double duration = 0.0;       // s, covers trailing empty slots
    std::vector<Pulse> pulses;   // time-ordered, non-overlapping
};

enum class SignalUnit { OpticalWatts, Volts };

/// Uniformly sampled realization of a signal.
struct Waveform {
    double sample_rate = 0.0;  // Hz
    std::vector<double> samples;
    SignalUnit unit = SignalUnit::OpticalWatts;

    double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
};

struct DecodeParams {
    int window_symbols = 64;    // sliding threshold window length
    double noise_floor = 1e-9;  // below this swing a window counts as flat
};

struct ClockEstimate {
    double symbol_period;  // s
    double phase;          // s, start of symbol slot 0
};

// ---------------------------------------------------------------------------
// Encoding
// ---------------------------------------------------------------------------

/// One pulse per bit, rising edge at symbol start; width 0.25T for 0, 0.75T for 1.
inline PulseTrain pwm_encode(const BitStream& bits, const LinkConfig& cfg) {
    const double T = cfg.symbol_period();
    PulseTrain train{T, static_cast<double>(bits.size()) * T, {}};
    train.pulses.reserve(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i)
        train.pulses.push_back({static_cast<double>(i) * T, (bits[i] ? 0.75 : 0.25) * T, 1.0});
    return train;
}

/// Presence coding: bit 1 is a 0.2T pulse centered in its slot, bit 0 is silence.
inline PulseTrain pdm_encode(const BitStream& bits, const LinkConfig& cfg) {
    const double T = cfg.symbol_period();
    PulseTrain train{T, static_cast<double>(bits.size()) * T, {}};
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) train.pulses.push_back({static_cast<double>(i) * T + 0.4 * T, 0.2 * T, 1.0});
    return train;
}

inline PulseTrain encode(const BitStream& bits, const LinkConfig& cfg) {
    return cfg.modulation == Modulation::PWM ? pwm_encode(bits, cfg) : pdm_encode(bits, cfg);
}

// ---------------------------------------------------------------------------
// Rasterization
// ---------------------------------------------------------------------------

/// Sample instants k/fs; a sample inside [start, start+width) takes the pulse level.
inline Waveform rasterize(const PulseTrain& train, double sample_rate, double peak_power) {
    double min_width = std::numeric_limits<double>::infinity();
    double last_end = train.duration;
    for (const Pulse& p : train.pulses) {
        min_width = std::min(min_width, p.width);
        last_end = std::max(last_end, p.start + p.width);
    }
    if (!train.pulses.empty() && sample_rate < (4.0 / min_width) * (1.0 - 1e-12))
        throw std::invalid_argument("rasterize: sample_rate below 4 samples per narrowest pulse");

    const auto n = static_cast<std::size_t>(std::ceil(last_end * sample_rate - 1e-9));
    Waveform w{sample_rate, std::vector<double>(n, 0.0), SignalUnit::OpticalWatts};
    for (const Pulse& p : train.pulses) {
        auto a = static_cast<std::ptrdiff_t>(std::ceil(p.start * sample_rate - 1e-9));
        auto b = static_cast<std::ptrdiff_t>(std::ceil((p.start + p.width) * sample_rate - 1e-9));
        a = std::max<std::ptrdiff_t>(a, 0);
        b = std::min<std::ptrdiff_t>(b, static_cast<std::ptrdiff_t>(n));
        for (std::ptrdiff_t k = a; k < b; ++k) w.samples[static_cast<std::size_t>(k)] = peak_power * p.amplitude;
    }
    return w;
}

/// Prepend/append idle samples (transmitter silence before and after a frame).
inline Waveform pad_waveform(const Waveform& w, std::size_t lead, std::size_t tail) {
    Waveform out{w.sample_rate, {}, w.unit};
    out.samples.resize(lead + w.samples.size() + tail, 0.0);
    std::copy(w.samples.begin(), w.samples.end(), out.samples.begin() + static_cast<std::ptrdiff_t>(lead));
    return out;
}

// ---------------------------------------------------------------------------
// Adaptive threshold
// ---------------------------------------------------------------------------

/// Midpoint of min and max over one window. Flat windows carry no signal.
inline double adaptive_threshold(std::span<const double> window, double noise_floor = 1e-9) {
    if (window.empty()) throw std::invalid_argument("adaptive_threshold: empty window");
    auto [lo_it, hi_it] = std::minmax_element(window.begin(), window.end());
    if (*hi_it - *lo_it <= noise_floor) throw no_signal_error("adaptive_threshold: flat window");
    return 0.5 * (*lo_it + *hi_it);
}

namespace detail {

/**
 * Per-sample midpoint of rolling min/max over a centered window, quantized to
 * blocks of `stride` samples (one symbol): block extrema first, then a
 * sliding min/max over blocks. Window reach is `half` samples either side,
 * clamped at the ends.
 */
inline std::vector<double> rolling_midpoint(const std::vector<double>& v, std::ptrdiff_t half,
                                            std::ptrdiff_t stride = 1) {
    const auto n = static_cast<std::ptrdiff_t>(v.size());
    stride = std::max<std::ptrdiff_t>(stride, 1);
    const std::ptrdiff_t nb = (n + stride - 1) / stride;
    std::vector<double> bmin(static_cast<std::size_t>(nb)), bmax(static_cast<std::size_t>(nb));
    for (std::ptrdiff_t b = 0; b < nb; ++b) {
        const std::ptrdiff_t lo = b * stride;
        const std::ptrdiff_t hi = std::min(n, lo + stride);
        double mn = v[static_cast<std::size_t>(lo)], mx = mn;
        for (std::ptrdiff_t k = lo + 1; k < hi; ++k) {
            const double s = v[static_cast<std::size_t>(k)];
            mn = std::min(mn, s);
            mx = std::max(mx, s);
        }
        bmin[static_cast<std::size_t>(b)] = mn;
        bmax[static_cast<std::size_t>(b)] = mx;
    }

    const std::ptrdiff_t hb = std::max<std::ptrdiff_t>(1, (half + stride - 1) / stride);
    std::vector<double> mid(v.size());
    std::vector<std::ptrdiff_t> qmin(static_cast<std::size_t>(nb)), qmax(static_cast<std::size_t>(nb));
    std::ptrdiff_t min_h = 0, min_t = 0, max_h = 0, max_t = 0;  // [h, t) index queues
    std::ptrdiff_t next = 0;
    for (std::ptrdiff_t b = 0; b < nb; ++b) {
        const std::ptrdiff_t hi = std::min(nb - 1, b + hb);
        while (next <= hi) {
            while (min_t > min_h &&
                   bmin[static_cast<std::size_t>(qmin[static_cast<std::size_t>(min_t - 1)])] >=
                       bmin[static_cast<std::size_t>(next)])
                --min_t;
            qmin[static_cast<std::size_t>(min_t++)] = next;
            while (max_t > max_h &&
                   bmax[static_cast<std::size_t>(qmax[static_cast<std::size_t>(max_t - 1)])] <=
                       bmax[static_cast<std::size_t>(next)])
                --max_t;
            qmax[static_cast<std::size_t>(max_t++)] = next;
            ++next;
        }
        const std::ptrdiff_t lo = b - hb;
        while (min_h < min_t && qmin[static_cast<std::size_t>(min_h)] < lo) ++min_h;
        while (max_h < max_t && qmax[static_cast<std::size_t>(max_h)] < lo) ++max_h;
        const double thr =
            0.5 * (bmin[static_cast<std::size_t>(qmin[static_cast<std::size_t>(min_h)])] +
                   bmax[static_cast<std::size_t>(qmax[static_cast<std::size_t>(max_h)])]);
        const std::ptrdiff_t fill_hi = std::min(n, (b + 1) * stride);
        for (std::ptrdiff_t k = b * stride; k < fill_hi; ++k) mid[static_cast<std::size_t>(k)] = thr;
    }
    return mid;
}

struct EdgeList {
    std::vector<double> rising;   // interpolated crossing times, s
    std::vector<double> falling;
};

struct SignalFront {
    std::vector<double> threshold;  // per-sample decision threshold
    EdgeList edges;
};

inline SignalFront analyze_front(const Waveform& w, const LinkConfig& cfg, const DecodeParams& p) {
    if (w.samples.size() < 2) throw no_signal_error("decode: capture too short");
    const auto [lo_it, hi_it] = std::minmax_element(w.samples.begin(), w.samples.end());
    if (*hi_it - *lo_it <= p.noise_floor) throw no_signal_error("decode: flat capture, no signal");

    const double spb = w.sample_rate / cfg.data_rate;  // samples per symbol
    const auto half = static_cast<std::ptrdiff_t>(std::llround(0.5 * p.window_symbols * spb));
    SignalFront front;
    front.threshold = rolling_midpoint(w.samples, std::max<std::ptrdiff_t>(half, 2),
                                       static_cast<std::ptrdiff_t>(std::llround(spb)));

    const double dt = 1.0 / w.sample_rate;
    const auto& v = w.samples;
    for (std::size_t k = 1; k < v.size(); ++k) {
        const double thr = front.threshold[k];
        if (v[k - 1] < thr && v[k] >= thr) {
            const double frac = (thr - v[k - 1]) / (v[k] - v[k - 1]);
            front.edges.rising.push_back((static_cast<double>(k - 1) + frac) * dt);
        } else if (v[k - 1] >= thr && v[k] < thr) {
            const double frac = (v[k - 1] - thr) / (v[k - 1] - v[k]);
            front.edges.falling.push_back((static_cast<double>(k - 1) + frac) * dt);
        }
    }
    return front;
}

/// Symbol period from rising-edge spacings: the median per-spacing period in
/// the prefix region seeds the estimate (robust to stray crossings), then a
/// least-squares fit over all edges refines it, with one outlier-rejection
/// pass. Phase is the fitted time of symbol index 0.
inline ClockEstimate clock_from_edges(const std::vector<double>& rising, const LinkConfig& cfg) {
    if (rising.size() < 4) throw no_signal_error("clock_recover: fewer than 4 rising edges");
    const double t_nom = cfg.symbol_period();

    const double prefix_end = rising.front() + 48.0 * t_nom;
    std::vector<double> spacing_periods;
    for (std::size_t i = 1; i < rising.size(); ++i) {
        if (rising[i] > prefix_end && spacing_periods.size() >= 4) break;
        const double d = rising[i] - rising[i - 1];
        const auto k = std::llround(d / t_nom);
        if (k < 1) continue;
        spacing_periods.push_back(d / static_cast<double>(k));
    }
    double period = t_nom;
    if (!spacing_periods.empty()) {
        auto mid = spacing_periods.begin() + static_cast<std::ptrdiff_t>(spacing_periods.size() / 2);
        std::nth_element(spacing_periods.begin(), mid, spacing_periods.end());
        period = *mid;
    }
    if (!(period > 0.5 * t_nom && period < 2.0 * t_nom)) period = t_nom;

    // Regress edge time on assigned symbol index over a growing horizon: each
    // fit extends only as far as the current estimate can index symbols
    // unambiguously, so edge jitter cannot alias the assignments. Passes after
    // the first drop edges far off the fitted grid.
    double phase = rising.front();
    int pass = 0;
    for (double horizon = 48.0;; horizon *= 4.0) {
        const double t_max = phase + horizon * period;
        double sn = 0, st = 0, snn = 0, snt = 0, m = 0;
        for (const double t : rising) {
            if (t > t_max) break;
            const double idx = std::round((t - phase) / period);
            if (pass > 0 && std::abs(t - (phase + idx * period)) > 0.25 * period) continue;
            sn += idx;
            st += t;
            snn += idx * idx;
            snt += idx * t;
            m += 1.0;
        }
        const double det = m * snn - sn * sn;
        if (det > 0 && m >= 2) {
            const double slope = (m * snt - sn * st) / det;
            const double intercept = (st - slope * sn) / m;
            if (slope > 0.5 * t_nom && slope < 2.0 * t_nom) {
                period = slope;
                phase = intercept;
            }
        }
        ++pass;
        if (t_max >= rising.back() || horizon > 1e7) break;
    }
    return {period, phase};
}

/// Decoder-side clock: estimated when enough edges exist, else the nominal
/// symbol clock anchored on the first detected pulse.
inline ClockEstimate clock_or_nominal(const std::vector<double>& rising, const LinkConfig& cfg) {
    if (rising.empty()) throw no_signal_error("decode: no pulses in capture");
    if (rising.size() >= 4) return clock_from_edges(rising, cfg);
    return {cfg.symbol_period(), rising.front()};
}

}  // namespace detail

/**
 * Symbol period and slot-0 start estimated from rising-edge spacings.
 * Noiseless estimates are accurate to well under 100 ppm and track clock
 * skew of the same order.
 */
inline ClockEstimate clock_recover(const Waveform& w, const LinkConfig& cfg,
                                   const DecodeParams& params = {}) {
    const auto front = detail::analyze_front(w, cfg, params);
    ClockEstimate est = detail::clock_from_edges(front.edges.rising, cfg);
    if (cfg.modulation == Modulation::PDM) est.phase -= 0.4 * est.symbol_period;  // pulse leads slot by 0.4T
    return est;
}

/// Duty-cycle labeling: fraction of window samples above threshold, >= 0.5 -> 1.
inline BitStream pwm_decode(const Waveform& w, const LinkConfig& cfg, const DecodeParams& params = {}) {
    const auto front = detail::analyze_front(w, cfg, params);
    const ClockEstimate clk = detail::clock_or_nominal(front.edges.rising, cfg);

    const double fs = w.sample_rate;
    const auto n = static_cast<std::ptrdiff_t>(w.samples.size());
    const auto n_sym = static_cast<std::ptrdiff_t>(
        std::floor((w.duration() - clk.phase) / clk.symbol_period + 1e-9));
    if (n_sym < 1) throw no_signal_error("pwm_decode: no full symbol in capture");

    BitStream bits;
    for (std::ptrdiff_t i = 0; i < n_sym; ++i) {
        const double ta = clk.phase + static_cast<double>(i) * clk.symbol_period;
        const double tb = ta + clk.symbol_period;
        auto a = static_cast<std::ptrdiff_t>(std::ceil(ta * fs - 1e-9));
        auto b = static_cast<std::ptrdiff_t>(std::ceil(tb * fs - 1e-9));
        a = std::max<std::ptrdiff_t>(a, 0);
        b = std::min(b, n);
        if (b <= a) {
            bits.push_back(0);
            continue;
        }
        std::ptrdiff_t above = 0;
        for (std::ptrdiff_t k = a; k < b; ++k)
            if (w.samples[static_cast<std::size_t>(k)] >= front.threshold[static_cast<std::size_t>(k)])
                ++above;
        const double duty = static_cast<double>(above) / static_cast<double>(b - a);
        bits.push_back(duty >= 0.5 ? 1 : 0);
    }
    return bits;
}

/// Peak search: each pulse is marked at its center and quantized to a slot.
inline BitStream pdm_decode(const Waveform& w, const LinkConfig& cfg, const DecodeParams& params = {}) {
    const auto front = detail::analyze_front(w, cfg, params);
    ClockEstimate clk = detail::clock_or_nominal(front.edges.rising, cfg);
    clk.phase -= 0.4 * clk.symbol_period;

    const auto n_sym = static_cast<std::ptrdiff_t>(
        std::floor((w.duration() - clk.phase) / clk.symbol_period + 1e-9));
    if (n_sym < 1) throw no_signal_error("pdm_decode: no full symbol in capture");

    BitStream bits(static_cast<std::size_t>(n_sym), 0);
    std::size_t fall_i = 0;
    for (const double rise : front.edges.rising) {
        while (fall_i < front.edges.falling.size() && front.edges.falling[fall_i] <= rise) ++fall_i;
        if (fall_i >= front.edges.falling.size()) break;  // capture ends mid-pulse
        const double center = 0.5 * (rise + front.edges.falling[fall_i]);
        const auto slot = static_cast<std::ptrdiff_t>(std::floor((center - clk.phase) / clk.symbol_period));
        if (slot >= 0 && slot < n_sym) bits.set(static_cast<std::size_t>(slot), 1);
    }
    return bits;
}

inline BitStream decode(const Waveform& w, const LinkConfig& cfg, const DecodeParams& params = {}) {
    return cfg.modulation == Modulation::PWM ? pwm_decode(w, cfg, params) : pdm_decode(w, cfg, params);
}

}  // namespace translum
