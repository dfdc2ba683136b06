#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "translum/errors.hpp"
#include "translum/modem.hpp"
#include "translum/rng.hpp"

namespace translum {

inline constexpr double kElementaryCharge = 1.602176634e-19;  // C

struct TissueLayer {
    std::string name;
    double thickness_mm = 0.0;
    double mu_eff_per_mm = 0.0;          // effective attenuation at 810 nm
    double interface_reflectance = 0.0;  // fraction lost at the entry interface
};

/// Layered optical path, implant side first, plus lumped aperture coupling.
struct TissueStack {
    std::vector<TissueLayer> layers;
    double geometry_gain = 1.0;  // emission-angle / lens coupling, (0, 1]

    /// Beer-Lambert transmission with lumped interface reflectances.
    double transmission() const {
        double t = geometry_gain;
        for (const TissueLayer& l : layers)
            t *= (1.0 - l.interface_reflectance) * std::exp(-l.mu_eff_per_mm * l.thickness_mm);
        return t;
    }
};

// Bench-calibrated 810 nm coefficients (mm^-1); absolute tissue optics are a
// calibration input, not a prediction.
inline constexpr double kMuSkin = 0.25;
inline constexpr double kMuBone = 0.35;
inline constexpr double kInterfaceReflectance = 0.02;
inline constexpr double kGeometryGain = 0.04;

/// Named bench presets: bone5_skin7, bone8_skin7, bone10_skin7.
inline TissueStack tissue_preset(std::string_view name) {
    double bone_mm = 0.0;
    if (name == "bone5_skin7") bone_mm = 5.0;
    else if (name == "bone8_skin7") bone_mm = 8.0;
    else if (name == "bone10_skin7") bone_mm = 10.0;
    else throw config_error("unknown tissue preset '" + std::string(name) + "'");
    return TissueStack{{{"bone", bone_mm, kMuBone, kInterfaceReflectance},
                        {"skin", 7.0, kMuSkin, kInterfaceReflectance}},
                       kGeometryGain};
}

/// APD + TIA + ADC receiver front end.
struct RxModel {
    double responsivity = 0.5;        // A/W
    double apd_gain = 50.0;           // avalanche multiplication M
    double tia_gain = 1e4;            // V/A
    double bandwidth = 10e6;          // Hz, single-pole low-pass
    double thermal_noise_vrms = 2e-3; // V
    bool shot_noise = true;
    double ambient_lux = 200.0;
    double lux_to_power = 5e-9;       // W reaching the detector per lux
    double flicker_rel = 0.1;         // 100 Hz mains flicker, relative amplitude
    int adc_bits = 12;
    double adc_fs = 1.0;              // V full scale
    double adc_rate = 0.0;            // Hz; 0 keeps the analog sample rate
};

inline constexpr double kFlickerHz = 100.0;

// ---------------------------------------------------------------------------
// Signal path
// ---------------------------------------------------------------------------

/// Linear, memoryless tissue attenuation.
inline Waveform propagate(const Waveform& tx, const TissueStack& stack) {
    Waveform out{tx.sample_rate, tx.samples, SignalUnit::OpticalWatts};
    const double t = stack.transmission();
    for (double& s : out.samples) s *= t;
    return out;
}

/// Ambient light at the detector: DC from lux plus 100 Hz flicker.
inline Waveform ambient(double duration, double sample_rate, const RxModel& rx) {
    if (!(duration > 0)) throw std::invalid_argument("ambient: duration must be > 0");
    const auto n = static_cast<std::size_t>(std::ceil(duration * sample_rate - 1e-9));
    Waveform w{sample_rate, std::vector<double>(n), SignalUnit::OpticalWatts};
    const double dc = rx.ambient_lux * rx.lux_to_power;
    if (dc == 0.0) return w;
    if (rx.flicker_rel == 0.0) {
        for (double& s : w.samples) s = dc;
        return w;
    }
    // sin via incremental rotation, no per-sample trig
    const double dphi = 2.0 * std::numbers::pi * kFlickerHz / sample_rate;
    const double cd = std::cos(dphi), sd = std::sin(dphi);
    double c = 1.0, s = 0.0;
    for (double& out : w.samples) {
        out = dc * (1.0 + rx.flicker_rel * s);
        const double c2 = c * cd - s * sd;
        s = s * cd + c * sd;
        c = c2;
    }
    return w;
}

/**
 * APD photocurrent with optional shot noise, transimpedance conversion,
 * single-pole low-pass at the receiver bandwidth, then thermal noise.
 * Shot noise per sample is Gaussian with variance 2 q I B.
 */
inline Waveform apd_tia(const Waveform& optical, const RxModel& rx, RngStream& rng) {
    Waveform out{optical.sample_rate, std::vector<double>(optical.samples.size()), SignalUnit::Volts};
    const double gain_i = rx.responsivity * rx.apd_gain;        // A per W
    const double shot_k = 2.0 * kElementaryCharge * rx.bandwidth;
    const double alpha = 1.0 - std::exp(-2.0 * std::numbers::pi * rx.bandwidth / optical.sample_rate);
    const bool noisy = rx.shot_noise || rx.thermal_noise_vrms > 0.0;

    // receiver has been powered long before the capture starts
    double y = optical.samples.empty() ? 0.0 : rx.tia_gain * gain_i * optical.samples.front();
    if (!noisy) {
        for (std::size_t k = 0; k < optical.samples.size(); ++k) {
            const double v = rx.tia_gain * gain_i * optical.samples[k];
            y += alpha * (v - y);
            out.samples[k] = y;
        }
        return out;
    }
    for (std::size_t k = 0; k < optical.samples.size(); ++k) {
        double i = gain_i * optical.samples[k];
        if (rx.shot_noise && i > 0.0) i += rng.next_gaussian() * std::sqrt(shot_k * i);
        const double v = rx.tia_gain * i;
        y += alpha * (v - y);
        out.samples[k] = y + (rx.thermal_noise_vrms > 0.0 ? rng.next_gaussian() * rx.thermal_noise_vrms : 0.0);
    }
    return out;
}

/// Decimate to the ADC rate, clip to [0, fs], quantize to the ADC lattice.
inline Waveform adc_sample(const Waveform& analog, const RxModel& rx) {
    double rate = rx.adc_rate > 0.0 ? rx.adc_rate : analog.sample_rate;
    if (rate > analog.sample_rate * (1.0 + 1e-12))
        throw config_error("adc_sample: adc_rate exceeds analog sample rate");
    const double ratio = analog.sample_rate / rate;
    const auto stride = static_cast<std::size_t>(std::llround(ratio));
    if (std::abs(ratio - static_cast<double>(stride)) > 1e-9)
        throw config_error("adc_sample: analog rate must be an integer multiple of adc_rate");

    const double step = rx.adc_fs / static_cast<double>(1u << rx.adc_bits);
    Waveform out{analog.sample_rate / static_cast<double>(stride), {}, SignalUnit::Volts};
    out.samples.reserve(analog.samples.size() / stride + 1);
    for (std::size_t k = 0; k < analog.samples.size(); k += stride) {
        double v = std::clamp(analog.samples[k], 0.0, rx.adc_fs);
        out.samples.push_back(std::round(v / step) * step);
    }
    return out;
}

/// Full physical path: tissue, ambient light, APD/TIA, ADC.
inline Waveform end_to_end(const Waveform& tx, const TissueStack& stack, const RxModel& rx,
                           RngStream& rng) {
    Waveform rxw = propagate(tx, stack);
    const Waveform amb = ambient(rxw.duration(), rxw.sample_rate, rx);
    for (std::size_t k = 0; k < rxw.samples.size() && k < amb.samples.size(); ++k)
        rxw.samples[k] += amb.samples[k];
    return adc_sample(apd_tia(rxw, rx, rng), rx);
}

/// Electrical SNR of the pulse swing against shot + thermal noise, dB.
inline double rx_snr_db(double rx_peak_optical_w, const RxModel& rx) {
    const double i_sig = rx.responsivity * rx.apd_gain * rx_peak_optical_w;
    const double i_amb = rx.responsivity * rx.apd_gain * rx.ambient_lux * rx.lux_to_power;
    const double v_sig = rx.tia_gain * i_sig;
    const double shot_var = rx.shot_noise
        ? 2.0 * kElementaryCharge * (i_sig + i_amb) * rx.bandwidth * rx.tia_gain * rx.tia_gain
        : 0.0;
    const double noise = std::sqrt(shot_var + rx.thermal_noise_vrms * rx.thermal_noise_vrms);
    if (noise == 0.0) return std::numeric_limits<double>::infinity();
    return 20.0 * std::log10(v_sig / noise);
}

}  // namespace translum
