#pragma once

#include <cstdint>
#include <string>

#include "translum/errors.hpp"

namespace translum {

enum class Modulation { PWM, PDM };

inline const char* to_string(Modulation m) { return m == Modulation::PWM ? "pwm" : "pdm"; }

inline Modulation modulation_from_string(const std::string& s) {
    if (s == "pwm" || s == "PWM") return Modulation::PWM;
    if (s == "pdm" || s == "PDM") return Modulation::PDM;
    throw config_error("unknown modulation '" + s + "' (expected pwm or pdm)");
}

/**
 * Per-run link parameters. All quantities SI; config files may carry unit
 * suffixes which are converted at parse time.
 */
struct LinkConfig {
    double data_rate = 5e6;          // bit/s
    Modulation modulation = Modulation::PWM;
    int oversampling = 16;           // samples per symbol
    double led_peak_power = 2e-3;    // W optical
    std::uint8_t prefix_pattern = 0xA5;
    std::uint32_t payload_len = 190; // bytes
    std::uint64_t seed = 42;

    double symbol_period() const { return 1.0 / data_rate; }
    double sample_rate() const { return data_rate * oversampling; }

    void validate() const {
        if (!(data_rate > 0)) throw config_error("link.data_rate must be > 0");
        if (oversampling < 4) throw config_error("link.oversampling must be >= 4");
        if (payload_len < 1) throw config_error("link.payload_len must be >= 1");
        if (!(led_peak_power >= 0)) throw config_error("link.led_peak_power must be >= 0");
    }
};

}  // namespace translum
