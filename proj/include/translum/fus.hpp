#pragma once

#include <cmath>
#include <numbers>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "translum/errors.hpp"

namespace translum {

struct AcousticLayer {
    std::string name;
    double thickness_mm = 0.0;
    double attenuation_db_cm_mhz = 0.0;  // amplitude attenuation slope
    double impedance_mrayl = 1.5;
    double thermal_resistance = 0.0;     // degC per W/m^2 absorbed in this layer
};

/// Source-side-first layered transmission path for the focused beam.
struct AcousticPath {
    std::vector<AcousticLayer> layers;
    double focal_gain = 1.0;  // >= 1
    double f = 1e6;           // Hz
    double p0 = 30e3;         // Pa source pressure
};

struct PiezoElement {
    double area_mm2 = 2.0;
    double clamped_capacitance = 1e-9;  // F
    double coupling_k = 0.3;            // (0, 1)
    double resonance_f = 1e6;           // Hz
    double quality_q = 20.0;
    double orientation_deg = 0.0;       // from beam axis
    double voltage_scale = 1.0;         // V per (Pa * m^2), calibration constant
};

struct SafetyLimits {
    double p0_max = 30e3;  // Pa
    double dt_max = 2.0;   // degC
};

// ---------------------------------------------------------------------------
// Acoustic transmission
// ---------------------------------------------------------------------------

/// Plane-wave pressure transmission 2 Z2 / (Z1 + Z2).
inline double pressure_transmission(double z1_mrayl, double z2_mrayl) {
    return 2.0 * z2_mrayl / (z1_mrayl + z2_mrayl);
}

/**
 * Focal pressure: source pressure times focal gain, interface transmission at
 * each layer boundary, and amplitude attenuation 10^(-att*d_cm*f_MHz/20) per
 * layer.
 */
inline double focal_pressure(const AcousticPath& path) {
    const double f_mhz = path.f * 1e-6;
    double p = path.p0 * path.focal_gain;
    for (std::size_t i = 0; i < path.layers.size(); ++i) {
        const AcousticLayer& l = path.layers[i];
        p *= std::pow(10.0, -l.attenuation_db_cm_mhz * (l.thickness_mm * 0.1) * f_mhz / 20.0);
        if (i + 1 < path.layers.size())
            p *= pressure_transmission(l.impedance_mrayl, path.layers[i + 1].impedance_mrayl);
    }
    return p;
}

/// Intensity projection factor for an element tilted off the beam axis.
inline double orientation_factor(double theta_deg, double exponent = 2.0) {
    if (!(theta_deg >= 0.0 && theta_deg <= 90.0))
        throw std::invalid_argument("orientation_factor: theta must be in [0, 90] degrees");
    return std::pow(std::cos(theta_deg * std::numbers::pi / 180.0), exponent);
}

// ---------------------------------------------------------------------------
// Lumped harvester
// ---------------------------------------------------------------------------

/// Load maximizing delivered power from the capacitive source: 1 / (2 pi f C0).
inline double optimal_load(const PiezoElement& elem, double f_hz) {
    if (!(f_hz > 0)) throw std::invalid_argument("optimal_load: frequency must be > 0");
    return 1.0 / (2.0 * std::numbers::pi * f_hz * elem.clamped_capacitance);
}

/**
 * Delivered power of a lumped harvester. Open-circuit voltage is linear in
 * pressure with a Lorentzian resonance (center resonance_f, FWHM
 * resonance_f / quality_q); the clamped capacitance in series with the load
 * gives P = Voc^2 r / (r^2 + Xc^2) / 2. Quadratic in pressure.
 */
inline double piezo_power(double p_pa, const PiezoElement& elem, double f_hz, double r_load_ohm) {
    if (!(p_pa >= 0)) throw std::invalid_argument("piezo_power: pressure must be >= 0");
    if (!(r_load_ohm > 0)) throw std::invalid_argument("piezo_power: load must be > 0");
    const double detune = 2.0 * elem.quality_q * (f_hz - elem.resonance_f) / elem.resonance_f;
    const double lorentz = 1.0 / (1.0 + detune * detune);
    const double cos_theta = std::cos(elem.orientation_deg * std::numbers::pi / 180.0);
    const double v_oc = elem.coupling_k * p_pa * cos_theta * (elem.area_mm2 * 1e-6) *
                        elem.voltage_scale * std::sqrt(lorentz);
    const double xc = 1.0 / (2.0 * std::numbers::pi * f_hz * elem.clamped_capacitance);
    return 0.5 * v_oc * v_oc * r_load_ohm / (r_load_ohm * r_load_ohm + xc * xc);
}

// ---------------------------------------------------------------------------
// Defaults and calibration
// ---------------------------------------------------------------------------

/// Scalp / skull / brain at 1 MHz, 30 kPa source pressure.
inline AcousticPath default_path() {
    AcousticPath path;
    path.layers = {
        {"scalp", 5.0, 0.54, 1.50, 4e-5},
        {"skull", 7.0, 6.90, 7.80, 1.7581e-2},  // thermal resistance calibrated: 1.8 degC at 30 kPa / 1 MHz
        {"brain", 30.0, 0.60, 1.56, 5e-5},
    };
    path.focal_gain = 8.0;
    path.f = 1e6;
    path.p0 = 30e3;
    return path;
}

/**
 * Harvester element calibrated so that at the default path's focal pressure,
 * on resonance and into the optimal load, it delivers exactly 3.0 mW.
 */
inline PiezoElement default_element() {
    PiezoElement elem;
    AcousticPath path = default_path();
    path.f = elem.resonance_f;
    const double p = focal_pressure(path);
    const double uncal = piezo_power(p, elem, elem.resonance_f, optimal_load(elem, elem.resonance_f));
    elem.voltage_scale = std::sqrt(3.0e-3 / uncal);
    return elem;
}

/// Stent-mounted array: identical calibrated elements at increasing tilt.
inline std::vector<PiezoElement> six_element_preset() {
    static constexpr double kOrientations[6] = {0.0, 18.0, 33.0, 48.0, 64.0, 75.0};
    std::vector<PiezoElement> elems(6, default_element());
    for (int i = 0; i < 6; ++i) elems[static_cast<std::size_t>(i)].orientation_deg = kOrientations[i];
    return elems;
}

/// Shared load used when per-element tuning is off.
inline constexpr double kUntunedLoadOhm = 1000.0;

struct ArrayPower {
    std::vector<double> per_element_w;
    double total_w = 0.0;
};

/**
 * Total harvest of an element array at the focus. With per-element tuning the
 * beam is retuned to each element's resonance and each load is matched;
 * without it every element sees the path's configured frequency and a common
 * untuned load.
 */
inline ArrayPower array_power(std::span<const PiezoElement> elements, const AcousticPath& path,
                              bool per_element_tuning) {
    if (elements.empty()) throw std::invalid_argument("array_power: element list must be non-empty");
    ArrayPower out;
    out.per_element_w.reserve(elements.size());
    for (const PiezoElement& elem : elements) {
        double p_w;
        if (per_element_tuning) {
            AcousticPath tuned = path;
            tuned.f = elem.resonance_f;
            p_w = piezo_power(focal_pressure(tuned), elem, elem.resonance_f,
                              optimal_load(elem, elem.resonance_f));
        } else {
            p_w = piezo_power(focal_pressure(path), elem, path.f, kUntunedLoadOhm);
        }
        out.per_element_w.push_back(p_w);
        out.total_w += p_w;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Thermal safety
// ---------------------------------------------------------------------------

/**
 * Steady-state temperature rise at the hottest layer. Plane-wave intensity
 * P0^2 / (2 Z) enters the first layer; each layer absorbs
 * I (1 - 10^(-att*d_cm*f_MHz/10)) and converts it through its thermal
 * resistance. Quadratic in P0.
 */
inline double thermal_estimate(const AcousticPath& path) {
    const double f_mhz = path.f * 1e-6;
    if (path.layers.empty()) return 0.0;
    double intensity = path.p0 * path.p0 / (2.0 * path.layers.front().impedance_mrayl * 1e6);
    double hottest = 0.0;
    for (std::size_t i = 0; i < path.layers.size(); ++i) {
        const AcousticLayer& l = path.layers[i];
        const double through = std::pow(10.0, -l.attenuation_db_cm_mhz * (l.thickness_mm * 0.1) * f_mhz / 10.0);
        hottest = std::max(hottest, l.thermal_resistance * intensity * (1.0 - through));
        intensity *= through;
        if (i + 1 < path.layers.size()) {
            const double tp = pressure_transmission(l.impedance_mrayl, path.layers[i + 1].impedance_mrayl);
            intensity *= tp * tp * l.impedance_mrayl / path.layers[i + 1].impedance_mrayl;
        }
    }
    return hottest;
}

/// Throws safety_violation naming every violated limit; returns the path when safe.
inline const AcousticPath& safety_gate(const AcousticPath& path, const SafetyLimits& limits) {
    std::vector<std::string> violated;
    if (path.p0 > limits.p0_max)
        violated.push_back("pressure: P0 " + std::to_string(path.p0 * 1e-3) + " kPa > limit " +
                           std::to_string(limits.p0_max * 1e-3) + " kPa");
    const double rise = thermal_estimate(path);
    if (rise > limits.dt_max)
        violated.push_back("temperature: rise " + std::to_string(rise) + " degC > limit " +
                           std::to_string(limits.dt_max) + " degC");
    if (!violated.empty()) {
        std::string msg = "safety gate rejected path:";
        for (const auto& v : violated) msg += "\n  " + v;
        throw safety_violation(msg, violated);
    }
    return path;
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

struct SweepPoint {
    double f_hz;
    double r_ohm;
    double power_w;
};

/// Power surface over a frequency and load grid, row-major in (f, r) order.
inline std::vector<SweepPoint> harvest_sweep(const PiezoElement& elem, const AcousticPath& path,
                                             std::span<const double> f_grid,
                                             std::span<const double> r_grid) {
    if (f_grid.empty() || r_grid.empty())
        throw std::invalid_argument("harvest_sweep: grids must be non-empty");
    std::vector<SweepPoint> out;
    out.reserve(f_grid.size() * r_grid.size());
    for (const double f : f_grid) {
        AcousticPath at_f = path;
        at_f.f = f;
        const double p = focal_pressure(at_f);
        for (const double r : r_grid) out.push_back({f, r, piezo_power(p, elem, f, r)});
    }
    return out;
}

inline void write_harvest_csv(std::ostream& os, std::span<const SweepPoint> points) {
    os << "f_hz,r_ohm,power_w\n";
    for (const SweepPoint& pt : points)
        os << pt.f_hz << ',' << pt.r_ohm << ',' << pt.power_w << '\n';
}

inline void write_array_csv(std::ostream& os, std::span<const PiezoElement> elements,
                            const ArrayPower& result) {
    os << "element,orientation_deg,power_w,total_w\n";
    for (std::size_t i = 0; i < result.per_element_w.size(); ++i)
        os << (i + 1) << ',' << elements[i].orientation_deg << ',' << result.per_element_w[i] << ','
           << result.total_w << '\n';
}

}  // namespace translum
