#pragma once

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string>
#include <utility>

#include <json.hpp>

#include "translum/channel.hpp"
#include "translum/errors.hpp"
#include "translum/fus.hpp"
#include "translum/link_config.hpp"

namespace translum {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Quantities with unit suffixes
// ---------------------------------------------------------------------------

namespace units {

using Family = std::initializer_list<std::pair<const char*, double>>;

// A family lists the suffixes a field accepts and their factor into the
// field's native unit. Bare numbers are taken as already native.
inline constexpr Family kRate{{"bit/s", 1.0}, {"kbit/s", 1e3}, {"Mbit/s", 1e6}, {"Gbit/s", 1e9},
                              {"bps", 1.0},   {"kbps", 1e3},   {"Mbps", 1e6}};
inline constexpr Family kPower{{"W", 1.0}, {"mW", 1e-3}, {"uW", 1e-6}, {"nW", 1e-9}};
inline constexpr Family kVoltage{{"V", 1.0}, {"mV", 1e-3}, {"uV", 1e-6}};
inline constexpr Family kFrequency{{"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}};
inline constexpr Family kLengthMm{{"mm", 1.0}, {"cm", 10.0}, {"m", 1e3}, {"um", 1e-3}};
inline constexpr Family kPerMm{{"/mm", 1.0}, {"1/mm", 1.0}, {"/cm", 0.1}};
inline constexpr Family kPressure{{"Pa", 1.0}, {"kPa", 1e3}, {"MPa", 1e6}};
inline constexpr Family kCapacitance{{"F", 1.0}, {"uF", 1e-6}, {"nF", 1e-9}, {"pF", 1e-12}};
inline constexpr Family kAreaMm2{{"mm2", 1.0}, {"mm^2", 1.0}};
inline constexpr Family kResponsivity{{"A/W", 1.0}, {"mA/W", 1e-3}};
inline constexpr Family kTransimpedance{{"V/A", 1.0}, {"kV/A", 1e3}, {"MV/A", 1e6}};
inline constexpr Family kWattPerLux{{"W/lux", 1.0}, {"nW/lux", 1e-9}};
inline constexpr Family kAttenuation{{"dB/(cm*MHz)", 1.0}, {"dB/cm/MHz", 1.0}};
inline constexpr Family kImpedance{{"MRayl", 1.0}};
inline constexpr Family kTemperature{{"C", 1.0}, {"degC", 1.0}};
inline constexpr Family kResistance{{"ohm", 1.0}, {"Ohm", 1.0}, {"kohm", 1e3}, {"Mohm", 1e6}};
inline constexpr Family kDegrees{{"deg", 1.0}};
inline constexpr Family kNone{};

inline double parse(const json& v, const std::string& field, Family family) {
    if (v.is_number()) return v.get<double>();
    if (!v.is_string())
        throw config_error("field '" + field + "' must be a number or a \"<value> <unit>\" string");
    const std::string s = v.get<std::string>();
    std::size_t pos = 0;
    double value = 0.0;
    try {
        value = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw config_error("field '" + field + "': cannot parse quantity '" + s + "'");
    }
    while (pos < s.size() && s[pos] == ' ') ++pos;
    const std::string unit = s.substr(pos);
    if (unit.empty()) throw config_error("field '" + field + "': quantity string '" + s + "' lacks a unit");
    for (const auto& [suffix, factor] : family)
        if (unit == suffix) return value * factor;
    throw config_error("field '" + field + "': unknown unit '" + unit + "'");
}

}  // namespace units

// ---------------------------------------------------------------------------
// Strict section parsing: unknown keys fail fast
// ---------------------------------------------------------------------------

namespace detail {

class Section {
public:
    Section(const json& obj, std::string name) : obj_(obj), name_(std::move(name)) {
        if (!obj.is_object()) throw config_error("section '" + name_ + "' must be a JSON object");
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return obj_.contains(key);
    }

    const json* find(const std::string& key) {
        seen_.insert(key);
        auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    double quantity(const std::string& key, units::Family family, double fallback) {
        const json* v = find(key);
        return v ? units::parse(*v, name_ + "." + key, family) : fallback;
    }

    template <typename T>
    T value(const std::string& key, T fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        try {
            return v->get<T>();
        } catch (const json::exception&) {
            throw config_error("field '" + name_ + "." + key + "' has the wrong type");
        }
    }

    /// Must be called after all known keys were probed.
    void finish() const {
        for (const auto& [key, _] : obj_.items())
            if (!seen_.contains(key))
                throw config_error("unknown key '" + key + "' in section '" + name_ + "'");
    }

    const json& raw() const { return obj_; }

private:
    const json& obj_;
    std::string name_;
    std::set<std::string> seen_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Full simulator configuration
// ---------------------------------------------------------------------------

struct FusConfig {
    AcousticPath path;
    PiezoElement element;
    SafetyLimits limits;
};

struct SimConfig {
    LinkConfig link;
    TissueStack tissue;
    std::string tissue_preset = "bone10_skin7";  // "custom" when layers are explicit
    RxModel receiver;
    FusConfig fus;
};

inline SimConfig default_sim_config() {
    SimConfig cfg;
    cfg.tissue = tissue_preset(cfg.tissue_preset);
    cfg.fus.path = default_path();
    cfg.fus.element = default_element();
    return cfg;
}

namespace detail {

inline LinkConfig parse_link(const json& j) {
    Section sec(j, "link");
    LinkConfig link;
    link.data_rate = sec.quantity("data_rate", units::kRate, link.data_rate);
    if (const json* m = sec.find("modulation")) link.modulation = modulation_from_string(m->get<std::string>());
    link.oversampling = sec.value("oversampling", link.oversampling);
    link.led_peak_power = sec.quantity("led_peak_power", units::kPower, link.led_peak_power);
    const auto pattern = sec.value<int>("prefix_pattern", link.prefix_pattern);
    if (pattern < 0 || pattern > 255) throw config_error("link.prefix_pattern must fit in 8 bits");
    link.prefix_pattern = static_cast<std::uint8_t>(pattern);
    link.payload_len = sec.value("payload_len", link.payload_len);
    link.seed = sec.value("seed", link.seed);
    sec.finish();
    link.validate();
    return link;
}

inline void parse_tissue(const json& j, SimConfig& cfg) {
    Section sec(j, "tissue");
    const json* preset = sec.find("preset");
    const json* layers = sec.find("layers");
    if (preset && layers) throw config_error("tissue: give either 'preset' or 'layers', not both");
    if (preset) {
        cfg.tissue_preset = preset->get<std::string>();
        cfg.tissue = tissue_preset(cfg.tissue_preset);
    } else if (layers) {
        cfg.tissue_preset = "custom";
        cfg.tissue.layers.clear();
        for (std::size_t i = 0; i < layers->size(); ++i) {
            Section lsec((*layers)[i], "tissue.layers[" + std::to_string(i) + "]");
            TissueLayer layer;
            layer.name = lsec.value<std::string>("name", "layer" + std::to_string(i));
            layer.thickness_mm = lsec.quantity("thickness", units::kLengthMm, 0.0);
            layer.mu_eff_per_mm = lsec.quantity("mu_eff", units::kPerMm, 0.0);
            layer.interface_reflectance = lsec.value("interface_reflectance", 0.0);
            lsec.finish();
            if (layer.thickness_mm < 0 || layer.mu_eff_per_mm < 0 ||
                layer.interface_reflectance < 0 || layer.interface_reflectance >= 1)
                throw config_error("tissue.layers[" + std::to_string(i) + "]: invalid layer parameters");
            cfg.tissue.layers.push_back(std::move(layer));
        }
    }
    cfg.tissue.geometry_gain = sec.value("geometry_gain", cfg.tissue.geometry_gain);
    if (!(cfg.tissue.geometry_gain > 0 && cfg.tissue.geometry_gain <= 1))
        throw config_error("tissue.geometry_gain must be in (0, 1]");
    sec.finish();
}

inline void parse_receiver(const json& j, RxModel& rx) {
    Section sec(j, "receiver");
    rx.responsivity = sec.quantity("responsivity", units::kResponsivity, rx.responsivity);
    rx.apd_gain = sec.value("apd_gain", rx.apd_gain);
    rx.tia_gain = sec.quantity("tia_gain", units::kTransimpedance, rx.tia_gain);
    rx.bandwidth = sec.quantity("bandwidth", units::kFrequency, rx.bandwidth);
    rx.thermal_noise_vrms = sec.quantity("thermal_noise_vrms", units::kVoltage, rx.thermal_noise_vrms);
    rx.shot_noise = sec.value("shot_noise", rx.shot_noise);
    rx.ambient_lux = sec.value("ambient_lux", rx.ambient_lux);
    rx.lux_to_power = sec.quantity("lux_to_power", units::kWattPerLux, rx.lux_to_power);
    rx.flicker_rel = sec.value("flicker_rel", rx.flicker_rel);
    rx.adc_bits = sec.value("adc_bits", rx.adc_bits);
    rx.adc_fs = sec.quantity("adc_fs", units::kVoltage, rx.adc_fs);
    rx.adc_rate = sec.quantity("adc_rate", units::kFrequency, rx.adc_rate);
    sec.finish();
    if (rx.responsivity <= 0 || rx.apd_gain <= 0 || rx.tia_gain <= 0 || rx.bandwidth <= 0)
        throw config_error("receiver: gains and bandwidth must be > 0");
    if (rx.adc_bits < 8) throw config_error("receiver.adc_bits must be >= 8");
}

inline void parse_fus(const json& j, FusConfig& fus) {
    Section sec(j, "fus");
    fus.path.p0 = sec.quantity("p0", units::kPressure, fus.path.p0);
    fus.path.f = sec.quantity("f", units::kFrequency, fus.path.f);
    fus.path.focal_gain = sec.value("focal_gain", fus.path.focal_gain);
    if (const json* layers = sec.find("layers")) {
        fus.path.layers.clear();
        for (std::size_t i = 0; i < layers->size(); ++i) {
            Section lsec((*layers)[i], "fus.layers[" + std::to_string(i) + "]");
            AcousticLayer layer;
            layer.name = lsec.value<std::string>("name", "layer" + std::to_string(i));
            layer.thickness_mm = lsec.quantity("thickness", units::kLengthMm, 0.0);
            layer.attenuation_db_cm_mhz = lsec.quantity("attenuation", units::kAttenuation, 0.0);
            layer.impedance_mrayl = lsec.quantity("impedance", units::kImpedance, 1.5);
            layer.thermal_resistance = lsec.value("thermal_resistance", 0.0);
            lsec.finish();
            if (layer.attenuation_db_cm_mhz < 0 || layer.impedance_mrayl <= 0)
                throw config_error("fus.layers[" + std::to_string(i) + "]: invalid layer parameters");
            fus.path.layers.push_back(std::move(layer));
        }
    }
    if (const json* limits = sec.find("limits")) {
        Section lsec(*limits, "fus.limits");
        fus.limits.p0_max = lsec.quantity("p0_max", units::kPressure, fus.limits.p0_max);
        fus.limits.dt_max = lsec.quantity("dt_max", units::kTemperature, fus.limits.dt_max);
        lsec.finish();
        if (fus.limits.p0_max <= 0 || fus.limits.dt_max <= 0)
            throw config_error("fus.limits must be positive");
    }
    if (const json* elem = sec.find("element")) {
        Section esec(*elem, "fus.element");
        fus.element.area_mm2 = esec.quantity("area", units::kAreaMm2, fus.element.area_mm2);
        fus.element.clamped_capacitance =
            esec.quantity("clamped_capacitance", units::kCapacitance, fus.element.clamped_capacitance);
        fus.element.coupling_k = esec.value("coupling_k", fus.element.coupling_k);
        fus.element.resonance_f = esec.quantity("resonance_f", units::kFrequency, fus.element.resonance_f);
        fus.element.quality_q = esec.value("quality_q", fus.element.quality_q);
        fus.element.orientation_deg = esec.quantity("orientation", units::kDegrees, fus.element.orientation_deg);
        fus.element.voltage_scale = esec.value("voltage_scale", fus.element.voltage_scale);
        esec.finish();
        if (!(fus.element.coupling_k > 0 && fus.element.coupling_k < 1) || fus.element.area_mm2 <= 0 ||
            fus.element.quality_q <= 0)
            throw config_error("fus.element: invalid parameters");
    }
    sec.finish();
    if (!(fus.path.focal_gain >= 1)) throw config_error("fus.focal_gain must be >= 1");
}

}  // namespace detail

/// Parse a full config document. Unknown keys anywhere are an error.
inline SimConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw config_error("config root must be a JSON object");
    SimConfig cfg = default_sim_config();
    static const std::set<std::string> kSections{"link", "tissue", "receiver", "fus"};
    for (const auto& [key, _] : doc.items())
        if (!kSections.contains(key)) throw config_error("unknown section '" + key + "' in config");
    if (doc.contains("link")) cfg.link = detail::parse_link(doc.at("link"));
    if (doc.contains("tissue")) detail::parse_tissue(doc.at("tissue"), cfg);
    if (doc.contains("receiver")) detail::parse_receiver(doc.at("receiver"), cfg.receiver);
    if (doc.contains("fus")) detail::parse_fus(doc.at("fus"), cfg.fus);
    return cfg;
}

inline SimConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw config_error("config file '" + path + "': " + e.what());
    }
    return parse_config(doc);
}

// ---------------------------------------------------------------------------
// Serialization (native units, lossless round trip)
// ---------------------------------------------------------------------------

inline json to_json(const LinkConfig& link) {
    return json{{"data_rate", link.data_rate},
                {"modulation", to_string(link.modulation)},
                {"oversampling", link.oversampling},
                {"led_peak_power", link.led_peak_power},
                {"prefix_pattern", static_cast<int>(link.prefix_pattern)},
                {"payload_len", link.payload_len},
                {"seed", link.seed}};
}

inline json to_json(const SimConfig& cfg) {
    json tissue;
    if (cfg.tissue_preset != "custom") {
        tissue["preset"] = cfg.tissue_preset;
    } else {
        json layers = json::array();
        for (const TissueLayer& l : cfg.tissue.layers)
            layers.push_back({{"name", l.name},
                              {"thickness", l.thickness_mm},
                              {"mu_eff", l.mu_eff_per_mm},
                              {"interface_reflectance", l.interface_reflectance}});
        tissue["layers"] = std::move(layers);
    }
    tissue["geometry_gain"] = cfg.tissue.geometry_gain;

    json fus_layers = json::array();
    for (const AcousticLayer& l : cfg.fus.path.layers)
        fus_layers.push_back({{"name", l.name},
                              {"thickness", l.thickness_mm},
                              {"attenuation", l.attenuation_db_cm_mhz},
                              {"impedance", l.impedance_mrayl},
                              {"thermal_resistance", l.thermal_resistance}});

    return json{
        {"link", to_json(cfg.link)},
        {"tissue", std::move(tissue)},
        {"receiver",
         {{"responsivity", cfg.receiver.responsivity},
          {"apd_gain", cfg.receiver.apd_gain},
          {"tia_gain", cfg.receiver.tia_gain},
          {"bandwidth", cfg.receiver.bandwidth},
          {"thermal_noise_vrms", cfg.receiver.thermal_noise_vrms},
          {"shot_noise", cfg.receiver.shot_noise},
          {"ambient_lux", cfg.receiver.ambient_lux},
          {"lux_to_power", cfg.receiver.lux_to_power},
          {"flicker_rel", cfg.receiver.flicker_rel},
          {"adc_bits", cfg.receiver.adc_bits},
          {"adc_fs", cfg.receiver.adc_fs},
          {"adc_rate", cfg.receiver.adc_rate}}},
        {"fus",
         {{"p0", cfg.fus.path.p0},
          {"f", cfg.fus.path.f},
          {"focal_gain", cfg.fus.path.focal_gain},
          {"layers", std::move(fus_layers)},
          {"limits", {{"p0_max", cfg.fus.limits.p0_max}, {"dt_max", cfg.fus.limits.dt_max}}},
          {"element",
           {{"area", cfg.fus.element.area_mm2},
            {"clamped_capacitance", cfg.fus.element.clamped_capacitance},
            {"coupling_k", cfg.fus.element.coupling_k},
            {"resonance_f", cfg.fus.element.resonance_f},
            {"quality_q", cfg.fus.element.quality_q},
            {"orientation", cfg.fus.element.orientation_deg},
            {"voltage_scale", cfg.fus.element.voltage_scale}}}}}};
}

/// FNV-1a over the canonical JSON dump; stable across runs and thread counts.
inline std::uint64_t config_digest(const SimConfig& cfg) {
    const std::string dump = to_json(cfg).dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : dump) h = (h ^ c) * 1099511628211ull;
    return h;
}

}  // namespace translum
