#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "translum/errors.hpp"
#include "translum/harness.hpp"
#include "translum/modem.hpp"
#include "translum/version.hpp"

namespace translum {

/// Two-column waveform dump for plotting.
inline void write_waveform_csv(std::ostream& os, const Waveform& w) {
    os << "t_s,value\n";
    const double dt = 1.0 / w.sample_rate;
    for (std::size_t k = 0; k < w.samples.size(); ++k)
        os << static_cast<double>(k) * dt << ',' << w.samples[k] << '\n';
}

inline std::string iso8601_utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Provenance record written next to every command's outputs.
struct RunManifest {
    std::string command;
    std::uint64_t config_digest = 0;
    std::string tool_version = kVersion;
    std::string started;
    std::string finished;
    std::vector<std::string> outputs;
};

inline nlohmann::json to_json(const RunManifest& m) {
    return nlohmann::json{{"command", m.command},
                          {"config_digest", m.config_digest},
                          {"tool_version", m.tool_version},
                          {"started", m.started},
                          {"finished", m.finished},
                          {"outputs", m.outputs}};
}

inline nlohmann::json to_json(const BerReport& r) {
    return nlohmann::json{{"bits_compared", r.bits_compared},
                          {"bit_errors", r.bit_errors},
                          {"frames_sent", r.frames_sent},
                          {"sync_failures", r.sync_failures},
                          {"ber", r.ber},
                          {"ber_upper_95", r.ber_upper_95},
                          {"wall_seconds", r.wall_seconds},
                          {"config_digest", r.config_digest}};
}

// ---------------------------------------------------------------------------
// Basic SVG line plots (data-first output; this is a convenience view)
// ---------------------------------------------------------------------------

struct SvgSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;  // x, y
};

inline std::string render_line_svg(const std::vector<SvgSeries>& series, const std::string& x_label,
                                   const std::string& y_label) {
    constexpr int kW = 720, kH = 440, kMargin = 60;
    double x_lo = 1e300, x_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
    for (const auto& s : series)
        for (const auto& [x, y] : s.points) {
            x_lo = std::min(x_lo, x);
            x_hi = std::max(x_hi, x);
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
        }
    if (x_hi <= x_lo) x_hi = x_lo + 1.0;
    if (y_hi <= y_lo) y_hi = y_lo + 1.0;
    const auto px = [&](double x) {
        return kMargin + (x - x_lo) / (x_hi - x_lo) * (kW - 2 * kMargin);
    };
    const auto py = [&](double y) {
        return kH - kMargin - (y - y_lo) / (y_hi - y_lo) * (kH - 2 * kMargin);
    };
    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<line x1=\"" << kMargin << "\" y1=\"" << kH - kMargin << "\" x2=\"" << kW - kMargin
        << "\" y2=\"" << kH - kMargin << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin << "\" y2=\""
        << kH - kMargin << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 15 << "\" text-anchor=\"middle\">" << x_label
        << "</text>\n"
        << "<text x=\"18\" y=\"" << kH / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
        << kH / 2 << ")\">" << y_label << "</text>\n";
    svg << "<text x=\"" << kMargin << "\" y=\"" << kH - kMargin + 16 << "\">" << x_lo << "</text>\n"
        << "<text x=\"" << kW - kMargin << "\" y=\"" << kH - kMargin + 16
        << "\" text-anchor=\"end\">" << x_hi << "</text>\n"
        << "<text x=\"" << kMargin - 4 << "\" y=\"" << kH - kMargin
        << "\" text-anchor=\"end\">" << y_lo << "</text>\n"
        << "<text x=\"" << kMargin - 4 << "\" y=\"" << kMargin + 4 << "\" text-anchor=\"end\">"
        << y_hi << "</text>\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = kColors[i % 4];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : series[i].points) svg << px(x) << ',' << py(y) << ' ';
        svg << "\"/>\n"
            << "<text x=\"" << kW - kMargin + 4 << "\" y=\"" << kMargin + 16 * (1 + (int)i)
            << "\" fill=\"" << color << "\">" << series[i].label << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot write file '" + path + "'");
    out << content;
    if (!out) throw config_error("error while writing '" + path + "'");
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot read file '" + path + "'");
    std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return s;
}

}  // namespace translum
