// translum: optical telemetry link simulator and ultrasound power budget tool.
//
// Subcommands: link run, link table1, budget, fus sweep, fus array.
// Exit codes: 0 success, 2 usage/config error, 3 no-signal or sync-dominated
// run, 4 safety-gate rejection.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "translum/translum.hpp"

namespace fs = std::filesystem;
using namespace translum;

namespace {

std::string with_commas(std::uint64_t v) {
    std::string digits = std::to_string(v);
    std::string out;
    int c = 0;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
        if (c && c % 3 == 0) out.push_back(',');
        out.push_back(*it);
        ++c;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_given = false;
    unsigned threads = 0;
    bool json = false;
};

SimConfig load_effective_config(const CommonOpts& opts) {
    SimConfig cfg = opts.config_path.empty() ? default_sim_config() : load_config(opts.config_path);
    if (opts.seed_given) cfg.link.seed = opts.seed;
    return cfg;
}

void ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw config_error("cannot create output directory '" + dir + "'");
}

void write_manifest(const std::string& out_dir, const std::string& command, std::uint64_t digest,
                    const std::string& started, std::vector<std::string> outputs) {
    RunManifest m;
    m.command = command;
    m.config_digest = digest;
    m.started = started;
    m.finished = iso8601_utc_now();
    m.outputs = std::move(outputs);
    for (const std::string& f : m.outputs)
        if (!fs::exists(f)) throw config_error("manifest lists missing output '" + f + "'");
    write_text_file(out_dir + "/manifest.json", to_json(m).dump(2) + "\n");
}

const BenchRow* find_bench_row(double rate_bps, const std::string& preset, Modulation mod) {
    for (const BenchRow& row : kBenchTable)
        if (std::abs(row.rate_mbps * 1e6 - rate_bps) < 0.5 && bench_preset_name(row) == preset &&
            row.modulation == mod)
            return &row;
    return nullptr;
}

// ---------------------------------------------------------------------------
// link run
// ---------------------------------------------------------------------------

int cmd_link_run(const CommonOpts& opts, std::uint64_t frames, const std::string& rate_override,
                 const std::string& mod_override, const std::string& preset_override,
                 const std::string& dump_waveform) {
    const std::string started = iso8601_utc_now();
    SimConfig cfg = load_effective_config(opts);
    if (!rate_override.empty())
        cfg.link.data_rate = units::parse(json(rate_override), "link.data_rate", units::kRate);
    if (!mod_override.empty()) cfg.link.modulation = modulation_from_string(mod_override);
    if (!preset_override.empty()) {
        cfg.tissue_preset = preset_override;
        cfg.tissue = tissue_preset(preset_override);
    }
    if (cfg.link.modulation == Modulation::PDM && cfg.link.oversampling < 20) cfg.link.oversampling = 24;
    cfg.link.validate();
    ensure_out_dir(opts.out_dir);

    BerReport report = run_link(cfg.link, cfg.tissue, cfg.receiver, frames, opts.threads);
    report.config_digest = config_digest(cfg);
    const double rx_peak = cfg.link.led_peak_power * cfg.tissue.transmission();
    const double snr_db = rx_snr_db(rx_peak, cfg.receiver);

    json report_json = to_json(report);
    report_json["snr_db"] = snr_db;
    report_json["seed"] = cfg.link.seed;
    const std::string report_path = opts.out_dir + "/ber_report.json";
    write_text_file(report_path, report_json.dump(2) + "\n");

    const BenchRow* bench = find_bench_row(cfg.link.data_rate, cfg.tissue_preset, cfg.link.modulation);
    std::ostringstream csv;
    csv << kSweepCsvHeader << '\n'
        << cfg.link.data_rate << ',' << to_string(cfg.link.modulation) << ',' << cfg.tissue_preset << ','
        << report.frames_sent << ',' << report.bits_compared << ',' << report.bit_errors << ','
        << report.sync_failures << ',' << report.ber << ',' << report.ber_upper_95 << ',';
    if (bench) csv << bench->power_mw << ',' << computed_nj_per_bit(*bench);
    else csv << ',';
    csv << ',' << report.wall_seconds << '\n';
    const std::string csv_path = opts.out_dir + "/ber_report.csv";
    write_text_file(csv_path, csv.str());

    std::vector<std::string> outputs{report_path, csv_path};
    if (!dump_waveform.empty()) {
        RngStream noise(cfg.link.seed, 1);  // frame 0 noise substream
        const Frame frame = build_frame(std::vector<std::uint8_t>(cfg.link.payload_len, 0xA5),
                                        cfg.link.prefix_pattern);
        Waveform tx = rasterize(encode(frame.bits(), cfg.link), cfg.link.sample_rate(),
                                cfg.link.led_peak_power);
        const Waveform rxw = end_to_end(tx, cfg.tissue, cfg.receiver, noise);
        std::ostringstream wcsv;
        write_waveform_csv(wcsv, rxw);
        write_text_file(dump_waveform, wcsv.str());
        outputs.push_back(dump_waveform);
    }
    write_manifest(opts.out_dir, "link run", report.config_digest, started, outputs);

    if (opts.json) {
        std::cout << report_json.dump(2) << std::endl;
    } else {
        std::cout << "frames " << report.frames_sent << "  bits " << report.bits_compared << "  errors "
                  << report.bit_errors << "  sync failures " << report.sync_failures << '\n'
                  << "ber " << report.ber << "  ber_upper_95 " << report.ber_upper_95 << "  snr "
                  << snr_db << " dB  (" << report.wall_seconds << " s)\n"
                  << "report: " << report_path << '\n';
    }
    const bool sync_dominated = report.sync_failures * 2 > report.frames_sent;
    return sync_dominated ? 3 : 0;
}

// ---------------------------------------------------------------------------
// link table1
// ---------------------------------------------------------------------------

std::vector<BenchRow> filter_rows(const std::string& filter) {
    std::vector<BenchRow> rows(kBenchTable.begin(), kBenchTable.end());
    if (filter.empty()) return rows;
    std::vector<std::string> tokens;
    std::stringstream ss(lower(filter));
    std::string tok;
    while (std::getline(ss, tok, '-')) tokens.push_back(tok);

    auto matches = [&](const BenchRow& row) {
        for (const std::string& t : tokens) {
            if (t == "pwm" || t == "pdm") {
                if (lower(to_string(row.modulation)) != t) return false;
            } else if (t.size() > 4 && t.substr(t.size() - 4) == "mbps") {
                const double rate = std::stod(t.substr(0, t.size() - 4));
                if (std::abs(rate - row.rate_mbps) > 1e-9) return false;
            } else if (t.rfind("bone", 0) == 0) {
                if (t != "bone" + std::to_string(row.bone_mm)) return false;
            } else {
                throw config_error("unknown row filter token '" + t + "'");
            }
        }
        return true;
    };
    std::erase_if(rows, [&](const BenchRow& r) { return !matches(r); });
    return rows;
}

int cmd_table1(const CommonOpts& opts, std::uint64_t frames, const std::string& filter) {
    const std::string started = iso8601_utc_now();
    SimConfig cfg = load_effective_config(opts);
    ensure_out_dir(opts.out_dir);

    const std::vector<BenchRow> rows = filter_rows(filter);
    const auto results = sweep(rows, cfg.link, cfg.receiver, frames, opts.threads);

    std::ostringstream csv;
    write_sweep_csv(csv, results);
    const std::string csv_path = opts.out_dir + "/table1.csv";
    write_text_file(csv_path, csv.str());
    write_manifest(opts.out_dir, "link table1", config_digest(cfg), started, {csv_path});

    if (opts.json) {
        json arr = json::array();
        for (const auto& r : results) {
            json row = to_json(r.report);
            row["rate_bps"] = r.row.rate_mbps * 1e6;
            row["modulation"] = to_string(r.row.modulation);
            row["preset"] = bench_preset_name(r.row);
            row["power_mw"] = r.power_mw;
            row["nj_per_bit"] = r.nj_per_bit;
            row["printed_nj_per_bit"] = r.row.printed_nj_per_bit;
            row["efficiency_flagged"] = efficiency_flagged(r.row);
            if (!r.error.empty()) row["error"] = r.error;
            arr.push_back(std::move(row));
        }
        std::cout << arr.dump(2) << std::endl;
    } else {
        std::cout << "rate_mbps  preset        mod  power_mW  nJ/bit  ber          sync_failures\n";
        for (const auto& r : results) {
            std::ostringstream line;
            line << r.row.rate_mbps << "  " << bench_preset_name(r.row) << "  "
                 << to_string(r.row.modulation) << "  " << r.power_mw << "  " << r.nj_per_bit;
            if (efficiency_flagged(r.row))
                line << " (published " << r.row.printed_nj_per_bit << ", inconsistent)";
            if (r.error.empty()) line << "  " << r.report.ber << "  " << r.report.sync_failures;
            else line << "  error: " << r.error;
            std::cout << line.str() << '\n';
        }
        std::cout << "csv: " << csv_path << '\n';
    }
    return 0;
}

// ---------------------------------------------------------------------------
// budget
// ---------------------------------------------------------------------------

int cmd_budget(std::uint64_t channels, std::uint64_t fs_hz, std::uint64_t bits, double link_rate,
               bool as_json) {
    const FeasibilityReport rep = feasibility(channels, fs_hz, bits, link_rate);
    if (as_json) {
        std::cout << json{{"channels", channels},
                          {"sample_rate_hz", fs_hz},
                          {"resolution_bits", bits},
                          {"link_rate_bps", link_rate},
                          {"raw_required_bps", rep.raw_bps},
                          {"framed_required_bps", rep.framed_bps},
                          {"raw_ok", rep.raw_ok},
                          {"framed_ok", rep.framed_ok},
                          {"margin_bps", rep.margin_bps}}
                         .dump(2)
                  << std::endl;
    } else {
        std::cout << "raw required:    " << with_commas(rep.raw_bps) << " bit/s ("
                  << (rep.raw_ok ? "fits" : "exceeds") << " link rate " << with_commas(
                         static_cast<std::uint64_t>(link_rate)) << " bit/s)\n"
                  << "framed required: " << with_commas(rep.framed_bps) << " bit/s ("
                  << (rep.framed_ok ? "fits" : "exceeds") << ", prefix overhead 1552/1520)\n"
                  << "margin after framing: " << rep.margin_bps << " bit/s\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// fus sweep / fus array
// ---------------------------------------------------------------------------

std::vector<double> linspace(double lo, double hi, int steps) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(steps));
    if (steps == 1) {
        out.push_back(lo);
        return out;
    }
    for (int i = 0; i < steps; ++i)
        out.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1));
    return out;
}

int cmd_fus_sweep(const CommonOpts& opts, double f_min, double f_max, int f_steps, double r_min,
                  double r_max, int r_steps) {
    const std::string started = iso8601_utc_now();
    SimConfig cfg = load_effective_config(opts);
    if (!(f_min > 0) || f_max < f_min || f_steps < 1 || !(r_min > 0) || r_max < r_min || r_steps < 1)
        throw config_error("fus sweep: invalid grid bounds");
    if ((f_steps > 1 && f_max == f_min) || (r_steps > 1 && r_max == r_min))
        throw config_error("fus sweep: degenerate grid with multiple steps");
    safety_gate(cfg.fus.path, cfg.fus.limits);
    ensure_out_dir(opts.out_dir);

    const auto f_grid = linspace(f_min, f_max, f_steps);
    const auto r_grid = linspace(r_min, r_max, r_steps);
    const auto points = harvest_sweep(cfg.fus.element, cfg.fus.path, f_grid, r_grid);

    std::ostringstream csv;
    write_harvest_csv(csv, points);
    const std::string csv_path = opts.out_dir + "/fus_sweep.csv";
    write_text_file(csv_path, csv.str());
    write_manifest(opts.out_dir, "fus sweep", config_digest(cfg), started, {csv_path});

    const auto best = std::max_element(points.begin(), points.end(),
                                       [](const SweepPoint& a, const SweepPoint& b) {
                                           return a.power_w < b.power_w;
                                       });
    if (opts.json) {
        std::cout << json{{"points", points.size()},
                          {"max_power_w", best->power_w},
                          {"max_f_hz", best->f_hz},
                          {"max_r_ohm", best->r_ohm},
                          {"csv", csv_path}}
                         .dump(2)
                  << std::endl;
    } else {
        std::cout << points.size() << " grid points; max " << best->power_w * 1e3 << " mW at "
                  << best->f_hz * 1e-6 << " MHz, " << best->r_ohm << " ohm\ncsv: " << csv_path << '\n';
    }
    return 0;
}

int cmd_fus_array(const CommonOpts& opts, const std::string& preset, bool tuned) {
    const std::string started = iso8601_utc_now();
    SimConfig cfg = load_effective_config(opts);
    if (preset != "six-element") throw config_error("unknown array preset '" + preset + "'");
    safety_gate(cfg.fus.path, cfg.fus.limits);
    ensure_out_dir(opts.out_dir);

    const auto elements = six_element_preset();
    const ArrayPower result = array_power(elements, cfg.fus.path, tuned);

    std::ostringstream csv;
    write_array_csv(csv, elements, result);
    const std::string csv_path = opts.out_dir + "/fus_array.csv";
    write_text_file(csv_path, csv.str());
    write_manifest(opts.out_dir, "fus array", config_digest(cfg), started, {csv_path});

    if (opts.json) {
        std::cout << json{{"preset", preset},
                          {"per_element_tuning", tuned},
                          {"per_element_w", result.per_element_w},
                          {"total_w", result.total_w},
                          {"csv", csv_path}}
                         .dump(2)
                  << std::endl;
    } else {
        for (std::size_t i = 0; i < result.per_element_w.size(); ++i)
            std::cout << "element " << i + 1 << "  " << elements[i].orientation_deg << " deg  "
                      << result.per_element_w[i] * 1e3 << " mW\n";
        std::cout << "total " << result.total_w * 1e3 << " mW ("
                  << (tuned ? "per-element tuning" : "untuned") << ")\ncsv: " << csv_path << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"optical telemetry and focused-ultrasound power transfer simulator"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CommonOpts opts;
    auto add_common = [&opts](CLI::App* cmd, bool with_out = true) {
        cmd->add_option("--config", opts.config_path, "config file (JSON)");
        cmd->add_option("--seed", opts.seed, "override config seed")
            ->envname("TRANSLUM_SEED")
            ->trigger_on_parse()
            ->each([&opts](const std::string&) { opts.seed_given = true; });
        cmd->add_option("--threads", opts.threads, "worker threads (0 = all cores)");
        cmd->add_flag("--json", opts.json, "emit a single JSON document on stdout");
        if (with_out) cmd->add_option("--out", opts.out_dir, "output directory");
    };

    // link
    auto* link = app.add_subcommand("link", "optical link simulation");
    link->require_subcommand(1);
    auto* run = link->add_subcommand("run", "run a BER experiment");
    std::uint64_t run_frames = 100;
    std::string rate_override, mod_override, preset_override, dump_waveform;
    add_common(run);
    run->add_option("--frames", run_frames, "frames to simulate");
    run->add_option("--rate", rate_override, "data rate override, e.g. 5e6 or '5 Mbit/s'");
    run->add_option("--modulation", mod_override, "pwm or pdm");
    run->add_option("--preset", preset_override, "tissue preset override");
    run->add_option("--dump-waveform", dump_waveform, "write one received frame as CSV");

    auto* table1 = link->add_subcommand("table1", "sweep the twelve bench operating points");
    std::uint64_t table1_frames = 10;
    std::string row_filter;
    add_common(table1);
    table1->add_option("--frames", table1_frames, "frames per row");
    table1->add_option("--rows", row_filter, "filter rows, e.g. 5mbps-pwm or bone10");

    // budget
    auto* budget = app.add_subcommand("budget", "telemetry capacity feasibility");
    std::uint64_t channels = 41, fs_hz = 2000, res_bits = 24;
    double link_rate = 2e6;
    bool budget_json = false;
    budget->add_option("--channels", channels, "electrode channels")->required();
    budget->add_option("--fs", fs_hz, "sampling rate per channel, Hz")->required();
    budget->add_option("--bits", res_bits, "resolution, bits per sample")->required();
    budget->add_option("--rate", link_rate, "link rate, bit/s")->required();
    budget->add_flag("--json", budget_json, "emit JSON");

    // fus
    auto* fus = app.add_subcommand("fus", "focused-ultrasound power transfer");
    fus->require_subcommand(1);
    auto* fsweep = fus->add_subcommand("sweep", "power surface over frequency and load");
    double f_min = 0.5e6, f_max = 1.5e6, r_min = 20.0, r_max = 2000.0;
    int f_steps = 101, r_steps = 100;
    add_common(fsweep);
    fsweep->add_option("--f-min", f_min, "Hz");
    fsweep->add_option("--f-max", f_max, "Hz");
    fsweep->add_option("--f-steps", f_steps, "grid points");
    fsweep->add_option("--r-min", r_min, "ohm");
    fsweep->add_option("--r-max", r_max, "ohm");
    fsweep->add_option("--r-steps", r_steps, "grid points");

    auto* farray = fus->add_subcommand("array", "multi-element harvest");
    std::string array_preset = "six-element";
    bool no_tuning = false;
    add_common(farray);
    farray->add_option("--preset", array_preset, "array preset");
    farray->add_flag("--no-tuning", no_tuning, "common frequency/load instead of per-element tuning");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed())
            return cmd_link_run(opts, run_frames, rate_override, mod_override, preset_override,
                                dump_waveform);
        if (table1->parsed()) return cmd_table1(opts, table1_frames, row_filter);
        if (budget->parsed()) return cmd_budget(channels, fs_hz, res_bits, link_rate, budget_json);
        if (fsweep->parsed()) return cmd_fus_sweep(opts, f_min, f_max, f_steps, r_min, r_max, r_steps);
        if (farray->parsed()) return cmd_fus_array(opts, array_preset, !no_tuning);
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const no_signal_error& e) {
        std::cerr << "no signal: " << e.what() << '\n';
        return 3;
    } catch (const safety_violation& e) {
        std::cerr << e.what() << '\n';
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
