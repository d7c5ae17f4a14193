// chirplink command line: airtime math, link budgets, delivery sweeps,
// symbol error rate measurements, threshold calibration, and a two-node
// desk demo with the dashboard upload leg.

#include <algorithm>
#include <chrono>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "chirplink/chirplink.hpp"
#include "chirplink/telemetry.hpp"

namespace {

using namespace chirplink;

constexpr const char* kDemoWriteKey = "DEMOKEY1234";

std::string format_cr(int cr_num) { return "4/" + std::to_string(4 + cr_num); }

void print_radio_block(const RadioConfig& cfg) {
    std::cout << "# sf = " << cfg.sf << '\n'
              << "# bw_hz = " << cfg.bw_hz << '\n'
              << "# cr = " << format_cr(cfg.cr_num) << '\n'
              << "# crc = " << (cfg.crc_enabled ? "on" : "off") << '\n'
              << "# explicit_header = " << (cfg.explicit_header ? "yes" : "no") << '\n'
              << "# ldro = " << (cfg.ldro ? "on" : "off") << '\n'
              << "# preamble_symbols = " << cfg.preamble_symbols << '\n'
              << "# tx_power_dbm = " << cfg.tx_power_dbm << '\n';
}

RadioConfig radio_from_flags(int sf, int bw, int cr, int preamble, bool no_crc,
                             bool implicit_header, const std::string& ldro) {
    RadioConfig cfg = RadioConfig::p2p_default();
    cfg.sf = sf;
    cfg.bw_hz = bw;
    cfg.cr_num = cr;
    cfg.preamble_symbols = preamble;
    cfg.crc_enabled = !no_crc;
    cfg.explicit_header = !implicit_header;
    if (ldro == "auto")
        cfg.ldro = RadioConfig::ldro_required(cfg.sf, cfg.bw_hz);
    else if (ldro == "on")
        cfg.ldro = true;
    else if (ldro == "off")
        cfg.ldro = false;
    else
        throw ConfigError("--ldro must be auto, on, or off");
    cfg.validate();
    return cfg;
}

int run_airtime(int sf, int bw, int cr, int payload, int preamble, bool no_crc,
                bool implicit_header, const std::string& ldro) {
    const RadioConfig cfg =
        radio_from_flags(sf, bw, cr, preamble, no_crc, implicit_header, ldro);
    std::cout << "# chirplink airtime\n";
    print_radio_block(cfg);
    std::cout << "# payload_bytes = " << payload << '\n';
    std::cout << std::fixed << std::setprecision(6);
    std::cout << "symbol_time_ms = " << symbol_duration(cfg) * 1e3 << '\n'
              << "payload_symbols = " << payload_symbol_count(cfg, payload) << '\n'
              << "time_on_air_ms = " << time_on_air(cfg, payload) * 1e3 << '\n'
              << "bit_rate_bps = " << bit_rate(cfg) << '\n';
    return 0;
}

int run_budget(const std::string& scenario_name, double distance) {
    const Scenario sc = load_scenario(scenario_name);
    const double d = distance > 0 ? distance : sc.distances_m.front();
    const double pl = path_loss_db(sc.path_loss, d); // median, no shadowing draw
    const double prx = received_power_dbm(sc.budget, pl);
    const double snr = snr_db(prx, sc.budget, sc.radio.bw_hz);
    const double threshold = sc.thresholds.at(sc.radio.sf);
    const double sensitivity = sensitivity_dbm(sc.radio, sc.budget, sc.thresholds);

    std::cout << "# chirplink budget\n# scenario = " << sc.name << '\n';
    print_radio_block(sc.radio);
    std::cout << "# pl0_db = " << sc.path_loss.pl0_db << '\n'
              << "# exponent = " << sc.path_loss.exponent_n << '\n'
              << "# sigma_db = " << sc.path_loss.shadowing_sigma_db << '\n';
    std::cout << std::fixed << std::setprecision(4);
    std::cout << "distance_m = " << d << '\n'
              << "path_loss_db = " << pl << '\n'
              << "received_dbm = " << prx << '\n'
              << "noise_floor_dbm = " << sc.budget.noise_floor_dbm(sc.radio.bw_hz) << '\n'
              << "snr_db = " << snr << '\n'
              << "snr_threshold_db = " << threshold << '\n'
              << "sensitivity_dbm = " << sensitivity << '\n'
              << "margin_db = " << snr - threshold << '\n'
              << "link_closes = " << (prx >= sensitivity ? "yes" : "no") << '\n';
    return 0;
}

int run_sweep_cmd(const std::string& scenario_name, const std::string& fidelity,
                  std::uint64_t seed, int trials, const std::string& out_path) {
    Scenario sc = load_scenario(scenario_name);
    SweepOptions opts;
    opts.fidelity = parse_fidelity(fidelity);
    opts.seed = seed;
    if (trials > 0) opts.trials = trials;

    const SweepResult result = run_sweep(sc, opts);

    std::cout << "# chirplink sweep\n# scenario = " << sc.name << '\n'
              << "# fidelity = " << result.fidelity << '\n'
              << "# seed = " << result.seed << '\n'
              << "# trials_per_distance = " << opts.trials.value_or(sc.trials) << '\n'
              << "# message = " << sc.message << '\n';
    print_radio_block(sc.radio);
    const std::string csv = sweep_to_csv(result);
    if (out_path.empty()) {
        std::cout << csv;
    } else {
        std::ofstream out(out_path);
        if (!out) throw TransportError("cannot open '" + out_path + "' for writing");
        out << csv;
        std::cout << "# wrote " << result.rows.size() << " rows to " << out_path << '\n';
        std::cout << std::fixed << std::setprecision(4);
        for (const auto& r : result.rows)
            std::cout << r.distance_m << " m: pdr " << r.pdr << " [" << r.pdr_ci.low << ", "
                      << r.pdr_ci.high << "]\n";
    }
    return 0;
}

int run_ser(int sf, const std::vector<double>& snrs, int symbols, std::uint64_t seed) {
    if (snrs.empty()) throw ConfigError("ser: at least one --snr value is required");
    std::cout << "# chirplink ser\n# sf = " << sf << "\n# symbols_per_point = " << symbols
              << "\n# seed = " << seed << '\n';
    std::cout << "snr_db,measured_ser,analytic_ser\n";
    std::cout << std::fixed << std::setprecision(6);
    Rng root(seed);
    for (double snr : snrs) {
        Rng point_rng = root.derive("ser").derive(static_cast<std::uint64_t>(sf));
        std::uint64_t snr_bits = 0;
        std::memcpy(&snr_bits, &snr, sizeof snr);
        Rng rng = point_rng.derive(snr_bits);
        const double measured = monte_carlo_ser(sf, snr, symbols, rng);
        std::cout << snr << ',' << measured << ',' << analytic_ser(sf, snr) << '\n';
    }
    return 0;
}

int run_calibrate(const std::vector<int>& sfs, int symbols, std::uint64_t seed,
                  double target) {
    std::cout << "# chirplink calibrate\n# target_ser = " << target
              << "\n# symbols = " << symbols << "\n# seed = " << seed << '\n';
    const CalibrationResult result = calibrate_thresholds(sfs, symbols, seed, target);
    const SnrThresholdTable defaults = default_snr_thresholds();
    std::cout << "sf,threshold_db,symbols_per_point,builtin_db,delta_db\n";
    std::cout << std::fixed << std::setprecision(2);
    for (const auto& row : result.rows) {
        const auto it = defaults.threshold_db.find(row.sf);
        std::cout << row.sf << ',' << row.threshold_db << ',' << row.symbols_per_point << ',';
        if (it != defaults.threshold_db.end())
            std::cout << it->second << ',' << row.threshold_db - it->second;
        else
            std::cout << "nan,nan";
        std::cout << '\n';
    }
    return 0;
}

int run_demo(const std::string& scenario_name, int packets, double distance,
             std::uint64_t seed, double time_scale, const std::string& endpoint,
             const std::string& write_key, const std::string& events_path) {
    Scenario sc = load_scenario(scenario_name);
    const double d = distance > 0 ? distance : sc.distances_m.front();

    std::optional<MockTelemetryServer> mock;
    std::optional<TelemetryClient> client;
    if (!endpoint.empty()) {
        client.emplace(endpoint, write_key);
    } else if (auto env_client = TelemetryClient::from_env()) {
        client = std::move(env_client);
    } else {
        mock.emplace(kDemoWriteKey);
        mock->start();
        client.emplace(mock->endpoint(), kDemoWriteKey);
    }

    std::cout << "# chirplink demo\n# scenario = " << sc.name << "\n# distance_m = " << d
              << "\n# packets = " << packets << "\n# seed = " << seed
              << "\n# telemetry = " << client->endpoint()
              << (mock ? " (built-in mock)" : "") << '\n';
    print_radio_block(sc.radio);

    SessionResult session = simulate_session(sc, d, packets, seed);
    std::stable_sort(session.events.begin(), session.events.end(),
                     [](const NodeEvent& a, const NodeEvent& b) {
                         return a.timestamp < b.timestamp;
                     });

    int uploads_ok = 0, uploads_failed = 0;
    double last_ts = session.events.empty() ? 0.0 : session.events.front().timestamp;
    std::cout << std::fixed << std::setprecision(3);
    for (const auto& ev : session.events) {
        if (time_scale > 0.0 && ev.timestamp > last_ts)
            std::this_thread::sleep_for(
                std::chrono::duration<double>((ev.timestamp - last_ts) * time_scale));
        last_ts = ev.timestamp;
        std::cout << '[' << std::setw(8) << ev.timestamp << "] " << ev.node_id << ' '
                  << to_string(ev.kind);
        if (!ev.detail.empty()) std::cout << ": " << ev.detail;
        std::cout << '\n';
        if (ev.kind == EventKind::LcdUpdate)
            std::cout << lcd_ascii_art(render_lcd(ev.detail)) << '\n';
        if (ev.kind == EventKind::UploadDone) {
            try {
                const UploadOutcome outcome = client->upload(ev.detail);
                if (outcome.accepted) {
                    ++uploads_ok;
                    std::cout << "    -> dashboard entry " << outcome.entry_id << '\n';
                } else {
                    ++uploads_failed;
                    std::cout << "    -> upload rejected: " << outcome.error << '\n';
                }
            } catch (const TransportError& e) {
                ++uploads_failed;
                std::cout << "    -> upload failed: " << e.what() << '\n';
            }
        }
    }

    if (!events_path.empty()) {
        std::ofstream out(events_path);
        if (!out) throw TransportError("cannot open '" + events_path + "' for writing");
        for (const auto& ev : session.events) out << event_to_jsonl(ev) << '\n';
        std::cout << "# event log: " << events_path << '\n';
    }

    std::cout << "# sent " << session.packets_sent << ", delivered "
              << session.packets_delivered << ", uploads ok " << uploads_ok << ", failed "
              << uploads_failed << '\n';
    if (!session.latencies_s.empty())
        std::cout << "# mean end-to-end latency: " << std::setprecision(6)
                  << mean(session.latencies_s) << " s\n";
    // A dead dashboard must not fail the radio demo.
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"chirplink: point-to-point LoRa text messaging simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "chirplink 1.0.0");

    int sf = 12, bw = 125000, cr = 1, payload = 16, preamble = 8;
    bool no_crc = false, implicit_header = false;
    std::string ldro = "auto";
    auto* airtime = app.add_subcommand("airtime", "Symbol timing, airtime, and bit rate");
    airtime->add_option("--sf", sf, "Spreading factor 7-12")->capture_default_str();
    airtime->add_option("--bw", bw, "Bandwidth in Hz")->capture_default_str();
    airtime->add_option("--cr", cr, "Coding rate numerator 1-4 (4/5..4/8)")
        ->capture_default_str();
    airtime->add_option("--payload", payload, "Payload length in bytes")
        ->capture_default_str();
    airtime->add_option("--preamble", preamble, "Preamble symbols")->capture_default_str();
    airtime->add_flag("--no-crc", no_crc, "Disable the payload CRC-16");
    airtime->add_flag("--implicit-header", implicit_header, "Implicit header timing");
    airtime->add_option("--ldro", ldro, "auto, on, or off")->capture_default_str();

    std::string scenario = "desk";
    double distance = 0.0;
    auto* budget = app.add_subcommand("budget", "Link budget at one distance");
    budget->add_option("--scenario", scenario, "Scenario name or file")
        ->capture_default_str();
    budget->add_option("--distance", distance, "Distance in metres (default: first grid point)");

    std::string fidelity = "sample", out_path;
    std::uint64_t seed = 1;
    int trials = 0;
    auto* sweep = app.add_subcommand("sweep", "Delivery ratio across the distance grid");
    sweep->add_option("--scenario", scenario, "Scenario name or file")->capture_default_str();
    sweep->add_option("--fidelity", fidelity, "sample or analytic")->capture_default_str();
    sweep->add_option("--seed", seed, "Master seed")->capture_default_str();
    sweep->add_option("--trials", trials, "Trials per distance (default: scenario value)");
    sweep->add_option("--out", out_path, "Write the CSV table to this file");

    std::vector<double> snrs;
    int symbols = 2000;
    auto* ser = app.add_subcommand("ser", "Measured vs analytic symbol error rate");
    ser->add_option("--sf", sf, "Spreading factor 7-12")->capture_default_str();
    ser->add_option("--snr", snrs, "SNR points in dB (comma separated)")
        ->required()
        ->delimiter(',');
    ser->add_option("--symbols", symbols, "Symbols per point")->capture_default_str();
    ser->add_option("--seed", seed, "Master seed")->capture_default_str();

    std::vector<int> sfs = {7, 8, 9, 10, 11, 12};
    int cal_symbols = 10000;
    std::uint64_t cal_seed = 20240433;
    double target = 0.10;
    auto* calibrate = app.add_subcommand("calibrate", "Measure per-SF decode thresholds");
    calibrate->add_option("--sfs", sfs, "Spreading factors")->delimiter(',')
        ->capture_default_str();
    calibrate->add_option("--trials", cal_symbols, "Symbols per Monte Carlo point")
        ->capture_default_str();
    calibrate->add_option("--seed", cal_seed, "Master seed")->capture_default_str();
    calibrate->add_option("--target", target, "Target symbol error rate")
        ->capture_default_str();

    int packets = 3;
    double time_scale = 0.0;
    std::string endpoint, write_key, events_path;
    auto* demo = app.add_subcommand("demo", "Two-node session with LCD and upload leg");
    demo->add_option("--scenario", scenario, "Scenario name or file")->capture_default_str();
    demo->add_option("--packets", packets, "Messages to send")->capture_default_str();
    demo->add_option("--distance", distance, "Distance in metres (default: first grid point)");
    demo->add_option("--seed", seed, "Master seed")->capture_default_str();
    demo->add_option("--time-scale", time_scale,
                     "Wall-clock seconds per simulated second (0 = run flat out)")
        ->capture_default_str();
    demo->add_option("--endpoint", endpoint, "Dashboard endpoint (default: built-in mock, "
                                             "or TELEMETRY_ENDPOINT when set)");
    demo->add_option("--write-key", write_key, "Dashboard write key");
    demo->add_option("--events", events_path, "Write the JSONL event log to this file");

    try {
        app.parse(argc, argv);
        if (airtime->parsed())
            return run_airtime(sf, bw, cr, payload, preamble, no_crc, implicit_header, ldro);
        if (budget->parsed()) return run_budget(scenario, distance);
        if (sweep->parsed()) return run_sweep_cmd(scenario, fidelity, seed, trials, out_path);
        if (ser->parsed()) return run_ser(sf, snrs, symbols, seed);
        if (calibrate->parsed()) return run_calibrate(sfs, cal_symbols, cal_seed, target);
        if (demo->parsed())
            return run_demo(scenario, packets, distance, seed, time_scale, endpoint,
                            write_key, events_path);
        return 2;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help / --version
        app.exit(e);
        return 2;
    } catch (const chirplink::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const chirplink::TransportError& e) {
        std::cerr << "transport error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
