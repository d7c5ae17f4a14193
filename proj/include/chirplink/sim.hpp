#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include "chirplink/airtime.hpp"
#include "chirplink/channel.hpp"
#include "chirplink/frame.hpp"
#include "chirplink/modem.hpp"
#include "chirplink/node.hpp"
#include "chirplink/rng.hpp"
#include "chirplink/scenario.hpp"
#include "chirplink/ser_model.hpp"
#include "chirplink/stats.hpp"

namespace chirplink {

// SampleLevel runs the whole signal chain per trial (modulate, add noise,
// demodulate, decode); Analytic replaces the chain with the closed-form
// symbol error rate and a single Bernoulli draw per packet.
enum class Fidelity { SampleLevel, Analytic };

inline const char* to_string(Fidelity f) {
    return f == Fidelity::SampleLevel ? "sample" : "analytic";
}

inline Fidelity parse_fidelity(const std::string& s) {
    if (s == "sample") return Fidelity::SampleLevel;
    if (s == "analytic") return Fidelity::Analytic;
    throw ConfigError("fidelity must be 'sample' or 'analytic', got '" + s + "'");
}

// Below threshold - margin the sample chain is skipped: packet success there
// would need every symbol to survive near-guessing error rates, a probability
// on the order of N^-n_sym, so the trial is scored as lost without running
// the DSP.
inline constexpr double kSampleGateMarginDb = 10.0;

struct SweepOptions {
    Fidelity fidelity = Fidelity::SampleLevel;
    std::uint64_t seed = 1;
    std::optional<int> trials; // overrides Scenario::trials when set
};

namespace detail {

struct TrialOutcome {
    bool delivered = false;
    bool channel_lost = false;
    FrameStatus status = FrameStatus::Ok; // meaningful when the chain ran
    double snr_db = 0.0;
};

// Immutable per-scenario state shared by every trial.
struct SweepContext {
    const Scenario& sc;
    SymbolBlock clean_symbols;
    IqBuffer clean_iq;
    Modem modem;
    double threshold_db;
    double latency_s;

    explicit SweepContext(const Scenario& scenario)
        : sc(scenario),
          clean_symbols(encode_frame(scenario.message, scenario.radio)),
          clean_iq(modulate(clean_symbols, scenario.radio)),
          modem(scenario.radio.sf),
          threshold_db(scenario.thresholds.at(scenario.radio.sf)) {
        const double toa =
            time_on_air(sc.radio, static_cast<int>(sc.message.size()));
        latency_s = sc.delays.build_s + toa + sc.delays.decode_s + sc.delays.display_s;
        if (sc.latency_endpoint == LatencyEndpoint::UploadDone)
            latency_s += sc.delays.upload_s;
    }
};

inline TrialOutcome run_packet_trial(const SweepContext& ctx, double distance_m,
                                     Fidelity fidelity, Rng& rng) {
    TrialOutcome out;
    Rng shadow_rng = rng.derive("shadow");
    const double pl = path_loss_db(ctx.sc.path_loss, distance_m, &shadow_rng);
    const double prx = received_power_dbm(ctx.sc.budget, pl);
    out.snr_db = snr_db(prx, ctx.sc.budget, ctx.sc.radio.bw_hz);

    if (fidelity == Fidelity::Analytic) {
        const double p_sym = analytic_ser(ctx.sc.radio.sf, out.snr_db);
        const double p_ok =
            std::pow(1.0 - p_sym, static_cast<double>(ctx.clean_symbols.symbols.size()));
        Rng draw = rng.derive("analytic");
        if (draw.uniform() < p_ok) {
            out.delivered = true;
        } else {
            out.channel_lost = true;
        }
        return out;
    }

    if (out.snr_db < ctx.threshold_db - kSampleGateMarginDb) {
        out.channel_lost = true;
        return out;
    }

    Rng noise_rng = rng.derive("awgn");
    const IqBuffer noisy = apply_awgn(ctx.clean_iq, out.snr_db, noise_rng);
    const DemodResult demod = demodulate(noisy, ctx.sc.radio);
    const FrameDecodeResult decoded = decode_frame(demod.symbols, ctx.sc.radio);
    out.status = decoded.status;
    out.delivered = decoded.ok();
    return out;
}

} // namespace detail

// Runs Scenario::trials independent packet trials at every distance in the
// scenario grid.  Per-distance random streams are derived from the distance
// value itself, so extending the grid leaves existing rows bit-identical.
inline SweepResult run_sweep(const Scenario& sc, const SweepOptions& opts = {}) {
    sc.validate();
    detail::SweepContext ctx(sc);
    const int trials = opts.trials.value_or(sc.trials);
    if (trials < 1) throw ConfigError("run_sweep: trials must be at least 1");

    SweepResult result;
    result.scenario = sc.name;
    result.fidelity = to_string(opts.fidelity);
    result.seed = opts.seed;

    Rng root(opts.seed);
    Rng sweep_rng = root.derive("sweep");
    for (double distance : sc.distances_m) {
        std::uint64_t dist_bits = 0;
        static_assert(sizeof(dist_bits) == sizeof(distance));
        std::memcpy(&dist_bits, &distance, sizeof(distance));
        Rng dist_rng = sweep_rng.derive(dist_bits);

        DistanceResult row;
        row.distance_m = distance;
        row.trials = trials;
        double snr_sum = 0.0;
        for (int t = 0; t < trials; ++t) {
            Rng trial_rng = dist_rng.derive(static_cast<std::uint64_t>(t));
            const auto outcome =
                detail::run_packet_trial(ctx, distance, opts.fidelity, trial_rng);
            snr_sum += outcome.snr_db;
            if (outcome.delivered) {
                ++row.delivered;
            } else if (outcome.channel_lost) {
                ++row.channel_lost;
            } else {
                switch (outcome.status) {
                case FrameStatus::HeaderCorrupt: ++row.header_failures; break;
                case FrameStatus::FecFailure: ++row.fec_failures; break;
                case FrameStatus::CrcMismatch: ++row.crc_failures; break;
                case FrameStatus::Ok: break;
                }
            }
        }
        row.pdr = static_cast<double>(row.delivered) / trials;
        row.pdr_ci = wilson_interval(row.delivered, trials);
        row.mean_snr_db = snr_sum / trials;
        if (row.delivered > 0) {
            row.mean_latency_s = ctx.latency_s;
            row.p95_latency_s = ctx.latency_s;
        }
        result.rows.push_back(row);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Two-node session (event log and latency measurements)
// ---------------------------------------------------------------------------

struct SessionResult {
    std::vector<NodeEvent> events;
    int packets_sent = 0;
    int packets_delivered = 0;
    std::vector<double> latencies_s;
    LcdFrame final_lcd;
    std::optional<std::string> last_message;
};

// Drives a TxNode and RxNode through simulated time at one fixed distance,
// always at sample-level fidelity.  Every packet's propagation draws from a
// stream derived from the master seed and the packet index.
inline SessionResult simulate_session(const Scenario& sc, double distance_m, int n_packets,
                                      std::uint64_t seed) {
    sc.validate();
    if (n_packets < 1) throw ConfigError("simulate_session: n_packets must be at least 1");
    detail::SweepContext ctx(sc);

    TxNode tx(sc.radio, sc.message, sc.inter_send_delay_s, sc.delays);
    RxNode rx(sc.radio, sc.delays);
    Rng root(seed);
    Rng session_rng = root.derive("session");

    SessionResult result;
    std::optional<NodeEvent> last_tx_start;
    std::optional<SymbolBlock> in_flight;

    while (tx.sent_count() < n_packets) {
        const double now = tx.next_time();
        TxStepResult stepped = tx.step(now);
        for (auto& ev : stepped.events) result.events.push_back(ev);
        if (stepped.transmission) in_flight = std::move(stepped.transmission);

        const bool tx_ended = !stepped.events.empty() &&
                              stepped.events.back().kind == EventKind::TxEnd;
        for (const auto& ev : stepped.events)
            if (ev.kind == EventKind::TxStart) last_tx_start = ev;
        if (!tx_ended || !in_flight) continue;

        const int packet_index = tx.sent_count() - 1;
        Rng packet_rng = session_rng.derive(static_cast<std::uint64_t>(packet_index));
        Rng shadow_rng = packet_rng.derive("shadow");
        const double pl = path_loss_db(sc.path_loss, distance_m, &shadow_rng);
        const double prx = received_power_dbm(sc.budget, pl);
        const double snr = snr_db(prx, sc.budget, sc.radio.bw_hz);
        ++result.packets_sent;

        std::optional<RxArrival> arrival;
        if (snr >= ctx.threshold_db - kSampleGateMarginDb) {
            Rng noise_rng = packet_rng.derive("awgn");
            const IqBuffer noisy = apply_awgn(ctx.clean_iq, snr, noise_rng);
            arrival = RxArrival{demodulate(noisy, sc.radio).symbols, snr};
        }
        auto rx_events = rx.step(arrival, now);
        for (const auto& ev : rx_events) {
            result.events.push_back(ev);
            const EventKind want = sc.latency_endpoint == LatencyEndpoint::LcdUpdate
                                       ? EventKind::LcdUpdate
                                       : EventKind::UploadDone;
            if (ev.kind == want && last_tx_start)
                result.latencies_s.push_back(
                    end_to_end_latency(*last_tx_start, ev, sc.delays, sc.latency_endpoint));
        }
        in_flight.reset();
    }

    result.packets_delivered = rx.stats().decoded_ok;
    result.final_lcd = rx.lcd();
    result.last_message = rx.last_message();
    return result;
}

// ---------------------------------------------------------------------------
// Symbol error rate measurement and threshold calibration
// ---------------------------------------------------------------------------

// Measured symbol error rate at one SNR: random symbols through the real
// modulate/noise/demodulate chain.
inline double monte_carlo_ser(int sf, double snr_value_db, int symbols, Rng& rng) {
    if (symbols < 1) throw ConfigError("monte_carlo_ser: symbols must be at least 1");
    Modem modem(sf);
    const std::size_t n = modem.samples_per_symbol();
    IqBuffer iq;
    iq.oversample = 1;
    iq.samples.resize(n);
    int errors = 0;
    for (int i = 0; i < symbols; ++i) {
        const auto sym = static_cast<std::uint16_t>(rng.uniform_int(1u << sf));
        modem.modulate_symbol(sym, iq.samples.data());
        const IqBuffer noisy = apply_awgn(iq, snr_value_db, rng);
        if (modem.demodulate_symbol(noisy.samples.data()) != sym) ++errors;
    }
    return static_cast<double>(errors) / symbols;
}

struct CalibrationRow {
    int sf = 0;
    double threshold_db = 0.0;
    int symbols_per_point = 0;
};

struct CalibrationResult {
    SnrThresholdTable table;
    std::vector<CalibrationRow> rows;
    double target_ser = 0.10;
};

// Finds, for each spreading factor, the SNR at which measured SER crosses
// target_ser.  Bisection over [-35, 0] dB against fresh Monte Carlo estimates
// (each evaluation uses a stream derived from sf and iteration, so the run is
// reproducible for a given seed).  Demodulation cost grows as 2^sf log 2^sf,
// so SF10+ automatically uses a quarter of the requested symbol budget.
inline CalibrationResult calibrate_thresholds(const std::vector<int>& sfs, int symbols,
                                              std::uint64_t seed, double target_ser = 0.10) {
    if (symbols < 100) throw ConfigError("calibrate_thresholds: need at least 100 symbols");
    CalibrationResult result;
    result.target_ser = target_ser;
    Rng root(seed);
    for (int sf : sfs) {
        if (sf < 7 || sf > 12) throw ConfigError("calibrate_thresholds: sf out of range");
        const int budget = sf >= 10 ? symbols / 4 : symbols;
        Rng sf_rng = root.derive("calibrate").derive(static_cast<std::uint64_t>(sf));
        double lo = -35.0, hi = 0.0;
        int iteration = 0;
        while (hi - lo > 0.02) {
            const double mid = 0.5 * (lo + hi);
            Rng eval_rng = sf_rng.derive(static_cast<std::uint64_t>(iteration++));
            const double ser = monte_carlo_ser(sf, mid, budget, eval_rng);
            if (ser > target_ser)
                lo = mid; // too noisy here, threshold is higher
            else
                hi = mid;
        }
        const double threshold = std::round(0.5 * (lo + hi) * 10.0) / 10.0;
        result.table.threshold_db[sf] = threshold;
        result.rows.push_back({sf, threshold, budget});
    }
    result.table.validate();
    return result;
}

} // namespace chirplink
