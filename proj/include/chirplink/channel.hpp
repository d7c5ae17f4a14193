#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "chirplink/iq.hpp"
#include "chirplink/radio_config.hpp"
#include "chirplink/rng.hpp"

namespace chirplink {

// Log-distance path loss with optional log-normal shadowing:
//   PL(d) = pl0 + 10 n log10(d/d0) + X,  X ~ N(0, sigma^2)
struct PathLossModel {
    double pl0_db = 40.0;
    double d0_m = 1.0;
    double exponent_n = 2.0;
    double shadowing_sigma_db = 0.0;

    void validate() const {
        if (d0_m <= 0) throw ConfigError("PathLossModel: d0_m must be > 0");
        if (exponent_n <= 0) throw ConfigError("PathLossModel: exponent_n must be > 0");
        if (shadowing_sigma_db < 0) throw ConfigError("PathLossModel: shadowing_sigma_db must be >= 0");
    }
};

inline double path_loss_db(const PathLossModel& model, double distance_m, Rng* rng = nullptr) {
    model.validate();
    if (distance_m < model.d0_m)
        throw DomainError("path_loss_db: distance " + std::to_string(distance_m) +
                          " m below reference distance " + std::to_string(model.d0_m) + " m");
    double loss = model.pl0_db + 10.0 * model.exponent_n * std::log10(distance_m / model.d0_m);
    if (rng && model.shadowing_sigma_db > 0.0)
        loss += rng->gauss(0.0, model.shadowing_sigma_db);
    return loss;
}

struct LinkBudget {
    double tx_power_dbm = 17.0;
    double tx_gain_dbi = 0.0;
    double rx_gain_dbi = 0.0;
    double noise_figure_db = 6.0;

    void validate() const {
        if (noise_figure_db < 0) throw ConfigError("LinkBudget: noise_figure_db must be >= 0");
    }

    // Thermal noise floor: -174 dBm/Hz + 10 log10(BW) + NF.
    double noise_floor_dbm(double bw_hz) const {
        return -174.0 + 10.0 * std::log10(bw_hz) + noise_figure_db;
    }
};

inline double received_power_dbm(const LinkBudget& budget, double loss_db) {
    budget.validate();
    return budget.tx_power_dbm + budget.tx_gain_dbi + budget.rx_gain_dbi - loss_db;
}

inline double snr_db(double prx_dbm, const LinkBudget& budget, double bw_hz) {
    budget.validate();
    return prx_dbm - budget.noise_floor_dbm(bw_hz);
}

// Per-SF minimum demodulation SNR.  Entries come from the Monte Carlo
// calibration sweep (the 10%-SER crossing); higher SF tolerates lower SNR,
// so the table must be strictly decreasing.
struct SnrThresholdTable {
    std::map<int, double> threshold_db;

    void validate() const {
        double prev = std::numeric_limits<double>::quiet_NaN();
        for (const auto& [sf, thr] : threshold_db) {
            if (!std::isnan(prev) && thr >= prev)
                throw ConfigError("SnrThresholdTable: threshold for SF " + std::to_string(sf) +
                                  " is not below the previous SF's threshold");
            prev = thr;
        }
    }

    double at(int sf) const {
        auto it = threshold_db.find(sf);
        if (it == threshold_db.end())
            throw ConfigError("SnrThresholdTable: no entry for SF " + std::to_string(sf));
        return it->second;
    }
};

inline double sensitivity_dbm(const RadioConfig& cfg, const LinkBudget& budget,
                              const SnrThresholdTable& table) {
    cfg.validate();
    return budget.noise_floor_dbm(cfg.bw_hz) + table.at(cfg.sf);
}

// Sentinel for the noiseless channel: apply_awgn becomes the identity.
inline constexpr double kNoNoiseSnrDb = std::numeric_limits<double>::infinity();

// Adds circular complex Gaussian noise with total variance 10^(-snr/10) per
// complex sample, relative to the unit-envelope signal.  Deterministic for a
// given stream.
inline IqBuffer apply_awgn(const IqBuffer& iq, double snr_db, Rng& rng) {
    if (std::isinf(snr_db) && snr_db > 0) return iq;
    IqBuffer out = iq;
    const double sigma_component = std::sqrt(std::pow(10.0, -snr_db / 10.0) / 2.0);
    for (auto& s : out.samples)
        s += std::complex<double>(rng.gauss(0.0, sigma_component), rng.gauss(0.0, sigma_component));
    return out;
}

} // namespace chirplink
