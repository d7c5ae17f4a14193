#pragma once

#include <cstdint>
#include <string>

#include "chirplink/errors.hpp"

namespace chirplink {

// SX1278-style radio parameter set.  The default instance carries the
// 433 MHz / SF12 / 125 kHz / CR 4/5 / 17 dBm working point used by the
// point-to-point messaging experiments.
struct RadioConfig {
    double frequency_hz = 433e6;
    int sf = 12;                 // spreading factor, 7..12
    int bw_hz = 125000;          // 125k / 250k / 500k
    int cr_num = 1;              // coding rate index k in 4/(4+k), 1..4
    double tx_power_dbm = 17.0;
    int preamble_symbols = 8;    // programmed preamble length (sync adds 4.25)
    bool explicit_header = true;
    bool crc_enabled = true;
    bool ldro = true;            // low data rate optimization
    bool gray_mapping = true;    // bin <-> bit-group Gray mapping

    void validate() const {
        if (sf < 7 || sf > 12)
            throw ConfigError("sf must be in [7,12], got " + std::to_string(sf));
        if (cr_num < 1 || cr_num > 4)
            throw ConfigError("cr_num must be in [1,4], got " + std::to_string(cr_num));
        if (bw_hz != 125000 && bw_hz != 250000 && bw_hz != 500000)
            throw ConfigError("bw_hz must be 125000/250000/500000, got " + std::to_string(bw_hz));
        if (preamble_symbols < 4)
            throw ConfigError("preamble_symbols must be >= 4");
        if (frequency_hz <= 0)
            throw ConfigError("frequency_hz must be positive");
        if (ldro_required(sf, bw_hz) && !ldro)
            throw ConfigError("ldro must be enabled when symbol duration exceeds 16 ms");
    }

    int chips_per_symbol() const { return 1 << sf; }

    // LDRO is mandatory once T_sym = 2^sf / bw exceeds 16 ms.  Integer
    // comparison: 2^sf / bw > 16e-3  <=>  1000 * 2^sf > 16 * bw.
    static bool ldro_required(int sf, int bw_hz) {
        return 1000ll * (1ll << sf) > 16ll * bw_hz;
    }

    // Table-driven default working point (433 MHz band, max range settings).
    static RadioConfig p2p_default() {
        RadioConfig cfg;
        cfg.ldro = ldro_required(cfg.sf, cfg.bw_hz);
        cfg.validate();
        return cfg;
    }

    // Same radio at a different SF, with LDRO following the 16 ms rule.
    RadioConfig with_sf(int new_sf) const {
        RadioConfig cfg = *this;
        cfg.sf = new_sf;
        cfg.ldro = ldro_required(new_sf, cfg.bw_hz);
        cfg.validate();
        return cfg;
    }
};

} // namespace chirplink
