#pragma once

#include <string>

#include "chirplink/radio_config.hpp"

namespace chirplink {

// Airtime and data-rate arithmetic for SX127x-class CSS links (the AN1200.22
// symbol accounting).  All durations are seconds.

inline double symbol_duration(const RadioConfig& cfg) {
    cfg.validate();
    return static_cast<double>(1 << cfg.sf) / static_cast<double>(cfg.bw_hz);
}

// Number of on-air symbols for the header+payload block:
//   8 + max(ceil((8 PL - 4 SF + 28 + 16 CRC - 20 IH) / (4 (SF - 2 DE))) * (CR + 4), 0)
inline int payload_symbol_count(const RadioConfig& cfg, int payload_len) {
    cfg.validate();
    if (payload_len < 0 || payload_len > 255)
        throw OversizePayload("payload_len must be in [0,255], got " + std::to_string(payload_len));
    const int crc = cfg.crc_enabled ? 1 : 0;
    const int ih = cfg.explicit_header ? 0 : 1;
    const int de = cfg.ldro ? 1 : 0;
    const int num = 8 * payload_len - 4 * cfg.sf + 28 + 16 * crc - 20 * ih;
    const int den = 4 * (cfg.sf - 2 * de);
    // ceil(num/den) for positive den, correct for negative numerators
    const int ceil_q = (num > 0) ? (num + den - 1) / den : 0;
    const int block = ceil_q * (cfg.cr_num + 4);
    return 8 + (block > 0 ? block : 0);
}

inline double time_on_air(const RadioConfig& cfg, int payload_len) {
    const int n_payload = payload_symbol_count(cfg, payload_len);
    return (cfg.preamble_symbols + 4.25 + n_payload) * symbol_duration(cfg);
}

// Raw PHY bit rate: SF * (BW / 2^SF) * 4/(4+CR), bits per second.
inline double bit_rate(const RadioConfig& cfg) {
    cfg.validate();
    return cfg.sf * (static_cast<double>(cfg.bw_hz) / (1 << cfg.sf)) *
           (4.0 / (4.0 + cfg.cr_num));
}

} // namespace chirplink
