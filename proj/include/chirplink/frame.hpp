#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chirplink/airtime.hpp"
#include "chirplink/crc16.hpp"
#include "chirplink/fec.hpp"
#include "chirplink/gray.hpp"
#include "chirplink/iq.hpp"
#include "chirplink/radio_config.hpp"
#include "chirplink/text.hpp"

namespace chirplink {

// On-air frame layout (bit-exact; see docs/frame_format.md):
//
//   header  : 4 nibbles [len:8][cr:3][crc_flag:1][checksum:4], always
//             Hamming(8,4) coded -> 32 bits
//   payload : 2*PL nibbles (high nibble of each byte first), FEC at cr_num
//   crc16   : 4 nibbles MSB-first, FEC at cr_num, present iff crc_flag
//
// The concatenated bits are packed MSB-first into SF-bit groups, each group
// Gray-encoded to a chirp bin (unless gray_mapping is off), and the symbol
// stream is zero-padded up to the airtime symbol count so on-air duration
// matches payload_symbol_count exactly.  The header checksum is the XOR of
// the first three header nibbles.

struct FrameHeader {
    int payload_len = 0;
    int cr_num = 1;
    bool crc_enabled = true;
};

struct Frame {
    std::vector<std::uint8_t> payload;
    FrameHeader header;
    std::uint16_t crc = 0;

    static Frame from_text(std::string_view text, const RadioConfig& cfg) {
        if (text.size() > 255)
            throw OversizePayload("frame payload limited to 255 bytes, got " +
                                  std::to_string(text.size()));
        Frame f;
        f.payload.assign(text.begin(), text.end());
        f.header.payload_len = static_cast<int>(f.payload.size());
        f.header.cr_num = cfg.cr_num;
        f.header.crc_enabled = cfg.crc_enabled;
        f.crc = crc16(f.payload);
        return f;
    }
};

enum class FrameStatus { Ok, HeaderCorrupt, FecFailure, CrcMismatch };

inline const char* to_string(FrameStatus s) {
    switch (s) {
    case FrameStatus::Ok: return "ok";
    case FrameStatus::HeaderCorrupt: return "header_corrupt";
    case FrameStatus::FecFailure: return "fec_failure";
    case FrameStatus::CrcMismatch: return "crc_mismatch";
    }
    return "?";
}

struct FrameDecodeResult {
    FrameStatus status = FrameStatus::HeaderCorrupt;
    std::string text;                        // sanitized UTF-8 (valid payloads only)
    std::vector<std::uint8_t> payload_bytes; // raw bytes, also filled on CrcMismatch
    FrameHeader header;
    int corrected_bits = 0;

    bool ok() const { return status == FrameStatus::Ok; }
};

namespace detail {

inline std::uint8_t header_checksum(std::uint8_t n0, std::uint8_t n1, std::uint8_t n2) {
    return static_cast<std::uint8_t>((n0 ^ n1 ^ n2) & 0x0F);
}

inline void append_bits(std::vector<std::uint8_t>& bits, const CodedBits& coded) {
    bits.insert(bits.end(), coded.bits.begin(), coded.bits.end());
}

inline std::vector<std::uint8_t> bytes_to_nibbles(std::span<const std::uint8_t> bytes) {
    std::vector<std::uint8_t> nibbles;
    nibbles.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        nibbles.push_back(static_cast<std::uint8_t>(b >> 4));
        nibbles.push_back(static_cast<std::uint8_t>(b & 0x0F));
    }
    return nibbles;
}

} // namespace detail

inline SymbolBlock encode_frame(std::string_view text, const RadioConfig& cfg) {
    cfg.validate();
    if (!cfg.explicit_header)
        throw ConfigError("encode_frame: the link layer always transmits an explicit header; "
                          "the implicit_header flag only affects airtime accounting");
    const Frame frame = Frame::from_text(text, cfg);

    const auto n0 = static_cast<std::uint8_t>(frame.header.payload_len >> 4);
    const auto n1 = static_cast<std::uint8_t>(frame.header.payload_len & 0x0F);
    const auto n2 = static_cast<std::uint8_t>(((frame.header.cr_num & 0x7) << 1) |
                                              (frame.header.crc_enabled ? 1 : 0));
    const std::uint8_t header_nibbles[4] = {n0, n1, n2, detail::header_checksum(n0, n1, n2)};

    std::vector<std::uint8_t> bits;
    detail::append_bits(bits, fec_encode(header_nibbles, 4));

    const auto payload_nibbles = detail::bytes_to_nibbles(frame.payload);
    detail::append_bits(bits, fec_encode(payload_nibbles, cfg.cr_num));

    if (frame.header.crc_enabled) {
        const std::uint8_t crc_nibbles[4] = {
            static_cast<std::uint8_t>((frame.crc >> 12) & 0x0F),
            static_cast<std::uint8_t>((frame.crc >> 8) & 0x0F),
            static_cast<std::uint8_t>((frame.crc >> 4) & 0x0F),
            static_cast<std::uint8_t>(frame.crc & 0x0F)};
        detail::append_bits(bits, fec_encode(crc_nibbles, cfg.cr_num));
    }

    SymbolBlock block;
    block.sf = cfg.sf;
    const int target_symbols = payload_symbol_count(cfg, frame.header.payload_len);
    bits.resize(static_cast<std::size_t>(target_symbols) * cfg.sf, 0);

    for (int s = 0; s < target_symbols; ++s) {
        std::uint32_t group = 0;
        for (int b = 0; b < cfg.sf; ++b)
            group = (group << 1) | bits[static_cast<std::size_t>(s) * cfg.sf + b];
        block.symbols.push_back(static_cast<std::uint16_t>(
            cfg.gray_mapping ? gray_encode(group, cfg.sf) : group));
    }
    return block;
}

inline FrameDecodeResult decode_frame(const SymbolBlock& symbols, const RadioConfig& cfg) {
    cfg.validate();
    FrameDecodeResult result;

    std::vector<std::uint8_t> bits;
    bits.reserve(symbols.symbols.size() * cfg.sf);
    for (auto sym : symbols.symbols) {
        if (sym >= (1u << cfg.sf)) {
            result.status = FrameStatus::HeaderCorrupt;
            return result;
        }
        const std::uint32_t group = cfg.gray_mapping ? gray_decode(sym, cfg.sf) : sym;
        for (int b = cfg.sf - 1; b >= 0; --b)
            bits.push_back(static_cast<std::uint8_t>((group >> b) & 1));
    }

    if (bits.size() < 32) {
        result.status = FrameStatus::HeaderCorrupt;
        return result;
    }

    CodedBits header_bits{{bits.begin(), bits.begin() + 32}, 4};
    const FecDecodeResult header = fec_decode(header_bits);
    result.corrected_bits += header.corrected_bits;
    if (header.uncorrectable) {
        result.status = FrameStatus::HeaderCorrupt;
        return result;
    }
    const std::uint8_t n0 = header.nibbles[0], n1 = header.nibbles[1], n2 = header.nibbles[2];
    if (header.nibbles[3] != detail::header_checksum(n0, n1, n2)) {
        result.status = FrameStatus::HeaderCorrupt;
        return result;
    }
    result.header.payload_len = (n0 << 4) | n1;
    result.header.cr_num = (n2 >> 1) & 0x7;
    result.header.crc_enabled = (n2 & 1) != 0;
    if (result.header.cr_num < 1 || result.header.cr_num > 4) {
        result.status = FrameStatus::HeaderCorrupt;
        return result;
    }

    const int block = fec_block_bits(result.header.cr_num);
    const std::size_t payload_bits = static_cast<std::size_t>(2 * result.header.payload_len) * block;
    const std::size_t crc_bits = result.header.crc_enabled ? static_cast<std::size_t>(4 * block) : 0;
    if (bits.size() < 32 + payload_bits + crc_bits) {
        // header survived FEC but announces more data than is on the air
        result.status = FrameStatus::HeaderCorrupt;
        return result;
    }

    CodedBits payload_coded{{bits.begin() + 32, bits.begin() + 32 + payload_bits},
                            result.header.cr_num};
    const FecDecodeResult payload = fec_decode(payload_coded);
    result.corrected_bits += payload.corrected_bits;
    if (payload.uncorrectable) {
        result.status = FrameStatus::FecFailure;
        return result;
    }
    result.payload_bytes.reserve(result.header.payload_len);
    for (std::size_t i = 0; i + 1 < payload.nibbles.size(); i += 2)
        result.payload_bytes.push_back(
            static_cast<std::uint8_t>((payload.nibbles[i] << 4) | payload.nibbles[i + 1]));

    if (result.header.crc_enabled) {
        CodedBits crc_coded{{bits.begin() + 32 + payload_bits,
                             bits.begin() + 32 + payload_bits + crc_bits},
                            result.header.cr_num};
        const FecDecodeResult crc_dec = fec_decode(crc_coded);
        result.corrected_bits += crc_dec.corrected_bits;
        if (crc_dec.uncorrectable) {
            result.status = FrameStatus::FecFailure;
            return result;
        }
        const std::uint16_t rx_crc = static_cast<std::uint16_t>(
            (crc_dec.nibbles[0] << 12) | (crc_dec.nibbles[1] << 8) |
            (crc_dec.nibbles[2] << 4) | crc_dec.nibbles[3]);
        if (rx_crc != crc16(result.payload_bytes)) {
            result.status = FrameStatus::CrcMismatch;
            return result;
        }
    }

    result.status = FrameStatus::Ok;
    result.text = utf8_sanitize(std::string_view(
        reinterpret_cast<const char*>(result.payload_bytes.data()), result.payload_bytes.size()));
    return result;
}

} // namespace chirplink
