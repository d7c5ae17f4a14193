#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "chirplink/errors.hpp"

namespace chirplink {

// Nibble-granularity forward error correction, coding rate 4/(4+cr_num).
//
//   cr_num 1  ->  one even-parity bit per nibble           (detect only)
//   cr_num 2  ->  parity bits p0,p1                        (detect only)
//   cr_num 3  ->  parity bits p0,p1,p2                     (detect only)
//   cr_num 4  ->  Hamming(8,4), corrects 1 bit per block, detects 2
//
// Parity equations over data bits d0..d3 (d0 = LSB of the nibble):
//   p0 = d0^d1^d2   p1 = d1^d2^d3   p2 = d0^d1^d3   p3 = d0^d2^d3
// Codeword bit order on air, MSB first: d3 d2 d1 d0 p0 p1 p2 p3 (truncated
// after the parity count for cr_num < 4; cr_num 1 carries the single even
// parity of the whole nibble instead of p0).

struct CodedBits {
    std::vector<std::uint8_t> bits; // one bit per entry, 0/1
    int cr_num = 1;
};

struct FecDecodeResult {
    std::vector<std::uint8_t> nibbles;
    int corrected_bits = 0;
    bool uncorrectable = false; // any block failed parity/syndrome checks
};

namespace detail {

inline int bit(unsigned v, int i) { return (v >> i) & 1; }

inline std::uint8_t hamming_parities(std::uint8_t nibble) {
    const int d0 = bit(nibble, 0), d1 = bit(nibble, 1), d2 = bit(nibble, 2), d3 = bit(nibble, 3);
    const int p0 = d0 ^ d1 ^ d2;
    const int p1 = d1 ^ d2 ^ d3;
    const int p2 = d0 ^ d1 ^ d3;
    const int p3 = d0 ^ d2 ^ d3;
    return static_cast<std::uint8_t>(p0 | (p1 << 1) | (p2 << 2) | (p3 << 3));
}

} // namespace detail

inline int fec_block_bits(int cr_num) { return 4 + cr_num; }

inline CodedBits fec_encode(std::span<const std::uint8_t> nibbles, int cr_num) {
    if (cr_num < 1 || cr_num > 4)
        throw ConfigError("fec_encode: cr_num must be in [1,4]");
    CodedBits out;
    out.cr_num = cr_num;
    out.bits.reserve(nibbles.size() * fec_block_bits(cr_num));
    for (std::uint8_t nib : nibbles) {
        if (nib > 0x0F)
            throw DomainError("fec_encode: nibble value " + std::to_string(nib) +
                              " exceeds 15");
        for (int i = 3; i >= 0; --i)
            out.bits.push_back(static_cast<std::uint8_t>(detail::bit(nib, i)));
        if (cr_num == 1) {
            const int even = detail::bit(nib, 0) ^ detail::bit(nib, 1) ^
                             detail::bit(nib, 2) ^ detail::bit(nib, 3);
            out.bits.push_back(static_cast<std::uint8_t>(even));
        } else {
            const std::uint8_t p = detail::hamming_parities(nib);
            for (int i = 0; i < cr_num; ++i)
                out.bits.push_back(static_cast<std::uint8_t>(detail::bit(p, i)));
        }
    }
    return out;
}

inline FecDecodeResult fec_decode(const CodedBits& coded) {
    const int cr_num = coded.cr_num;
    if (cr_num < 1 || cr_num > 4)
        throw ConfigError("fec_decode: cr_num must be in [1,4]");
    const int block = fec_block_bits(cr_num);
    if (coded.bits.size() % static_cast<std::size_t>(block) != 0)
        throw FramingError("fec_decode: bit count " + std::to_string(coded.bits.size()) +
                           " is not a multiple of " + std::to_string(block));

    FecDecodeResult result;
    result.nibbles.reserve(coded.bits.size() / block);
    for (std::size_t off = 0; off < coded.bits.size(); off += block) {
        std::uint8_t nib = 0;
        for (int i = 0; i < 4; ++i)
            nib = static_cast<std::uint8_t>((nib << 1) | (coded.bits[off + i] & 1));
        std::uint8_t rx_par = 0;
        for (int i = 0; i < cr_num; ++i)
            rx_par |= static_cast<std::uint8_t>((coded.bits[off + 4 + i] & 1) << i);

        if (cr_num == 1) {
            const int even = detail::bit(nib, 0) ^ detail::bit(nib, 1) ^
                             detail::bit(nib, 2) ^ detail::bit(nib, 3);
            if (even != rx_par) result.uncorrectable = true;
        } else if (cr_num < 4) {
            const std::uint8_t expect = detail::hamming_parities(nib) & ((1u << cr_num) - 1);
            if (expect != rx_par) result.uncorrectable = true;
        } else {
            const std::uint8_t syndrome = detail::hamming_parities(nib) ^ rx_par;
            switch (syndrome) {
            case 0b0000:
                break;
            // weight-1 syndromes: a parity bit flipped, data intact
            case 0b0001: case 0b0010: case 0b0100: case 0b1000:
                ++result.corrected_bits;
                break;
            // weight-3 syndromes: one data bit flipped
            case 0b1101: nib ^= 1u << 0; ++result.corrected_bits; break;
            case 0b0111: nib ^= 1u << 1; ++result.corrected_bits; break;
            case 0b1011: nib ^= 1u << 2; ++result.corrected_bits; break;
            case 0b1110: nib ^= 1u << 3; ++result.corrected_bits; break;
            default:
                // weight 2 or 4: double error, not correctable
                result.uncorrectable = true;
                break;
            }
        }
        result.nibbles.push_back(nib & 0x0F);
    }
    return result;
}

} // namespace chirplink
