#pragma once

#include <cstdint>
#include <span>

namespace chirplink {

// CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, no reflection, no final xor.
// Check value: crc16 over ASCII "123456789" == 0x29B1.
inline std::uint16_t crc16(std::span<const std::uint8_t> payload) {
    std::uint16_t crc = 0xFFFF;
    for (std::uint8_t byte : payload) {
        crc ^= static_cast<std::uint16_t>(byte) << 8;
        for (int bit = 0; bit < 8; ++bit)
            crc = (crc & 0x8000) ? static_cast<std::uint16_t>((crc << 1) ^ 0x1021)
                                 : static_cast<std::uint16_t>(crc << 1);
    }
    return crc;
}

} // namespace chirplink
