#pragma once

#include <cstdint>
#include <string>

#include "chirplink/errors.hpp"

namespace chirplink {

// Gray mapping between bit groups and chirp bins.  Adjacent bins differ in a
// single bit, so a +-1 bin error corrupts one payload bit instead of many.

inline std::uint32_t gray_encode(std::uint32_t value, int sf) {
    if (sf < 1 || sf > 16 || value >= (1u << sf))
        throw DomainError("gray_encode: value " + std::to_string(value) +
                          " out of range for sf " + std::to_string(sf));
    return value ^ (value >> 1);
}

inline std::uint32_t gray_decode(std::uint32_t code, int sf) {
    if (sf < 1 || sf > 16 || code >= (1u << sf))
        throw DomainError("gray_decode: code " + std::to_string(code) +
                          " out of range for sf " + std::to_string(sf));
    std::uint32_t value = code;
    for (std::uint32_t shift = 1; shift < 16; shift <<= 1)
        value ^= value >> shift;
    return value & ((1u << sf) - 1);
}

} // namespace chirplink
