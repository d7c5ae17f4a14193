#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "chirplink/errors.hpp"

namespace chirplink {

// Ordered chirp-bin values produced under a given spreading factor.
struct SymbolBlock {
    std::vector<std::uint16_t> symbols;
    int sf = 7;

    void validate() const {
        if (sf < 7 || sf > 12)
            throw DomainError("SymbolBlock: sf out of range");
        const std::uint32_t n = 1u << sf;
        for (auto s : symbols)
            if (s >= n)
                throw DomainError("SymbolBlock: symbol " + std::to_string(s) +
                                  " >= 2^sf (" + std::to_string(n) + ")");
    }
};

// Complex baseband samples at sample_rate_hz = bw_hz * oversample.
struct IqBuffer {
    std::vector<std::complex<double>> samples;
    double sample_rate_hz = 125000.0;
    int oversample = 1;
};

} // namespace chirplink
