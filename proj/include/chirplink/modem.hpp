#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "chirplink/fft.hpp"
#include "chirplink/iq.hpp"
#include "chirplink/radio_config.hpp"

namespace chirplink {

// Demodulated bins plus the spectral peak magnitude each decision was based
// on.  The metric is the unnormalized |FFT| value at the winning bin.
struct DemodResult {
    SymbolBlock symbols;
    std::vector<double> peak_magnitude;
};

// CSS modulator/demodulator.
//
// A symbol s maps to an up-chirp whose instantaneous frequency starts at
// offset s*BW/2^sf and sweeps upward, wrapping at the band edge.  With
// tau = (s + t) mod N in chip units (N = 2^sf), the baseband phase is
//
//   phi(tau) = 2*pi*(tau^2/(2N) - tau/2)
//
// which is continuous across the wrap and, after multiplication by the
// conjugate base chirp, leaves a pure tone at bin s.  Because tau only takes
// values m/K on the sample grid (K = oversample), one period of the base
// up-chirp sampled at rate K*BW serves as a lookup table for every symbol:
// symbol s starts K*s entries into the table.
//
// Demodulation is noncoherent: decimate to chip rate, dechirp against the
// conjugate base chirp, take the 2^sf-point spectrum, pick the magnitude
// peak.  Ties break to the lowest bin index.
class Modem {
public:
    Modem(int sf, int oversample = 1)
        : sf_(sf), n_(std::size_t(1) << sf), oversample_(oversample), fft_(std::size_t(1) << sf) {
        if (sf < 7 || sf > 12)
            throw DomainError("Modem: sf out of range [7,12]");
        if (oversample < 1)
            throw DomainError("Modem: oversample must be >= 1");
        const std::size_t nk = n_ * static_cast<std::size_t>(oversample);
        chirp_.resize(nk);
        for (std::size_t m = 0; m < nk; ++m) {
            const double tau = static_cast<double>(m) / oversample;
            const double phase = 2.0 * std::numbers::pi *
                                 (tau * tau / (2.0 * static_cast<double>(n_)) - tau / 2.0);
            chirp_[m] = {std::cos(phase), std::sin(phase)};
        }
        dechirp_.resize(n_);
        for (std::size_t u = 0; u < n_; ++u)
            dechirp_[u] = std::conj(chirp_[u * static_cast<std::size_t>(oversample)]);
        work_.resize(n_);
    }

    int sf() const { return sf_; }
    int oversample() const { return oversample_; }
    std::size_t samples_per_symbol() const { return n_ * static_cast<std::size_t>(oversample_); }

    void modulate_symbol(std::uint16_t symbol, std::complex<double>* out) const {
        if (symbol >= n_)
            throw DomainError("modulate_symbol: symbol " + std::to_string(symbol) +
                              " outside alphabet of size " + std::to_string(n_));
        const std::size_t nk = samples_per_symbol();
        const std::size_t start = static_cast<std::size_t>(symbol) * oversample_;
        for (std::size_t i = 0; i < nk; ++i)
            out[i] = chirp_[(start + i) % nk];
    }

    // Dechirp-and-peak decision for one symbol period of samples.
    std::uint16_t demodulate_symbol(const std::complex<double>* in, double* peak_out = nullptr) const {
        for (std::size_t u = 0; u < n_; ++u)
            work_[u] = in[u * static_cast<std::size_t>(oversample_)] * dechirp_[u];
        fft_.forward(work_);
        std::size_t best = 0;
        double best_mag = std::abs(work_[0]);
        for (std::size_t k = 1; k < n_; ++k) {
            const double mag = std::abs(work_[k]);
            if (mag > best_mag) {
                best_mag = mag;
                best = k;
            }
        }
        if (peak_out) *peak_out = best_mag;
        return static_cast<std::uint16_t>(best);
    }

private:
    int sf_;
    std::size_t n_;
    int oversample_;
    Fft fft_;
    std::vector<std::complex<double>> chirp_;    // one base up-chirp period, oversampled
    std::vector<std::complex<double>> dechirp_;  // conjugate base chirp at chip rate
    mutable std::vector<std::complex<double>> work_;
};

inline IqBuffer modulate(const SymbolBlock& symbols, const RadioConfig& cfg, int oversample = 1) {
    cfg.validate();
    symbols.validate();
    if (symbols.sf != cfg.sf)
        throw DomainError("modulate: SymbolBlock sf does not match config sf");
    Modem modem(cfg.sf, oversample);
    IqBuffer iq;
    iq.oversample = oversample;
    iq.sample_rate_hz = static_cast<double>(cfg.bw_hz) * oversample;
    iq.samples.resize(symbols.symbols.size() * modem.samples_per_symbol());
    std::size_t offset = 0;
    for (auto s : symbols.symbols) {
        modem.modulate_symbol(s, iq.samples.data() + offset);
        offset += modem.samples_per_symbol();
    }
    return iq;
}

inline DemodResult demodulate(const IqBuffer& iq, const RadioConfig& cfg) {
    cfg.validate();
    Modem modem(cfg.sf, iq.oversample);
    const std::size_t sps = modem.samples_per_symbol();
    if (iq.samples.size() % sps != 0)
        throw FramingError("demodulate: buffer length " + std::to_string(iq.samples.size()) +
                           " is not a whole number of " + std::to_string(sps) + "-sample symbols");
    const std::size_t count = iq.samples.size() / sps;
    DemodResult result;
    result.symbols.sf = cfg.sf;
    result.symbols.symbols.resize(count);
    result.peak_magnitude.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        double peak = 0.0;
        result.symbols.symbols[i] = modem.demodulate_symbol(iq.samples.data() + i * sps, &peak);
        result.peak_magnitude[i] = peak;
    }
    return result;
}

} // namespace chirplink
