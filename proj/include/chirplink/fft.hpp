#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "chirplink/errors.hpp"

namespace chirplink {

// Iterative radix-2 FFT sized for chirp demodulation (N = 2^sf, at most 4096).
// Twiddles and the bit-reversal permutation are precomputed per instance so
// the per-symbol hot path is allocation free.
class Fft {
public:
    explicit Fft(std::size_t n) : n_(n) {
        if (n < 2 || (n & (n - 1)) != 0)
            throw DomainError("Fft: size must be a power of two >= 2");
        int log2n = 0;
        while ((std::size_t(1) << log2n) < n) ++log2n;
        log2n_ = log2n;

        rev_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = 0;
            for (int b = 0; b < log2n; ++b)
                if (i & (std::size_t(1) << b)) r |= std::size_t(1) << (log2n - 1 - b);
            rev_[i] = r;
        }

        twiddle_.resize(n / 2);
        for (std::size_t k = 0; k < n / 2; ++k) {
            const double a = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
            twiddle_[k] = {std::cos(a), std::sin(a)};
        }
    }

    std::size_t size() const { return n_; }

    // In-place forward DFT, unnormalized.
    void forward(std::vector<std::complex<double>>& x) const {
        if (x.size() != n_)
            throw DomainError("Fft: buffer size mismatch");
        for (std::size_t i = 0; i < n_; ++i)
            if (rev_[i] > i) std::swap(x[i], x[rev_[i]]);
        for (std::size_t len = 2; len <= n_; len <<= 1) {
            const std::size_t half = len >> 1;
            const std::size_t step = n_ / len;
            for (std::size_t base = 0; base < n_; base += len) {
                for (std::size_t k = 0; k < half; ++k) {
                    const std::complex<double> w = twiddle_[k * step];
                    const std::complex<double> u = x[base + k];
                    const std::complex<double> v = x[base + k + half] * w;
                    x[base + k] = u + v;
                    x[base + k + half] = u - v;
                }
            }
        }
    }

private:
    std::size_t n_;
    int log2n_ = 0;
    std::vector<std::size_t> rev_;
    std::vector<std::complex<double>> twiddle_;
};

} // namespace chirplink
