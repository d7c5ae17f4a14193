#pragma once

#include <cmath>
#include <numbers>

#include "chirplink/errors.hpp"

namespace chirplink {

// Closed-form symbol error rate of the dechirp-and-peak detector.
//
// After dechirping, the decision reduces to noncoherent detection of one of
// N = 2^sf orthogonal tones.  With per-sample SNR rho, the winning bin sees
// energy ratio g = N*rho (FFT processing gain), and
//
//   P_correct = Integral_0^inf e^-(x+g) I0(2 sqrt(x g)) (1 - e^-x)^(N-1) dx
//
// where x is the candidate-bin power normalized to the per-bin noise power.
// Evaluated by Simpson quadrature in the log domain; the Monte Carlo sweep
// in `sim` is the independent empirical check of this curve.

namespace detail {

inline double log_bessel_i0(double z) {
    if (z < 20.0) {
        // power series sum_k (z^2/4)^k / (k!)^2
        const double q = z * z / 4.0;
        double term = 1.0, sum = 1.0;
        for (int k = 1; k < 64; ++k) {
            term *= q / (static_cast<double>(k) * k);
            sum += term;
            if (term < sum * 1e-17) break;
        }
        return std::log(sum);
    }
    // asymptotic: I0(z) ~ e^z / sqrt(2 pi z) * (1 + 1/(8z) + 9/(128 z^2))
    const double inv = 1.0 / z;
    return z - 0.5 * std::log(2.0 * std::numbers::pi * z) +
           std::log1p(inv * (0.125 + inv * 9.0 / 128.0));
}

} // namespace detail

inline double analytic_ser(int sf, double snr_db) {
    if (sf < 7 || sf > 12)
        throw DomainError("analytic_ser: sf out of range [7,12]");
    const double n = static_cast<double>(1u << sf);
    if (std::isinf(snr_db) && snr_db > 0) return 0.0;
    const double g = n * std::pow(10.0, snr_db / 10.0);

    // integrate where the signal-bin density has mass
    const double spread = 12.0 * std::sqrt(g) + 40.0;
    const double lo = std::max(0.0, g - spread);
    const double hi = g + spread;
    const int steps = 4000; // even
    const double h = (hi - lo) / steps;

    auto integrand = [&](double x) {
        if (x <= 0.0) return 0.0;
        const double lg = -(x + g) + detail::log_bessel_i0(2.0 * std::sqrt(x * g)) +
                          (n - 1.0) * std::log1p(-std::exp(-x));
        return lg > -745.0 ? std::exp(lg) : 0.0;
    };

    double sum = integrand(lo) + integrand(hi);
    for (int i = 1; i < steps; ++i)
        sum += integrand(lo + i * h) * ((i % 2) ? 4.0 : 2.0);
    const double p_correct = sum * h / 3.0;

    const double ser = 1.0 - p_correct;
    if (ser < 0.0) return 0.0;
    const double floor_ser = 1.0 - 1.0 / n;
    return ser > floor_ser ? floor_ser : ser;
}

} // namespace chirplink
