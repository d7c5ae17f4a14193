#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "chirplink/fft.hpp"
#include "chirplink/modem.hpp"

using namespace chirplink;

TEST_CASE("chirp samples have unit envelope and continuous phase") {
    Modem modem(8);
    std::vector<std::complex<double>> iq(modem.samples_per_symbol());
    modem.modulate_symbol(97, iq.data());
    double max_step = 0.0;
    for (std::size_t i = 0; i < iq.size(); ++i) {
        CHECK(std::abs(iq[i]) == Catch::Approx(1.0).margin(1e-12));
        if (i > 0)
            max_step = std::max(max_step, std::abs(std::arg(iq[i] * std::conj(iq[i - 1]))));
    }
    // The instantaneous frequency stays inside the sweep band, so phase can
    // never jump by more than pi per chip, including across the wrap.
    CHECK(max_step <= Catch::Approx(3.141593).margin(1e-6));
}

TEST_CASE("dechirped symbol concentrates all energy in its own bin") {
    const int sf = 9;
    const std::size_t n = 1u << sf;
    Modem modem(sf);
    std::vector<std::complex<double>> sym(n), base(n), mixed(n);
    modem.modulate_symbol(321, sym.data());
    modem.modulate_symbol(0, base.data());
    for (std::size_t i = 0; i < n; ++i) mixed[i] = sym[i] * std::conj(base[i]);
    Fft fft(n);
    fft.forward(mixed);
    CHECK(std::abs(mixed[321]) == Catch::Approx(static_cast<double>(n)).margin(1e-6));
    double off_peak = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (i != 321) off_peak = std::max(off_peak, std::abs(mixed[i]));
    CHECK(off_peak < 1e-6);
}

TEST_CASE("every symbol value survives a noiseless round trip") {
    const int sf = 7;
    Modem modem(sf);
    std::vector<std::complex<double>> iq(modem.samples_per_symbol());
    for (std::uint16_t s = 0; s < (1u << sf); ++s) {
        modem.modulate_symbol(s, iq.data());
        CHECK(modem.demodulate_symbol(iq.data()) == s);
    }
}

TEST_CASE("round trip holds at the highest spreading factor") {
    const int sf = 12;
    Modem modem(sf);
    std::vector<std::complex<double>> iq(modem.samples_per_symbol());
    std::mt19937 gen(7);
    std::uniform_int_distribution<int> dist(0, (1 << sf) - 1);
    for (int i = 0; i < 32; ++i) {
        const auto s = static_cast<std::uint16_t>(dist(gen));
        modem.modulate_symbol(s, iq.data());
        double peak = 0.0;
        CHECK(modem.demodulate_symbol(iq.data(), &peak) == s);
        CHECK(peak == Catch::Approx(4096.0).margin(1e-6));
    }
}

TEST_CASE("oversampled modulation decimates back to the same decision") {
    const int sf = 7, k = 4;
    Modem modem(sf, k);
    CHECK(modem.samples_per_symbol() == (1u << sf) * k);
    std::vector<std::complex<double>> iq(modem.samples_per_symbol());
    for (std::uint16_t s = 0; s < (1u << sf); s += 5) {
        modem.modulate_symbol(s, iq.data());
        CHECK(modem.demodulate_symbol(iq.data()) == s);
    }
}

TEST_CASE("block modulate and demodulate are inverses") {
    RadioConfig cfg = RadioConfig::p2p_default();
    cfg.sf = 8;
    cfg.ldro = false;
    SymbolBlock block;
    block.sf = 8;
    block.symbols = {0, 1, 255, 128, 37, 200, 99};
    const IqBuffer iq = modulate(block, cfg);
    CHECK(iq.samples.size() == block.symbols.size() * 256);
    CHECK(iq.sample_rate_hz == Catch::Approx(125000.0));
    const DemodResult out = demodulate(iq, cfg);
    CHECK(out.symbols.symbols == block.symbols);
    REQUIRE(out.peak_magnitude.size() == block.symbols.size());
    for (double p : out.peak_magnitude) CHECK(p == Catch::Approx(256.0).margin(1e-6));
}

TEST_CASE("demodulation rejects buffers that do not divide into symbols") {
    RadioConfig cfg = RadioConfig::p2p_default();
    cfg.sf = 7;
    cfg.ldro = false;
    IqBuffer iq;
    iq.sample_rate_hz = 125000.0;
    iq.oversample = 1;
    iq.samples.resize(130); // not a multiple of 128
    CHECK_THROWS_AS(demodulate(iq, cfg), FramingError);
}

TEST_CASE("symbol values outside the alphabet are rejected") {
    Modem modem(7);
    std::vector<std::complex<double>> iq(modem.samples_per_symbol());
    CHECK_THROWS_AS(modem.modulate_symbol(128, iq.data()), DomainError);
}

TEST_CASE("fft matches a direct dft on a small vector") {
    const std::size_t n = 16;
    std::mt19937 gen(3);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<std::complex<double>> x(n);
    for (auto& v : x) v = {dist(gen), dist(gen)};
    std::vector<std::complex<double>> direct(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t t = 0; t < n; ++t)
            acc += x[t] * std::exp(std::complex<double>(0.0, -2.0 * M_PI * double(k * t) / n));
        direct[k] = acc;
    }
    Fft fft(n);
    fft.forward(x);
    for (std::size_t k = 0; k < n; ++k) {
        CHECK(x[k].real() == Catch::Approx(direct[k].real()).margin(1e-9));
        CHECK(x[k].imag() == Catch::Approx(direct[k].imag()).margin(1e-9));
    }
}

TEST_CASE("fft size must be a power of two") {
    CHECK_THROWS_AS(Fft(12), DomainError);
}
