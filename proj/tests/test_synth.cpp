#include <doctest.h>

#include <cmath>
#include <vector>

#include "srpband/errors.hpp"
#include "srpband/fft.hpp"
#include "srpband/synth.hpp"

using namespace srpband;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double rms(const std::vector<double>& v) {
    double p = 0.0;
    for (double s : v) p += s * s;
    return std::sqrt(p / static_cast<double>(v.size()));
}

// Mean bin magnitude of sig over [f_lo, f_hi].
double band_level(const Signal& sig, double f_lo, double f_hi) {
    const std::size_t n = next_power_of_two(sig.samples.size());
    const std::vector<cplx> spec = rfft(sig.samples, n);
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t m = 0; m < spec.size(); ++m) {
        const double f = static_cast<double>(m) * sig.sample_rate / static_cast<double>(n);
        if (f < f_lo || f > f_hi) continue;
        acc += std::abs(spec[m]);
        ++count;
    }
    REQUIRE(count > 0);
    return acc / static_cast<double>(count);
}

} // namespace

TEST_CASE("band-limited noise: unit RMS, deterministic, band-confined") {
    // 4096 samples at 8 kHz: the synthesis DFT length equals the sample count,
    // so no truncation smears energy outside the band.
    const double fs = 8000.0;
    const Band band = Band::from_hz(500.0, 2000.0);
    const Signal a = band_limited_noise(fs, 0.512, band, 99);

    CHECK(a.samples.size() == 4096);
    CHECK(rms(a.samples) == doctest::Approx(1.0).epsilon(1e-9));

    SUBCASE("same seed reproduces the same samples") {
        const Signal b = band_limited_noise(fs, 0.512, band, 99);
        REQUIRE(b.samples.size() == a.samples.size());
        for (std::size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i] == b.samples[i]);
    }
    SUBCASE("different seeds differ") {
        const Signal b = band_limited_noise(fs, 0.512, band, 100);
        double diff = 0.0;
        for (std::size_t i = 0; i < a.samples.size(); ++i)
            diff = std::max(diff, std::abs(a.samples[i] - b.samples[i]));
        CHECK(diff > 0.1);
    }
    SUBCASE("spectrum is zero outside the band") {
        const std::vector<cplx> spec = rfft(a.samples, 4096);
        for (std::size_t m = 0; m < spec.size(); ++m) {
            const double omega = kTwoPi * static_cast<double>(m) * fs / 4096.0;
            if (omega < band.omega_min - 1e-9 || omega > band.omega_max + 1e-9)
                CHECK(std::abs(spec[m]) <= 1e-9 * 4096.0);
        }
    }
}

TEST_CASE("speech-shaped noise tilts energy toward low frequencies") {
    const Signal s = speech_like_noise(16000.0, 0.5, Band::from_hz(100.0, 7000.0), 21);
    CHECK(rms(s.samples) == doctest::Approx(1.0).epsilon(1e-9));
    // 1/sqrt(f) tilt plus low resonances: the 300-700 Hz region must sit well
    // above 5-6 kHz.
    CHECK(band_level(s, 300.0, 700.0) > 2.0 * band_level(s, 5000.0, 6000.0));
}

TEST_CASE("synthesis rejects impossible requests") {
    CHECK_THROWS_AS(band_limited_noise(0.0, 0.1, Band::from_hz(100, 200), 1), ConfigError);
    CHECK_THROWS_AS(band_limited_noise(8000.0, 0.0, Band::from_hz(100, 200), 1), ConfigError);
    // A band squeezed between two DFT bins holds nothing to synthesize.
    CHECK_THROWS_AS(band_limited_noise(8000.0, 0.002, Band::from_hz(10.0, 20.0), 1),
                    EmptyBand);
}
