#include "srpband/synth.hpp"

#include <cmath>
#include <functional>
#include <vector>

#include "srpband/errors.hpp"
#include "srpband/fft.hpp"
#include "srpband/rng.hpp"

namespace srpband {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Formant-like resonances of the speech-shaped weighting: center (Hz),
// half-width (Hz), linear gain on top of the pink tilt.
struct Resonance {
    double f_center;
    double width;
    double gain;
};
constexpr Resonance kResonances[] = {
    {500.0, 80.0, 6.0}, {1000.0, 120.0, 5.0}, {2000.0, 180.0, 4.0}, {3300.0, 250.0, 3.0}};

Signal synth_from_weight(double sample_rate, double duration_s, const Band& band,
                         std::uint64_t seed, const std::function<double(double)>& weight) {
    band.validate();
    if (!(sample_rate > 0.0)) throw ConfigError("sample rate must be positive");
    if (!(duration_s > 0.0)) throw ConfigError("duration must be positive");

    const auto n_samples = static_cast<std::size_t>(std::llround(duration_s * sample_rate));
    if (n_samples == 0) throw ConfigError("duration shorter than one sample");
    const std::size_t n = next_power_of_two(n_samples);

    std::vector<cplx> spec(n / 2 + 1, cplx{0.0, 0.0});
    Rng rng(seed);
    bool any = false;
    for (std::size_t m = 1; m < n / 2; ++m) {
        const double f = static_cast<double>(m) * sample_rate / static_cast<double>(n);
        const double omega = kTwoPi * f;
        if (omega < band.omega_min || omega > band.omega_max) continue;
        const double phase = rng.uniform(0.0, kTwoPi);
        spec[m] = std::polar(weight(f), phase);
        any = true;
    }
    if (!any) throw EmptyBand();

    std::vector<double> time = irfft(spec, n);
    time.resize(n_samples);

    double power = 0.0;
    for (double s : time) power += s * s;
    const double rms = std::sqrt(power / static_cast<double>(n_samples));
    if (rms > 0.0)
        for (double& s : time) s /= rms;

    Signal out;
    out.sample_rate = sample_rate;
    out.samples = std::move(time);
    return out;
}

} // namespace

Signal band_limited_noise(double sample_rate, double duration_s, const Band& band,
                          std::uint64_t seed) {
    return synth_from_weight(sample_rate, duration_s, band, seed, [](double) { return 1.0; });
}

Signal speech_like_noise(double sample_rate, double duration_s, const Band& band,
                         std::uint64_t seed) {
    const double f_ref = std::max(1.0, band.f_min_hz());
    return synth_from_weight(sample_rate, duration_s, band, seed, [f_ref](double f) {
        double w = std::sqrt(f_ref / f);
        for (const Resonance& r : kResonances) {
            const double d = (f - r.f_center) / r.width;
            w *= 1.0 + r.gain / (1.0 + d * d);
        }
        return w;
    });
}

} // namespace srpband
