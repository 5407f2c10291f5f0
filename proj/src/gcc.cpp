#include "srpband/gcc.hpp"

#include <algorithm>
#include <cmath>

#include "srpband/errors.hpp"
#include "srpband/fft.hpp"

namespace srpband {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

} // namespace

const char* to_string(GccMode mode) {
    switch (mode) {
    case GccMode::Standard: return "standard";
    case GccMode::BandLimited: return "band_limited";
    case GccMode::BandLimitedNormalized: return "band_limited_normalized";
    }
    return "unknown";
}

GccMode gcc_mode_from_string(const std::string& name) {
    if (name == "standard") return GccMode::Standard;
    if (name == "band_limited") return GccMode::BandLimited;
    if (name == "band_limited_normalized") return GccMode::BandLimitedNormalized;
    throw ConfigError("unknown gcc mode: " + name);
}

CrossSpectrumPhat cross_power_spectrum_phat(const Signal& s_k, const Signal& s_l,
                                            double epsilon_rel) {
    s_k.validate();
    s_l.validate();
    if (s_k.sample_rate != s_l.sample_rate)
        throw SampleRateMismatch(s_k.sample_rate, s_l.sample_rate);
    if (epsilon_rel < 0.0)
        throw ConfigError("epsilon_rel must be non-negative");

    const std::size_t longest = std::max(s_k.samples.size(), s_l.samples.size());
    const std::size_t n = next_power_of_two(2 * longest);

    const std::vector<cplx> xk = rfft(s_k.samples, n);
    const std::vector<cplx> xl = rfft(s_l.samples, n);

    CrossSpectrumPhat spec;
    spec.sample_rate = s_k.sample_rate;
    spec.n_fft = n;
    spec.bin_spacing = 2.0 * kPi * s_k.sample_rate / static_cast<double>(n);
    spec.bins.resize(n / 2 + 1);

    double max_mag = 0.0;
    for (std::size_t m = 0; m < spec.bins.size(); ++m) {
        spec.bins[m] = xk[m] * std::conj(xl[m]);
        max_mag = std::max(max_mag, std::abs(spec.bins[m]));
    }

    const double cutoff = 10.0 * epsilon_rel * max_mag;
    for (auto& bin : spec.bins) {
        const double mag = std::abs(bin);
        if (mag == 0.0 || mag < cutoff)
            bin = cplx{0.0, 0.0};
        else
            bin /= mag;
    }
    return spec;
}

std::pair<std::size_t, std::size_t> band_bin_range(const CrossSpectrumPhat& spec, double omega_lo,
                                                   double omega_hi) {
    const double dw = spec.bin_spacing;
    const std::size_t last_bin = spec.bins.size() - 1;

    // Smallest m with m*dw >= omega_lo, computed so boundary ties land inside
    // the band regardless of how ceil rounds the quotient.
    double lo_q = std::max(0.0, omega_lo) / dw;
    std::size_t first = static_cast<std::size_t>(std::ceil(lo_q));
    while (static_cast<double>(first) * dw < omega_lo)
        ++first;
    while (first > 0 && static_cast<double>(first - 1) * dw >= omega_lo)
        --first;

    double hi_q = omega_hi / dw;
    std::size_t last = static_cast<std::size_t>(std::max(0.0, std::floor(hi_q)));
    while (static_cast<double>(last) * dw > omega_hi && last > 0)
        --last;
    while (last < last_bin && static_cast<double>(last + 1) * dw <= omega_hi)
        ++last;
    last = std::min(last, last_bin);

    return {first, last};
}

double gcc_eval(const CrossSpectrumPhat& spec, double omega_lo, double omega_hi, double tau) {
    if (spec.bins.empty() || spec.bin_spacing <= 0.0)
        throw NumericError("cross spectrum is empty");
    if (!(omega_lo < omega_hi))
        throw EmptyBand();

    const auto [first, last] = band_bin_range(spec, omega_lo, omega_hi);
    if (last < first || first >= spec.bins.size())
        throw EmptyBand();

    const double dw = spec.bin_spacing;
    // Phasor e^{-j omega tau} advanced by recurrence, re-anchored with a
    // direct evaluation every 64 bins to stop rounding drift.
    const cplx step = std::polar(1.0, -dw * tau);
    cplx ph{1.0, 0.0};
    double acc = 0.0;
    for (std::size_t m = first; m <= last; ++m) {
        if ((m - first) % 64 == 0)
            ph = std::polar(1.0, -(static_cast<double>(m) * dw) * tau);
        const cplx& b = spec.bins[m];
        acc += b.real() * ph.real() - b.imag() * ph.imag();
        ph *= step;
    }
    return acc * dw / kPi;
}

double gcc_eval_normalized(const CrossSpectrumPhat& spec, const Band& band, double omega_hat_max,
                           double tau) {
    band.validate();
    if (!(omega_hat_max > band.omega_min))
        throw EmptyBand();
    if (omega_hat_max > band.omega_max * (1.0 + 1e-12))
        throw NumericError("omega_hat_max exceeds the analysis band");

    const double factor = (band.omega_max - band.omega_min) / (omega_hat_max - band.omega_min);
    return factor * gcc_eval(spec, band.omega_min, omega_hat_max, tau);
}

} // namespace srpband
