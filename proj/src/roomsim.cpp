#include "srpband/roomsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "srpband/errors.hpp"
#include "srpband/fft.hpp"

namespace srpband {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

double hann_sinc(double u) {
    if (std::abs(u) >= static_cast<double>(kSincHalfWidth)) return 0.0;
    const double w = 0.5 * (1.0 + std::cos(kPi * u / static_cast<double>(kSincHalfWidth)));
    if (u == 0.0) return w;
    return w * std::sin(kPi * u) / (kPi * u);
}

// The image lattice piles up spurious in-phase energy below ~100 Hz (the
// mirrored sources satisfy no boundary condition there), which flattens the
// measured decay. This is the classic second-order companion high-pass that
// image-method implementations run over the finished response.
void image_highpass(std::vector<double>& taps, double fs) {
    const double w = 2.0 * kPi * 100.0 / fs;
    const double r1 = std::exp(-w);
    const double b1 = 2.0 * r1 * std::cos(w);
    const double b2 = -r1 * r1;
    const double a1 = -(1.0 + r1);

    double y0 = 0.0, y1 = 0.0, y2 = 0.0;
    for (double& x : taps) {
        y2 = y1;
        y1 = y0;
        y0 = b1 * y1 + b2 * y2 + x;
        x = y0 + a1 * y1 + r1 * y2;
    }
}

} // namespace

void RoomSpec::validate() const {
    for (double d : dimensions)
        if (!(d > 0.0)) throw ConfigError("room dimensions must be positive");
    if (rt60 < 0.0) throw ConfigError("rt60 must be non-negative");
    if (!(c.c > 0.0)) throw ConfigError("sound speed must be positive");
}

bool RoomSpec::strictly_inside(const Point3& p) const {
    return p.x > 0.0 && p.x < dimensions[0] && p.y > 0.0 && p.y < dimensions[1] && p.z > 0.0 &&
           p.z < dimensions[2];
}

Signal freefield_propagate(const Signal& src_signal, const Point3& source, const Point3& mic,
                           SoundSpeed c, std::size_t out_len, bool attenuate) {
    src_signal.validate();
    if (out_len < src_signal.samples.size())
        throw ConfigError("freefield output length must cover the input");

    const double d = distance(source, mic);
    const double delay_samples = d / c.c * src_signal.sample_rate;

    // Pad the DFT well past the shifted support so the circular shift acts as
    // a linear one.
    const std::size_t needed = std::max(
        out_len, src_signal.samples.size() + static_cast<std::size_t>(std::ceil(delay_samples)) + 1);
    const std::size_t n = next_power_of_two(2 * needed);

    std::vector<cplx> spec = rfft(src_signal.samples, n);
    for (std::size_t m = 1; m < n / 2; ++m) {
        const double phase = -2.0 * kPi * static_cast<double>(m) * delay_samples /
                             static_cast<double>(n);
        spec[m] *= cplx(std::cos(phase), std::sin(phase));
    }
    // Nyquist bin keeps the output real: only the real part of the shift
    // survives.
    spec[n / 2] *= std::cos(kPi * delay_samples);

    std::vector<double> shifted = irfft(spec, n);
    shifted.resize(out_len, 0.0);

    if (attenuate) {
        if (d <= 0.0) throw NumericError("1/r attenuation requested at zero distance");
        const double g = 1.0 / (4.0 * kPi * d);
        for (double& s : shifted) s *= g;
    }

    Signal out;
    out.sample_rate = src_signal.sample_rate;
    out.samples = std::move(shifted);
    return out;
}

double rt60_to_reflection(const RoomSpec& room) {
    room.validate();
    if (!(room.rt60 > 0.0)) throw ConfigError("reflection coefficient needs rt60 > 0");

    const double lx = room.dimensions[0], ly = room.dimensions[1], lz = room.dimensions[2];
    const double volume = lx * ly * lz;
    const double surface = 2.0 * (lx * ly + lx * lz + ly * lz);
    const double alpha = 0.161 * volume / (surface * room.rt60);
    if (alpha >= 1.0) throw AbsorptionOutOfRange(alpha);
    return std::sqrt(1.0 - alpha);
}

int default_image_order(const RoomSpec& room) {
    const double min_dim = std::min({room.dimensions[0], room.dimensions[1], room.dimensions[2]});
    return static_cast<int>(std::ceil(room.c.c * room.rt60 / min_dim)) + 1;
}

Rir image_method_rir(const RoomSpec& room, const Point3& source, const Point3& mic, double fs,
                     int max_order) {
    room.validate();
    if (!(fs > 0.0)) throw ConfigError("sample rate must be positive");
    if (max_order < 0) throw ConfigError("image order must be non-negative");
    if (!room.strictly_inside(source) || !room.strictly_inside(mic)) throw PositionOutsideRoom();
    const double d_direct = distance(source, mic);
    if (d_direct <= 1e-9) throw NumericError("source coincides with the microphone");

    const double beta = room.rt60 > 0.0 ? rt60_to_reflection(room) : 0.0;
    const double direct_samples = d_direct / room.c.c * fs;
    const std::size_t len = static_cast<std::size_t>(std::ceil(direct_samples + room.rt60 * fs)) +
                            kSincHalfWidth + 1;

    // Arrivals whose sinc window starts past the end of the buffer cannot
    // contribute; cull whole image shells by that distance.
    const double t_max = static_cast<double>(len - 1 + kSincHalfWidth);
    const double d_max = t_max / fs * room.c.c;

    // Wall-hit powers of beta, precomputed. Six exponent contributions, each
    // at most max_order + 1.
    std::vector<double> beta_pow(6 * (static_cast<std::size_t>(max_order) + 1) + 1);
    beta_pow[0] = 1.0;
    for (std::size_t e = 1; e < beta_pow.size(); ++e) beta_pow[e] = beta_pow[e - 1] * beta;

    const double s[3] = {source.x, source.y, source.z};
    const double x[3] = {mic.x, mic.y, mic.z};
    const double* L = room.dimensions.data();

    int n_axis[3];
    for (int i = 0; i < 3; ++i) {
        const int reach = static_cast<int>(std::floor(d_max / (2.0 * L[i]))) + 1;
        n_axis[i] = std::min(max_order, reach);
    }

    std::vector<double> taps(len, 0.0);
    for (int mx = -n_axis[0]; mx <= n_axis[0]; ++mx) {
        for (int my = -n_axis[1]; my <= n_axis[1]; ++my) {
            for (int mz = -n_axis[2]; mz <= n_axis[2]; ++mz) {
                for (int px = 0; px <= 1; ++px) {
                    // Keep exactly the images with at most 2 * order wall
                    // hits per axis: the mirrored branch spans m in
                    // [1 - n, n], which also makes the lattice truncation
                    // symmetric under reflecting the whole room setup.
                    if (px == 1 && mx == -n_axis[0]) continue;
                    for (int py = 0; py <= 1; ++py) {
                        if (py == 1 && my == -n_axis[1]) continue;
                        for (int pz = 0; pz <= 1; ++pz) {
                            if (pz == 1 && mz == -n_axis[2]) continue;
                            const double ix = (1 - 2 * px) * s[0] + 2.0 * mx * L[0] - x[0];
                            const double iy = (1 - 2 * py) * s[1] + 2.0 * my * L[1] - x[1];
                            const double iz = (1 - 2 * pz) * s[2] + 2.0 * mz * L[2] - x[2];
                            const double d = std::sqrt(ix * ix + iy * iy + iz * iz);
                            if (d > d_max) continue;

                            const int hits = std::abs(mx - px) + std::abs(mx) +
                                             std::abs(my - py) + std::abs(my) +
                                             std::abs(mz - pz) + std::abs(mz);
                            const double amp = beta_pow[static_cast<std::size_t>(hits)] /
                                               (4.0 * kPi * d);
                            if (amp == 0.0) continue;

                            const double t = d / room.c.c * fs;
                            const long j_lo = std::max<long>(
                                0L, static_cast<long>(std::ceil(t)) - kSincHalfWidth);
                            const long j_hi = std::min<long>(
                                static_cast<long>(len) - 1,
                                static_cast<long>(std::floor(t)) + kSincHalfWidth);
                            for (long j = j_lo; j <= j_hi; ++j)
                                taps[static_cast<std::size_t>(j)] +=
                                    amp * hann_sinc(static_cast<double>(j) - t);
                        }
                    }
                }
            }
        }
    }

    // A single direct path has no lattice artifact; filtering it would only
    // distort the pulse.
    if (beta > 0.0) image_highpass(taps, fs);

    Rir rir;
    rir.sample_rate = fs;
    rir.taps = std::move(taps);
    return rir;
}

std::vector<Signal> simulate_event(const RoomSpec& room, const Point3& source,
                                   const ArrayGeometry& array, const Signal& src_signal,
                                   double fs) {
    room.validate();
    src_signal.validate();
    if (src_signal.sample_rate != fs) throw SampleRateMismatch(src_signal.sample_rate, fs);

    std::vector<Signal> out;
    out.reserve(array.size());

    if (room.rt60 == 0.0) {
        double max_delay_samples = 0.0;
        for (const Point3& mic : array.mics())
            max_delay_samples =
                std::max(max_delay_samples, distance(source, mic) / room.c.c * fs);
        const std::size_t out_len = src_signal.samples.size() +
                                    static_cast<std::size_t>(std::ceil(max_delay_samples)) + 1;
        for (const Point3& mic : array.mics())
            out.push_back(freefield_propagate(src_signal, source, mic, room.c, out_len));
        return out;
    }

    const int order = default_image_order(room);
    std::vector<Rir> rirs;
    rirs.reserve(array.size());
    std::size_t max_rir_len = 0;
    for (const Point3& mic : array.mics()) {
        rirs.push_back(image_method_rir(room, source, mic, fs, order));
        max_rir_len = std::max(max_rir_len, rirs.back().taps.size());
    }

    const std::size_t out_len = src_signal.samples.size() + max_rir_len - 1;
    for (const Rir& rir : rirs) {
        Signal sig;
        sig.sample_rate = fs;
        sig.samples = fft_convolve(src_signal.samples, rir.taps);
        sig.samples.resize(out_len, 0.0);
        out.push_back(std::move(sig));
    }
    return out;
}

double schroeder_rt60(const Rir& rir) {
    if (!(rir.sample_rate > 0.0)) throw ConfigError("impulse response needs a sample rate");
    const std::size_t n = rir.taps.size();
    if (n == 0) throw InsufficientDecay();

    // Backward-integrated energy decay curve.
    std::vector<double> energy(n);
    double acc = 0.0;
    for (std::size_t i = n; i-- > 0;) {
        acc += rir.taps[i] * rir.taps[i];
        energy[i] = acc;
    }
    const double total = energy[0];
    if (!(total > 0.0)) throw InsufficientDecay();

    std::size_t t5 = n, t35 = n;
    for (std::size_t i = 0; i < n; ++i) {
        const double db = energy[i] > 0.0
                              ? 10.0 * std::log10(energy[i] / total)
                              : -std::numeric_limits<double>::infinity();
        if (t5 == n && db <= -5.0) t5 = i;
        if (db <= -35.0) {
            t35 = i;
            break;
        }
    }
    if (t35 == n || t5 == n) throw InsufficientDecay();

    // Least-squares line through the finite part of the -5..-35 dB span.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t count = 0;
    for (std::size_t i = t5; i <= t35; ++i) {
        if (!(energy[i] > 0.0)) continue;
        const double t = static_cast<double>(i) / rir.sample_rate;
        const double db = 10.0 * std::log10(energy[i] / total);
        sx += t;
        sy += db;
        sxx += t * t;
        sxy += t * db;
        ++count;
    }
    if (count < 2) throw InsufficientDecay();

    const double denom = static_cast<double>(count) * sxx - sx * sx;
    if (denom <= 0.0) throw InsufficientDecay();
    const double slope = (static_cast<double>(count) * sxy - sx * sy) / denom; // dB per second
    if (slope >= 0.0) throw InsufficientDecay();
    return -60.0 / slope;
}

} // namespace srpband
