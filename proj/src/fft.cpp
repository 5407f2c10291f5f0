#include "srpband/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace srpband {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
} // namespace

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

void fft(std::vector<cplx>& data, bool inverse) {
    const std::size_t n = data.size();
    if (!is_power_of_two(n)) throw std::invalid_argument("fft: size must be a power of two");
    if (n == 1) return;

    // Bit-reversal permutation.
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }

    // Twiddle table for the largest stage; smaller stages stride through it.
    const std::size_t half = n / 2;
    std::vector<cplx> tw(half);
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t i = 0; i < half; ++i) {
        const double a = sign * kTwoPi * static_cast<double>(i) / static_cast<double>(n);
        tw[i] = cplx(std::cos(a), std::sin(a));
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t stride = n / len;
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cplx u = data[start + k];
                const cplx v = data[start + k + len / 2] * tw[k * stride];
                data[start + k] = u + v;
                data[start + k + len / 2] = u - v;
            }
        }
    }

    if (inverse) {
        const double scale = 1.0 / static_cast<double>(n);
        for (auto& x : data) x *= scale;
    }
}

std::vector<cplx> rfft(const std::vector<double>& signal, std::size_t n) {
    if (!is_power_of_two(n) || n < signal.size())
        throw std::invalid_argument("rfft: n must be a power of two >= signal length");
    std::vector<cplx> buf(n, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < signal.size(); ++i) buf[i] = cplx(signal[i], 0.0);
    fft(buf, false);
    buf.resize(n / 2 + 1);
    return buf;
}

std::vector<double> fft_convolve(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) return {};
    const std::size_t out_len = a.size() + b.size() - 1;
    const std::size_t n = next_power_of_two(out_len);
    std::vector<cplx> fa = rfft(a, n);
    const std::vector<cplx> fb = rfft(b, n);
    for (std::size_t m = 0; m < fa.size(); ++m) fa[m] *= fb[m];
    std::vector<double> full = irfft(fa, n);
    full.resize(out_len);
    return full;
}

std::vector<double> irfft(const std::vector<cplx>& half_spectrum, std::size_t n) {
    if (!is_power_of_two(n) || half_spectrum.size() != n / 2 + 1)
        throw std::invalid_argument("irfft: spectrum size must be n/2+1 with n a power of two");
    std::vector<cplx> buf(n);
    buf[0] = cplx(half_spectrum[0].real(), 0.0);
    buf[n / 2] = cplx(half_spectrum[n / 2].real(), 0.0);
    for (std::size_t m = 1; m < n / 2; ++m) {
        buf[m] = half_spectrum[m];
        buf[n - m] = std::conj(half_spectrum[m]);
    }
    fft(buf, true);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = buf[i].real();
    return out;
}

} // namespace srpband
