#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "srpband/signal.hpp"

namespace srpband {

enum class GccMode {
    Standard,             // fixed band [omega_min, omega_max]
    BandLimited,          // upper limit replaced by the alias-free cutoff
    BandLimitedNormalized // band-limited, rescaled by the bandwidth reduction
};

const char* to_string(GccMode mode);
GccMode gcc_mode_from_string(const std::string& name);

// PHAT-whitened cross-power spectrum of one microphone pair over the whole
// event. Bins cover the non-negative DFT frequencies of a single
// next-power-of-two DFT sized for linear correlation support; every retained
// bin has unit modulus, degenerate bins are zeroed.
//
// Sign convention: bins hold X_k * conj(X_l), so a pair whose second signal
// lags by D seconds carries phase +omega*D, and gcc_eval integrates against
// e^{-j omega tau}; the correlation then peaks at tau = D, the lag of l
// behind k, matching the TDOA (r_l - r_k)/c used to steer the map.
struct CrossSpectrumPhat {
    double sample_rate = 0.0;    // Hz
    double bin_spacing = 0.0;    // rad/s between adjacent bins
    std::size_t n_fft = 0;       // full DFT length (power of two)
    std::vector<std::complex<double>> bins; // n_fft/2 + 1 entries

    double nyquist_omega() const { return 3.14159265358979323846264338327950288 * sample_rate; }
};

// Whiten the cross-power spectrum of two equally sampled signals. The shorter
// signal is zero-padded; the DFT length is the next power of two at or above
// twice the longer length. Bins whose raw magnitude falls below
// 10 * epsilon_rel * max_magnitude are zeroed instead of whitened.
CrossSpectrumPhat cross_power_spectrum_phat(const Signal& s_k, const Signal& s_l,
                                            double epsilon_rel = 1e-12);

// Band-limited GCC-PHAT at an arbitrary real lag:
//   (bin_spacing / pi) * sum over bins with omega_lo <= omega <= omega_hi of
//   Re(bin * e^{-j omega tau}).
// Both interval ends are closed. Throws EmptyBand when no bin qualifies.
double gcc_eval(const CrossSpectrumPhat& spec, double omega_lo, double omega_hi, double tau);

// Eq-style normalized band-limited GCC: the band-limited value scaled by
// (omega_max - omega_min) / (omega_hat_max - omega_min).
double gcc_eval_normalized(const CrossSpectrumPhat& spec, const Band& band, double omega_hat_max,
                           double tau);

// Index range [first, last] of bins inside [omega_lo, omega_hi]; last < first
// means the interval holds no bin.
std::pair<std::size_t, std::size_t> band_bin_range(const CrossSpectrumPhat& spec, double omega_lo,
                                                   double omega_hi);

} // namespace srpband
