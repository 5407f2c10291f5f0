#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace srpband {

using cplx = std::complex<double>;

bool is_power_of_two(std::size_t n);
std::size_t next_power_of_two(std::size_t n);

// In-place radix-2 FFT; n must be a power of two. inverse=true applies the
// 1/n scale. Single-threaded and bit-deterministic for a given input.
void fft(std::vector<cplx>& data, bool inverse);

// DFT of a real signal zero-padded to n (power of two); returns the n/2+1
// non-negative frequency bins.
std::vector<cplx> rfft(const std::vector<double>& signal, std::size_t n);

// Inverse of rfft: rebuilds the Hermitian spectrum from n/2+1 bins and
// returns the length-n real signal.
std::vector<double> irfft(const std::vector<cplx>& half_spectrum, std::size_t n);

// Full linear convolution (length a+b-1) via zero-padded FFTs.
std::vector<double> fft_convolve(const std::vector<double>& a, const std::vector<double>& b);

} // namespace srpband
