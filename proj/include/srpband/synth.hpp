#pragma once

#include <cstdint>

#include "srpband/signal.hpp"

namespace srpband {

// Band-limited white noise: flat magnitude, independent uniform phase per DFT
// bin inside the band, zero outside, unit RMS. Deterministic per seed.
Signal band_limited_noise(double sample_rate, double duration_s, const Band& band,
                          std::uint64_t seed);

// Speech-shaped noise inside the band: 1/sqrt(f) spectral tilt with four
// formant-like resonant bumps, random phase, unit RMS. Deterministic per
// seed.
Signal speech_like_noise(double sample_rate, double duration_s, const Band& band,
                         std::uint64_t seed);

} // namespace srpband
