#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "srpband/geometry.hpp"
#include "srpband/signal.hpp"

namespace srpband {

// Shoebox room with a uniform target reverberation time. rt60 = 0 selects the
// anechoic (pure delay) propagation path.
struct RoomSpec {
    std::array<double, 3> dimensions{0.0, 0.0, 0.0}; // meters
    double rt60 = 0.0;                               // seconds
    SoundSpeed c{};

    void validate() const;
    bool strictly_inside(const Point3& p) const;
    Point3 center() const {
        return {dimensions[0] / 2.0, dimensions[1] / 2.0, dimensions[2] / 2.0};
    }
};

// Sampled impulse response between one source and one microphone.
struct Rir {
    double sample_rate = 0.0; // Hz
    std::vector<double> taps;
};

// Half-width, in samples, of the Hann-windowed sinc kernel used to place
// fractional-sample impulses (both in the image method and as the free-field
// oracle resolution).
inline constexpr int kSincHalfWidth = 32;

// Delay the input by distance/c seconds with an exact DFT-domain phase shift
// (padded far enough that nothing wraps), then crop or zero-extend to
// out_len. Unit gain by default; attenuate=true scales by 1/(4*pi*distance).
Signal freefield_propagate(const Signal& src_signal, const Point3& source, const Point3& mic,
                           SoundSpeed c, std::size_t out_len, bool attenuate = false);

// Uniform wall reflection coefficient from the Sabine estimate
// alpha = 0.161 * V / (S * rt60), beta = sqrt(1 - alpha). Throws
// AbsorptionOutOfRange when the room cannot support the requested rt60.
double rt60_to_reflection(const RoomSpec& room);

// Shoebox image-method impulse response: every image source up to max_order
// reflections per axis contributes beta^(wall hits) / (4*pi*d) at the
// fractional tap d/c * fs, spread by the windowed sinc. Reflective rooms are
// finished with the standard 100 Hz companion high-pass (the image solution
// is unphysical below that, and the spurious low-frequency energy would bias
// any decay measurement). Source and mic must be strictly inside the room
// and distinct.
Rir image_method_rir(const RoomSpec& room, const Point3& source, const Point3& mic, double fs,
                     int max_order);

// Per-axis image order that covers the full rt60 decay span of the room.
int default_image_order(const RoomSpec& room);

// Microphone signals for one source event: pure delays when rt60 = 0,
// image-method RIR convolution otherwise. All outputs share one length.
std::vector<Signal> simulate_event(const RoomSpec& room, const Point3& source,
                                   const ArrayGeometry& array, const Signal& src_signal,
                                   double fs);

// Reverberation time by Schroeder backward integration: least-squares line
// through the -5..-35 dB span of the decay curve, T60 = 2 x the fitted T30.
double schroeder_rt60(const Rir& rir);

} // namespace srpband
