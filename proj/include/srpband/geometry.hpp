#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace srpband {

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Point3 operator+(const Point3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Point3 operator-(const Point3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Point3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Point3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

inline double distance(const Point3& a, const Point3& b) { return (a - b).norm(); }

struct SoundSpeed {
    double c = 343.0; // m/s
};

// Validated microphone set: at least two, pairwise separated by > 1e-6 m.
class ArrayGeometry {
public:
    explicit ArrayGeometry(std::vector<Point3> mics);

    const std::vector<Point3>& mics() const { return mics_; }
    std::size_t size() const { return mics_.size(); }
    const Point3& operator[](std::size_t i) const { return mics_[i]; }

    // Unordered pairs (k, l) with k < l, in fixed lexicographic order.
    std::vector<std::pair<std::size_t, std::size_t>> pairs() const;

    Point3 centroid() const;

private:
    std::vector<Point3> mics_;
};

// Geometry of one (pair, evaluation point) configuration relative to the pair
// midpoint: distance r, half inter-microphone distance r_m, and the cosine of
// the angle between the point direction and the pair axis.
struct PairFrame {
    double r = 0.0;       // meters, >= 0
    double r_m = 0.0;     // meters, > 0
    double cos_phi = 0.0; // clamped to [-1, 1]
};

// Result of the alias-free bandwidth rule. `violated` marks points where the
// rule demanded a cutoff below the band floor and the value was clamped up to
// omega_min + one DFT bin (the condition cannot be met on this grid).
struct AliasFreeBand {
    double omega_hat_max = 0.0; // rad/s
    bool violated = false;
};

struct Band; // defined in signal.hpp

// ||point - mic|| / c. Zero distance is valid and yields 0.
double propagation_delay(const Point3& point, const Point3& mic, SoundSpeed c);

// (||point - mic_l|| - ||point - mic_k||) / c. Throws DegeneratePair when the
// microphones coincide.
double tdoa(const Point3& mic_k, const Point3& mic_l, const Point3& point, SoundSpeed c);

// Midpoint frame for the pair: r, r_m and cos_phi measured toward mic_k.
// cos_phi is 0 by convention when the point sits on the midpoint itself.
PairFrame pair_frame(const Point3& mic_k, const Point3& mic_l, const Point3& point);

// Closed-form Euclidean norm of the TDOA gradient,
//   (1/c) * sqrt(2 - 2 (rho^2 - 1) / sqrt((rho^2 + 1)^2 - 4 rho^2 cos^2 phi)),
// rho = r / r_m, evaluated through the law-of-cosines product form for
// numerical stability. Always in [0, 2/c]; returns exactly 2/c inside a
// 1e-9 m guard ball around either microphone where the formula is singular.
double tdoa_gradient_norm(const PairFrame& frame, SoundSpeed c);

// Upper bound on the lag step seen when moving delta_r through the map:
// grad_norm * delta_r. Requires delta_r > 0.
double sampling_interval_bound(double grad_norm, double delta_r);

// Highest angular frequency that keeps GCC sampling alias-free at this grid
// step: min(band.omega_max, pi / (grad_norm * delta_r)), floored at
// band.omega_min + bin_spacing (flagged) when the rule is unsatisfiable.
AliasFreeBand max_alias_free_frequency(double grad_norm, double delta_r, const Band& band,
                                       double bin_spacing);

struct Distributed {};             // source expected among the microphones (r <~ r_m)
struct FarField { double min_rho; }; // source known to satisfy r/r_m >= min_rho > 1

// Strict upper bound on the grid pitch that keeps the map alias-free for a
// band ending at omega_max. Callers must stay strictly below the returned
// value.
double required_resolution(Distributed scenario, double omega_max, SoundSpeed c);
double required_resolution(FarField scenario, double omega_max, SoundSpeed c);

} // namespace srpband
