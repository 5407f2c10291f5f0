#include "srpband/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "srpband/errors.hpp"
#include "srpband/signal.hpp"

namespace srpband {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kMicGuardRadius = 1e-9; // singularity guard around each microphone
} // namespace

ArrayGeometry::ArrayGeometry(std::vector<Point3> mics) : mics_(std::move(mics)) {
    if (mics_.size() < 2) throw ConfigError("array needs at least two microphones");
    for (const auto& m : mics_) {
        if (!std::isfinite(m.x) || !std::isfinite(m.y) || !std::isfinite(m.z))
            throw ConfigError("microphone coordinates must be finite");
    }
    for (std::size_t i = 0; i < mics_.size(); ++i)
        for (std::size_t j = i + 1; j < mics_.size(); ++j)
            if (distance(mics_[i], mics_[j]) <= 1e-6)
                throw ConfigError("microphones must be pairwise separated by more than 1e-6 m");
}

std::vector<std::pair<std::size_t, std::size_t>> ArrayGeometry::pairs() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    out.reserve(mics_.size() * (mics_.size() - 1) / 2);
    for (std::size_t k = 0; k < mics_.size(); ++k)
        for (std::size_t l = k + 1; l < mics_.size(); ++l) out.emplace_back(k, l);
    return out;
}

Point3 ArrayGeometry::centroid() const {
    Point3 c{};
    for (const auto& m : mics_) c = c + m;
    return c * (1.0 / static_cast<double>(mics_.size()));
}

double propagation_delay(const Point3& point, const Point3& mic, SoundSpeed c) {
    return distance(point, mic) / c.c;
}

double tdoa(const Point3& mic_k, const Point3& mic_l, const Point3& point, SoundSpeed c) {
    if (distance(mic_k, mic_l) < 1e-12) throw DegeneratePair();
    return (distance(point, mic_l) - distance(point, mic_k)) / c.c;
}

PairFrame pair_frame(const Point3& mic_k, const Point3& mic_l, const Point3& point) {
    const double mic_dist = distance(mic_k, mic_l);
    if (mic_dist < 1e-12) throw DegeneratePair();
    const Point3 mid = (mic_k + mic_l) * 0.5;
    const Point3 to_point = point - mid;
    const Point3 axis = mic_k - mid;

    PairFrame f;
    f.r = to_point.norm();
    f.r_m = mic_dist * 0.5;
    if (f.r == 0.0) {
        f.cos_phi = 0.0; // angle undefined at the midpoint; gradient is rho-independent there
    } else {
        f.cos_phi = std::clamp(to_point.dot(axis) / (f.r * f.r_m), -1.0, 1.0);
    }
    return f;
}

double tdoa_gradient_norm(const PairFrame& frame, SoundSpeed c) {
    // Distances to the two microphones via the law of cosines. Their product
    // equals r_m^2 * sqrt((rho^2+1)^2 - 4 rho^2 cos^2 phi), so the closed form
    // below matches the polar expression of the gradient while dodging its
    // catastrophic cancellation near the array axis.
    const double r = frame.r;
    const double rm = frame.r_m;
    const double cp = std::clamp(frame.cos_phi, -1.0, 1.0);
    const double d_k = std::sqrt(std::max(0.0, r * r + rm * rm - 2.0 * r * rm * cp));
    const double d_l = std::sqrt(std::max(0.0, r * r + rm * rm + 2.0 * r * rm * cp));

    if (std::min(d_k, d_l) <= kMicGuardRadius) return 2.0 / c.c; // supremum at the singularity

    const double ratio = std::clamp((r * r - rm * rm) / (d_k * d_l), -1.0, 1.0);
    return std::sqrt(2.0 - 2.0 * ratio) / c.c;
}

double sampling_interval_bound(double grad_norm, double delta_r) {
    if (delta_r <= 0.0) throw ConfigError("sampling_interval_bound: delta_r must be positive");
    if (grad_norm < 0.0) throw ConfigError("sampling_interval_bound: gradient norm must be >= 0");
    return grad_norm * delta_r;
}

AliasFreeBand max_alias_free_frequency(double grad_norm, double delta_r, const Band& band,
                                       double bin_spacing) {
    if (delta_r <= 0.0) throw ConfigError("max_alias_free_frequency: delta_r must be positive");
    AliasFreeBand out;
    if (grad_norm <= 0.0) {
        out.omega_hat_max = band.omega_max;
        return out;
    }
    const double rule = kPi / (grad_norm * delta_r);
    if (rule >= band.omega_max) {
        out.omega_hat_max = band.omega_max;
    } else if (rule < band.omega_min) {
        // Unsatisfiable on this grid; keep one usable bin and flag the point.
        out.omega_hat_max = band.omega_min + bin_spacing;
        out.violated = true;
    } else {
        out.omega_hat_max = rule;
    }
    return out;
}

double required_resolution(Distributed, double omega_max, SoundSpeed c) {
    if (omega_max <= 0.0) throw ConfigError("required_resolution: omega_max must be positive");
    return c.c * kPi / (2.0 * omega_max);
}

double required_resolution(FarField scenario, double omega_max, SoundSpeed c) {
    if (omega_max <= 0.0) throw ConfigError("required_resolution: omega_max must be positive");
    if (scenario.min_rho <= 1.0) throw InvalidRho(scenario.min_rho);
    const double rho2 = scenario.min_rho * scenario.min_rho;
    const double gradient_factor = std::sqrt(1.0 - (rho2 - 1.0) / (rho2 + 1.0));
    return c.c * kPi / (std::sqrt(2.0) * omega_max) / gradient_factor;
}

} // namespace srpband
