#pragma once

#include <cmath>
#include <vector>

#include "srpband/errors.hpp"

namespace srpband {

// Sampled real waveform.
struct Signal {
    double sample_rate = 0.0; // Hz
    std::vector<double> samples;

    void validate() const {
        if (sample_rate <= 0.0) throw ConfigError("signal sample rate must be positive");
        if (samples.empty()) throw ConfigError("signal must contain at least one sample");
        for (double s : samples)
            if (!std::isfinite(s)) throw NumericError("signal contains a non-finite sample");
    }

    double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
};

// Angular frequency interval [omega_min, omega_max], rad/s.
struct Band {
    double omega_min = 0.0;
    double omega_max = 0.0;

    static Band from_hz(double f_min, double f_max) {
        Band b{6.283185307179586476925286766559 * f_min, 6.283185307179586476925286766559 * f_max};
        b.validate();
        return b;
    }

    void validate() const {
        if (!(omega_min >= 0.0) || !(omega_min < omega_max))
            throw ConfigError("band requires 0 <= omega_min < omega_max");
    }

    double f_min_hz() const { return omega_min / 6.283185307179586476925286766559; }
    double f_max_hz() const { return omega_max / 6.283185307179586476925286766559; }
};

} // namespace srpband
