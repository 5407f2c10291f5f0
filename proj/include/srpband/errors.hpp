#pragma once

#include <stdexcept>
#include <string>

namespace srpband {

// Configuration / argument problems (CLI maps these to exit code 1).
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// File system and format problems (exit code 2).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numeric / domain failures (exit code 3).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegeneratePair : NumericError {
    DegeneratePair() : NumericError("microphone pair is degenerate (coincident positions)") {}
};

struct SampleRateMismatch : NumericError {
    SampleRateMismatch(double a, double b)
        : NumericError("sample rates differ: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

struct EmptyBand : NumericError {
    EmptyBand() : NumericError("no DFT bin falls inside the requested frequency band") {}
};

struct EmptyGrid : NumericError {
    EmptyGrid() : NumericError("grid contains no points") {}
};

struct PositionOutsideRoom : NumericError {
    PositionOutsideRoom() : NumericError("position lies outside the room interior") {}
};

struct AbsorptionOutOfRange : NumericError {
    AbsorptionOutOfRange(double alpha)
        : NumericError("Sabine absorption " + std::to_string(alpha) +
                       " >= 1; room too small for the requested reverberation time") {}
};

struct InsufficientDecay : NumericError {
    InsufficientDecay() : NumericError("impulse response never decays to -35 dB") {}
};

struct EmptySample : NumericError {
    EmptySample() : NumericError("statistic requested on an empty sample") {}
};

struct InvalidRho : NumericError {
    InvalidRho(double rho)
        : NumericError("far-field resolution bound requires rho > 1, got " + std::to_string(rho)) {}
};

} // namespace srpband
