#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "srpband/gcc.hpp"
#include "srpband/geometry.hpp"
#include "srpband/signal.hpp"

namespace srpband {

struct Box {
    Point3 lo;
    Point3 hi;
};

// Cell-center lattice of pitch delta_r inside an axis-aligned box. Points are
// ordered lexicographically by (z, y, x): z varies slowest, x fastest.
struct Grid {
    Box bounds;
    double delta_r = 0.0;
    std::array<std::size_t, 3> shape{0, 0, 0}; // nx, ny, nz
    std::vector<Point3> points;

    std::size_t index_of(std::size_t ix, std::size_t iy, std::size_t iz) const {
        return (iz * shape[1] + iy) * shape[0] + ix;
    }
};

Grid build_grid(const Box& bounds, double delta_r);

// SRP map plus the band bookkeeping that the sampling rule produced at each
// point: the lowest cutoff applied across pairs (Hz) and whether any pair hit
// an unsatisfiable cutoff (clamped band or empty bin range).
struct SrpMap {
    Grid grid;
    GccMode mode = GccMode::Standard;
    std::vector<double> values;
    std::vector<double> applied_f_max; // Hz, min over pairs at each point
    std::vector<char> condition_violated;
};

struct LocalizationResult {
    Point3 estimate;
    double peak_value = 0.0;
    std::size_t peak_index = 0;
};

// Evaluation of a single candidate point against all pair spectra.
struct SrpPointValue {
    double value = 0.0;
    double f_max_applied_hz = 0.0;
    bool violated = false;
};

// One PHAT spectrum per unordered microphone pair, in ArrayGeometry::pairs()
// order.
std::vector<CrossSpectrumPhat> pair_spectra(const std::vector<Signal>& mic_signals,
                                            const ArrayGeometry& array);

SrpPointValue srp_point_value(const Point3& point,
                              const std::vector<CrossSpectrumPhat>& spectra,
                              const ArrayGeometry& array, GccMode mode, const Band& band,
                              SoundSpeed c, double delta_r);

// Steered response power at one point: sum of the pair GCCs at that point's
// TDOAs, with the per-pair alias-free cutoff applied in the band-limited
// modes.
double srp_value(const Point3& point, const std::vector<CrossSpectrumPhat>& spectra,
                 const ArrayGeometry& array, GccMode mode, const Band& band, SoundSpeed c,
                 double delta_r);

// Full map over the grid. Spectra are computed once per pair and shared by
// every point. Grid points are evaluated in parallel; output is bit-identical
// for any thread count.
SrpMap compute_map(const Grid& grid, const std::vector<Signal>& mic_signals,
                   const ArrayGeometry& array, GccMode mode, const Band& band, SoundSpeed c);

// Same map from precomputed spectra (reused across modes in experiments).
SrpMap compute_map(const Grid& grid, const std::vector<CrossSpectrumPhat>& spectra,
                   const ArrayGeometry& array, GccMode mode, const Band& band, SoundSpeed c);

// Single-threaded reference implementation with identical output; kept as
// the oracle for the parallel path and for benchmarking.
SrpMap compute_map_serial(const Grid& grid, const std::vector<CrossSpectrumPhat>& spectra,
                          const ArrayGeometry& array, GccMode mode, const Band& band,
                          SoundSpeed c);

// Argmax of the map; ties go to the lowest point index.
LocalizationResult localize(const SrpMap& map);

// CSV with one row per point: x,y,z,value,f_max_applied,condition_violated.
void write_map_csv(const SrpMap& map, const std::string& path);

// Plain value matrix at one z index: shape[1] rows of shape[0] columns.
void write_slice_csv(const SrpMap& map, std::size_t z_index, const std::string& path);

} // namespace srpband
