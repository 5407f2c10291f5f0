#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "srpband/gcc.hpp"
#include "srpband/geometry.hpp"
#include "srpband/roomsim.hpp"
#include "srpband/signal.hpp"

namespace srpband {

// Regular tetrahedron with the given edge length and its centroid at center.
ArrayGeometry tetrahedron_array(const Point3& center, double edge);

// Centroid-to-vertex distance of that tetrahedron, edge * sqrt(3/8). Used as
// the array radius r_m when bucketing source distances.
double tetrahedron_circumradius(double edge);

// n uniform draws over the open room box, rejecting any draw that lands
// within exclusion_radius of a microphone. Deterministic per seed.
std::vector<Point3> sample_positions(const RoomSpec& room, const ArrayGeometry& array,
                                     std::size_t n, std::uint64_t seed,
                                     double exclusion_radius = 0.1);

enum class SignalKind { Noise, SpeechLike, WavDirectory };

struct SignalSource {
    SignalKind kind = SignalKind::Noise;
    std::string wav_dir; // used only by WavDirectory
};

// One full localization campaign: a room, one tetrahedral array, seeded
// random sources, and a sweep over map resolutions, reverberation times and
// GCC modes. room.rt60 is ignored; rt60_values drives the sweep.
struct ExperimentConfig {
    RoomSpec room{{8.0, 10.0, 4.0}, 0.0, SoundSpeed{}};
    double array_edge = 0.5;
    std::size_t n_sources = 100;
    std::uint64_t seed = 1;
    std::vector<double> delta_r_values{0.5};
    std::vector<GccMode> modes{GccMode::Standard, GccMode::BandLimited,
                               GccMode::BandLimitedNormalized};
    Band band = Band::from_hz(100.0, 6000.0);
    SignalSource signal_source{};
    std::vector<double> rt60_values{0.0};
    double sample_rate = 44100.0;
    double duration_s = 0.2;
    std::size_t n_perm = 10000; // permutation-test resamples

    // When non-empty, these positions are used verbatim instead of seeded
    // sampling; the list length must equal n_sources.
    std::vector<Point3> fixed_positions;

    void validate() const;
};

// One (source, resolution, reverberation, mode) localization outcome.
// Distances are measured from the array centroid; rho = true_dist / r_m.
struct TrialResult {
    std::size_t trial = 0;
    double delta_r = 0.0;
    double rt60 = 0.0;
    GccMode mode = GccMode::Standard;
    Point3 true_pos{};
    Point3 estimate{};
    double error = 0.0;
    double rho = 0.0;
    double true_dist = 0.0;
    double est_dist = 0.0;
};

struct ErrorStats {
    double mean_error = 0.0;
    double mean_deviation = 0.0;
    std::size_t n = 0;
};

// Distance-bucketed statistics for one (delta_r, rt60, mode) group, plus the
// significance of its difference from the Standard mode on the same trials.
struct StatsRow {
    double delta_r = 0.0;
    double rt60 = 0.0;
    GccMode mode = GccMode::Standard;
    int bucket = -1; // 0: rho<=5, 1: 5<rho<=10, 2: rho>10, -1: pooled
    ErrorStats stats{};
    double underestimation_rate = 0.0; // fraction with est_dist < true_dist
    double p_mean_vs_standard = 0.0;   // Wilcoxon rank-sum on errors
    double p_disp_vs_standard = 0.0;   // permutation test on mean deviations
};

const char* bucket_label(int bucket);

struct ExperimentResult {
    std::vector<Point3> mic_positions;
    double circumradius = 0.0;
    std::vector<Point3> positions;
    std::vector<TrialResult> trials;
    std::vector<StatsRow> stats;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

// trials.csv, stats.csv, scatter.csv and histogram.csv under out_dir (which
// must already exist).
void write_experiment_csvs(const ExperimentResult& result, const std::string& out_dir);

} // namespace srpband
