#include "srpband/experiment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <filesystem>
#include <limits>
#include <map>
#include <tuple>

#include "srpband/csv.hpp"
#include "srpband/errors.hpp"
#include "srpband/rng.hpp"
#include "srpband/srp.hpp"
#include "srpband/stats.hpp"
#include "srpband/synth.hpp"
#include "srpband/wav.hpp"

namespace srpband {

namespace {

std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t index) {
    return substream(seed, index).next_u64();
}

// Stream indices: 0 reserved for source positions, 1..n for per-trial
// signals, high offsets for the per-group permutation tests.
constexpr std::uint64_t kPermStreamBase = 0x5EED0000ULL;

std::vector<std::string> list_wavs(const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<std::string> files;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        if (!entry.is_regular_file()) continue;
        const std::string ext = entry.path().extension().string();
        if (ext == ".wav" || ext == ".WAV") files.push_back(entry.path().string());
    }
    if (ec) throw IoError("cannot list WAV directory: " + dir);
    if (files.empty()) throw IoError("no .wav files in directory: " + dir);
    std::sort(files.begin(), files.end());
    return files;
}

Signal trial_signal(const ExperimentConfig& config, std::size_t trial,
                    const std::vector<std::string>& wav_files) {
    const std::uint64_t seed = derived_seed(config.seed, 1 + trial);
    switch (config.signal_source.kind) {
    case SignalKind::Noise:
        return band_limited_noise(config.sample_rate, config.duration_s, config.band, seed);
    case SignalKind::SpeechLike:
        return speech_like_noise(config.sample_rate, config.duration_s, config.band, seed);
    case SignalKind::WavDirectory: {
        Signal sig = read_wav(wav_files[trial % wav_files.size()]);
        if (sig.sample_rate != config.sample_rate)
            throw SampleRateMismatch(sig.sample_rate, config.sample_rate);
        const auto want =
            static_cast<std::size_t>(std::llround(config.duration_s * config.sample_rate));
        if (want > 0 && sig.samples.size() > want) sig.samples.resize(want);
        return sig;
    }
    }
    throw ConfigError("unknown signal source");
}

} // namespace

ArrayGeometry tetrahedron_array(const Point3& center, double edge) {
    if (!(edge > 0.0)) throw ConfigError("tetrahedron edge must be positive");
    // Alternate corners of a cube: pairwise distances are all equal and the
    // centroid is the cube center.
    const double s = edge / (2.0 * std::sqrt(2.0));
    const Point3 v[4] = {{s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
    std::vector<Point3> mics;
    mics.reserve(4);
    for (const Point3& p : v) mics.push_back(center + p);
    return ArrayGeometry(std::move(mics));
}

double tetrahedron_circumradius(double edge) { return edge * std::sqrt(3.0 / 8.0); }

std::vector<Point3> sample_positions(const RoomSpec& room, const ArrayGeometry& array,
                                     std::size_t n, std::uint64_t seed,
                                     double exclusion_radius) {
    room.validate();
    if (n == 0) throw ConfigError("need at least one source position");

    Rng rng(derived_seed(seed, 0));
    std::vector<Point3> out;
    out.reserve(n);
    while (out.size() < n) {
        const Point3 p{rng.uniform(0.0, room.dimensions[0]),
                       rng.uniform(0.0, room.dimensions[1]),
                       rng.uniform(0.0, room.dimensions[2])};
        if (!room.strictly_inside(p)) continue; // boundary draws (measure zero)
        bool near_mic = false;
        for (const Point3& mic : array.mics())
            near_mic = near_mic || distance(p, mic) < exclusion_radius;
        if (!near_mic) out.push_back(p);
    }
    return out;
}

void ExperimentConfig::validate() const {
    room.validate();
    band.validate();
    if (!(array_edge > 0.0)) throw ConfigError("array edge must be positive");
    if (n_sources == 0) throw ConfigError("n_sources must be at least 1");
    if (delta_r_values.empty()) throw ConfigError("need at least one delta_r value");
    for (double d : delta_r_values)
        if (!(d > 0.0)) throw ConfigError("delta_r values must be positive");
    if (modes.empty()) throw ConfigError("need at least one GCC mode");
    if (rt60_values.empty()) throw ConfigError("need at least one rt60 value");
    for (double t : rt60_values)
        if (t < 0.0) throw ConfigError("rt60 values must be non-negative");
    if (!(sample_rate > 0.0)) throw ConfigError("sample rate must be positive");
    if (!(duration_s > 0.0)) throw ConfigError("duration must be positive");
    if (n_perm < 1000) throw ConfigError("permutation test needs at least 1000 resamples");
    if (signal_source.kind == SignalKind::WavDirectory && signal_source.wav_dir.empty())
        throw ConfigError("WAV signal source needs a directory");
    if (!fixed_positions.empty()) {
        if (fixed_positions.size() != n_sources)
            throw ConfigError("fixed position count must equal n_sources");
        for (const Point3& p : fixed_positions)
            if (!room.strictly_inside(p)) throw PositionOutsideRoom();
    }
}

const char* bucket_label(int bucket) {
    switch (bucket) {
    case 0: return "rho<=5";
    case 1: return "5<rho<=10";
    case 2: return "rho>10";
    default: return "all";
    }
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();

    const ArrayGeometry array = tetrahedron_array(config.room.center(), config.array_edge);
    const double r_m = tetrahedron_circumradius(config.array_edge);
    const Point3 array_center = array.centroid();

    ExperimentResult result;
    result.mic_positions = array.mics();
    result.circumradius = r_m;
    result.positions = config.fixed_positions.empty()
                           ? sample_positions(config.room, array, config.n_sources, config.seed)
                           : config.fixed_positions;

    std::vector<Grid> grids;
    grids.reserve(config.delta_r_values.size());
    for (double dr : config.delta_r_values)
        grids.push_back(build_grid(
            Box{{0.0, 0.0, 0.0},
                {config.room.dimensions[0], config.room.dimensions[1], config.room.dimensions[2]}},
            dr));

    std::vector<std::string> wav_files;
    if (config.signal_source.kind == SignalKind::WavDirectory)
        wav_files = list_wavs(config.signal_source.wav_dir);

    const std::size_t n_rt = config.rt60_values.size();
    const std::size_t n_dr = config.delta_r_values.size();
    const std::size_t n_modes = config.modes.size();
    result.trials.resize(n_rt * config.n_sources * n_dr * n_modes);

    // One task per (rt60, source): simulate once, reuse the pair spectra for
    // every resolution and mode. Tasks write disjoint slots, so the result is
    // identical for any thread count.
    const auto n_tasks = static_cast<long long>(n_rt * config.n_sources);
    std::exception_ptr first_error = nullptr;
#pragma omp parallel for schedule(dynamic)
    for (long long task = 0; task < n_tasks; ++task) {
        try {
            const std::size_t i_rt = static_cast<std::size_t>(task) / config.n_sources;
            const std::size_t trial = static_cast<std::size_t>(task) % config.n_sources;

            RoomSpec room = config.room;
            room.rt60 = config.rt60_values[i_rt];

            const Point3 true_pos = result.positions[trial];
            const Signal src = trial_signal(config, trial, wav_files);
            const std::vector<Signal> mic_sigs =
                simulate_event(room, true_pos, array, src, config.sample_rate);
            const std::vector<CrossSpectrumPhat> spectra = pair_spectra(mic_sigs, array);

            const double true_dist = distance(true_pos, array_center);
            for (std::size_t i_dr = 0; i_dr < n_dr; ++i_dr) {
                for (std::size_t i_mode = 0; i_mode < n_modes; ++i_mode) {
                    const SrpMap map = compute_map(grids[i_dr], spectra, array,
                                                   config.modes[i_mode], config.band, room.c);
                    const LocalizationResult loc = localize(map);

                    TrialResult& row =
                        result.trials[((i_rt * config.n_sources + trial) * n_dr + i_dr) * n_modes +
                                      i_mode];
                    row.trial = trial;
                    row.delta_r = config.delta_r_values[i_dr];
                    row.rt60 = room.rt60;
                    row.mode = config.modes[i_mode];
                    row.true_pos = true_pos;
                    row.estimate = loc.estimate;
                    row.error = distance(loc.estimate, true_pos);
                    row.true_dist = true_dist;
                    row.est_dist = distance(loc.estimate, array_center);
                    row.rho = true_dist / r_m;
                }
            }
        } catch (...) {
#pragma omp critical
            if (!first_error) first_error = std::current_exception();
        }
    }
    if (first_error) std::rethrow_exception(first_error);

    // Group errors by (delta_r, rt60, mode, bucket); bucket -1 pools all
    // distances. Bucket membership depends only on the true position, so the
    // same trials appear in each mode's group.
    const auto standard_it =
        std::find(config.modes.begin(), config.modes.end(), GccMode::Standard);
    const std::size_t i_standard =
        static_cast<std::size_t>(standard_it - config.modes.begin()); // == n_modes if absent

    std::uint64_t group_ordinal = 0;
    for (std::size_t i_dr = 0; i_dr < n_dr; ++i_dr) {
        for (std::size_t i_rt = 0; i_rt < n_rt; ++i_rt) {
            // errors[mode][bucket+1]
            std::vector<std::array<std::vector<double>, 4>> errors(n_modes);
            std::vector<std::array<std::size_t, 4>> under(n_modes, {0, 0, 0, 0});
            for (std::size_t trial = 0; trial < config.n_sources; ++trial) {
                for (std::size_t i_mode = 0; i_mode < n_modes; ++i_mode) {
                    const TrialResult& row =
                        result.trials[((i_rt * config.n_sources + trial) * n_dr + i_dr) * n_modes +
                                      i_mode];
                    const int b = rho_bucket(row.rho);
                    const bool underestimated = row.est_dist < row.true_dist;
                    for (int slot : {b + 1, 0}) {
                        errors[i_mode][static_cast<std::size_t>(slot)].push_back(row.error);
                        if (underestimated) ++under[i_mode][static_cast<std::size_t>(slot)];
                    }
                }
            }

            for (std::size_t i_mode = 0; i_mode < n_modes; ++i_mode) {
                for (int slot = 0; slot < 4; ++slot) {
                    const auto& errs = errors[i_mode][static_cast<std::size_t>(slot)];
                    const std::uint64_t perm_seed =
                        derived_seed(config.seed, kPermStreamBase + group_ordinal++);
                    if (errs.empty()) continue;

                    StatsRow srow;
                    srow.delta_r = config.delta_r_values[i_dr];
                    srow.rt60 = config.rt60_values[i_rt];
                    srow.mode = config.modes[i_mode];
                    srow.bucket = slot - 1;
                    srow.stats = {mean_error(errs), mean_deviation(errs), errs.size()};
                    srow.underestimation_rate =
                        static_cast<double>(under[i_mode][static_cast<std::size_t>(slot)]) /
                        static_cast<double>(errs.size());

                    const double nan = std::numeric_limits<double>::quiet_NaN();
                    if (i_standard == n_modes) {
                        srow.p_mean_vs_standard = nan;
                        srow.p_disp_vs_standard = nan;
                    } else if (i_mode == i_standard) {
                        srow.p_mean_vs_standard = 1.0;
                        srow.p_disp_vs_standard = 1.0;
                    } else {
                        const auto& ref = errors[i_standard][static_cast<std::size_t>(slot)];
                        srow.p_mean_vs_standard = wilcoxon_rank_sum(errs, ref);
                        srow.p_disp_vs_standard =
                            permutation_deviance_test(errs, ref, config.n_perm, perm_seed);
                    }
                    result.stats.push_back(srow);
                }
            }
        }
    }
    return result;
}

void write_experiment_csvs(const ExperimentResult& result, const std::string& out_dir) {
    {
        std::ofstream out = open_output(out_dir + "/trials.csv");
        out << "trial,delta_r,rt60,mode,true_x,true_y,true_z,est_x,est_y,est_z,error,rho,"
               "true_dist,est_dist\n";
        for (const TrialResult& t : result.trials)
            out << t.trial << ',' << csv_num(t.delta_r) << ',' << csv_num(t.rt60) << ','
                << to_string(t.mode) << ',' << csv_num(t.true_pos.x) << ',' << csv_num(t.true_pos.y)
                << ',' << csv_num(t.true_pos.z) << ',' << csv_num(t.estimate.x) << ','
                << csv_num(t.estimate.y) << ',' << csv_num(t.estimate.z) << ','
                << csv_num(t.error) << ',' << csv_num(t.rho) << ',' << csv_num(t.true_dist) << ','
                << csv_num(t.est_dist) << '\n';
        if (!out) throw IoError("failed writing trials.csv");
    }
    {
        std::ofstream out = open_output(out_dir + "/stats.csv");
        out << "delta_r,rt60,mode,bucket,n,mean_error,mean_deviation,underestimation_rate,"
               "p_mean_vs_standard,p_disp_vs_standard\n";
        for (const StatsRow& s : result.stats)
            out << csv_num(s.delta_r) << ',' << csv_num(s.rt60) << ',' << to_string(s.mode) << ','
                << bucket_label(s.bucket) << ',' << s.stats.n << ',' << csv_num(s.stats.mean_error)
                << ',' << csv_num(s.stats.mean_deviation) << ','
                << csv_num(s.underestimation_rate) << ',' << csv_num(s.p_mean_vs_standard) << ','
                << csv_num(s.p_disp_vs_standard) << '\n';
        if (!out) throw IoError("failed writing stats.csv");
    }
    {
        std::ofstream out = open_output(out_dir + "/scatter.csv");
        out << "delta_r,rt60,mode,true_dist,est_dist\n";
        for (const TrialResult& t : result.trials)
            out << csv_num(t.delta_r) << ',' << csv_num(t.rt60) << ',' << to_string(t.mode) << ','
                << csv_num(t.true_dist) << ',' << csv_num(t.est_dist) << '\n';
        if (!out) throw IoError("failed writing scatter.csv");
    }
    {
        // Error histogram per (delta_r, rt60, mode), 0.5 m bins.
        constexpr double kBinWidth = 0.5;
        std::map<std::tuple<double, double, int>, std::vector<std::size_t>> hist;
        for (const TrialResult& t : result.trials) {
            auto& bins = hist[{t.delta_r, t.rt60, static_cast<int>(t.mode)}];
            const auto bin = static_cast<std::size_t>(t.error / kBinWidth);
            if (bins.size() <= bin) bins.resize(bin + 1, 0);
            ++bins[bin];
        }
        std::ofstream out = open_output(out_dir + "/histogram.csv");
        out << "delta_r,rt60,mode,bin_lo,bin_hi,count,probability\n";
        for (const auto& [key, bins] : hist) {
            std::size_t total = 0;
            for (std::size_t c : bins) total += c;
            for (std::size_t b = 0; b < bins.size(); ++b)
                out << csv_num(std::get<0>(key)) << ',' << csv_num(std::get<1>(key)) << ','
                    << to_string(static_cast<GccMode>(std::get<2>(key))) << ','
                    << csv_num(static_cast<double>(b) * kBinWidth) << ','
                    << csv_num(static_cast<double>(b + 1) * kBinWidth) << ',' << bins[b] << ','
                    << csv_num(static_cast<double>(bins[b]) / static_cast<double>(total)) << '\n';
        }
        if (!out) throw IoError("failed writing histogram.csv");
    }
}

} // namespace srpband
