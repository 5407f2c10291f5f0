// Command-line front end: config-driven experiments plus one-shot utilities
// for impulse responses, cross-correlations and SRP maps. Exit codes: 0 ok,
// 1 configuration, 2 file I/O, 3 numeric.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "json.hpp"

#include "srpband/csv.hpp"
#include "srpband/errors.hpp"
#include "srpband/experiment.hpp"
#include "srpband/gcc.hpp"
#include "srpband/roomsim.hpp"
#include "srpband/srp.hpp"
#include "srpband/synth.hpp"
#include "srpband/wav.hpp"

namespace {

using nlohmann::json;
using namespace srpband;

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("invalid JSON in " + path + ": " + e.what());
    }
    return j;
}

// Configs are validated strictly: a key the schema does not know is an error,
// not a silent no-op.
void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& context) {
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const char* a : allowed) known = known || key == a;
        if (!known) throw ConfigError("unknown key \"" + key + "\" in " + context);
    }
}

double get_number(const json& j, const char* key, const std::string& context) {
    if (!j.contains(key) || !j[key].is_number())
        throw ConfigError(context + " needs numeric \"" + std::string(key) + "\"");
    return j[key].get<double>();
}

double get_number_or(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw ConfigError(std::string("\"") + key + "\" must be numeric");
    return j[key].get<double>();
}

Point3 get_point(const json& j, const char* key, const std::string& context) {
    if (!j.contains(key) || !j[key].is_array() || j[key].size() != 3)
        throw ConfigError(context + " needs \"" + std::string(key) + "\" as [x, y, z]");
    const json& a = j[key];
    for (const auto& v : a)
        if (!v.is_number()) throw ConfigError(context + ": coordinates must be numeric");
    return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

std::vector<double> get_number_list(const json& j, const char* key, const std::string& context) {
    if (!j.contains(key)) throw ConfigError(context + " needs \"" + std::string(key) + "\"");
    std::vector<double> out;
    if (j[key].is_number()) {
        out.push_back(j[key].get<double>());
        return out;
    }
    if (!j[key].is_array() || j[key].empty())
        throw ConfigError(context + ": \"" + std::string(key) + "\" must be a non-empty array");
    for (const auto& v : j[key]) {
        if (!v.is_number()) throw ConfigError(context + ": \"" + key + "\" entries must be numeric");
        out.push_back(v.get<double>());
    }
    return out;
}

RoomSpec parse_room(const json& j, bool rt60_here) {
    if (!j.is_object()) throw ConfigError("\"room\" must be an object");
    reject_unknown_keys(j, {"dimensions", "rt60", "c"}, "room");
    RoomSpec room;
    if (!j.contains("dimensions") || !j["dimensions"].is_array() || j["dimensions"].size() != 3)
        throw ConfigError("room needs \"dimensions\" as [Lx, Ly, Lz]");
    for (int i = 0; i < 3; ++i) {
        if (!j["dimensions"][i].is_number())
            throw ConfigError("room dimensions must be numeric");
        room.dimensions[static_cast<std::size_t>(i)] = j["dimensions"][i].get<double>();
    }
    room.rt60 = rt60_here ? get_number_or(j, "rt60", 0.0) : 0.0;
    if (!rt60_here && j.contains("rt60"))
        throw ConfigError("room rt60 is driven by the \"rt60\" list in this config");
    room.c.c = get_number_or(j, "c", 343.0);
    room.validate();
    return room;
}

Band parse_band(const json& j) {
    if (!j.is_object()) throw ConfigError("\"band\" must be an object");
    reject_unknown_keys(j, {"f_min", "f_max"}, "band");
    return Band::from_hz(get_number(j, "f_min", "band"), get_number(j, "f_max", "band"));
}

std::vector<GccMode> parse_modes(const json& j, const std::string& context) {
    if (!j.contains("modes")) throw ConfigError(context + " needs \"modes\"");
    std::vector<GccMode> modes;
    if (j["modes"].is_string()) {
        modes.push_back(gcc_mode_from_string(j["modes"].get<std::string>()));
        return modes;
    }
    if (!j["modes"].is_array() || j["modes"].empty())
        throw ConfigError(context + ": \"modes\" must be a non-empty array");
    for (const auto& m : j["modes"]) {
        if (!m.is_string()) throw ConfigError(context + ": mode names must be strings");
        modes.push_back(gcc_mode_from_string(m.get<std::string>()));
    }
    return modes;
}

void apply_threads(int threads) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

int cmd_rir(const std::string& config_path, const std::string& out_dir) {
    const json j = load_json(config_path);
    reject_unknown_keys(j, {"room", "source", "mic", "sample_rate", "max_order"}, "rir config");
    if (!j.contains("room")) throw ConfigError("rir config needs \"room\"");
    const RoomSpec room = parse_room(j["room"], true);
    const Point3 source = get_point(j, "source", "rir config");
    const Point3 mic = get_point(j, "mic", "rir config");
    const double fs = get_number(j, "sample_rate", "rir config");
    const int max_order = static_cast<int>(get_number_or(j, "max_order", -1.0));

    const int order = max_order >= 0 ? max_order : default_image_order(room);
    const Rir rir = image_method_rir(room, source, mic, fs, order);

    Signal sig;
    sig.sample_rate = fs;
    sig.samples = rir.taps;
    write_wav_float32(out_dir + "/rir.wav", sig);
    {
        std::ofstream csv = open_output(out_dir + "/rir.csv");
        csv << "sample,tap\n";
        for (std::size_t i = 0; i < rir.taps.size(); ++i)
            csv << i << ',' << csv_num(rir.taps[i]) << '\n';
        if (!csv) throw IoError("failed writing rir.csv");
    }

    std::printf("taps=%zu image_order=%d\n", rir.taps.size(), order);
    if (room.rt60 > 0.0)
        std::printf("schroeder_t60=%.6g target=%.6g\n", schroeder_rt60(rir), room.rt60);
    else
        std::printf("schroeder_t60=n/a (anechoic)\n");
    return 0;
}

int cmd_gcc(const std::string& wav_k_path, const std::string& wav_l_path,
            const std::string& out_dir, double f_min, double f_max, const std::string& mode_name,
            double f_hat_max, double tau_max) {
    const Signal sig_k = read_wav(wav_k_path);
    const Signal sig_l = read_wav(wav_l_path);
    const Band band = Band::from_hz(f_min, f_max);
    const GccMode mode = gcc_mode_from_string(mode_name);
    if (!(tau_max > 0.0)) throw ConfigError("--tau-max must be positive");

    const CrossSpectrumPhat spec = cross_power_spectrum_phat(sig_k, sig_l);
    const double omega_hat =
        f_hat_max > 0.0 ? 6.283185307179586 * f_hat_max : band.omega_max;

    // Lag scan at ten steps per sample period.
    const double dt = 1.0 / (10.0 * spec.sample_rate);
    const auto half_steps = static_cast<long>(std::ceil(tau_max / dt));

    std::ofstream csv = open_output(out_dir + "/gcc.csv");
    csv << "tau,value\n";
    double best_tau = 0.0, best_val = -1e300;
    for (long i = -half_steps; i <= half_steps; ++i) {
        const double tau = static_cast<double>(i) * dt;
        double value = 0.0;
        switch (mode) {
        case GccMode::Standard:
            value = gcc_eval(spec, band.omega_min, band.omega_max, tau);
            break;
        case GccMode::BandLimited:
            value = gcc_eval(spec, band.omega_min, omega_hat, tau);
            break;
        case GccMode::BandLimitedNormalized:
            value = gcc_eval_normalized(spec, band, omega_hat, tau);
            break;
        }
        csv << csv_num(tau) << ',' << csv_num(value) << '\n';
        if (value > best_val) {
            best_val = value;
            best_tau = tau;
        }
    }
    if (!csv) throw IoError("failed writing gcc.csv");
    std::printf("peak_tau=%.9g peak_value=%.9g\n", best_tau, best_val);
    return 0;
}

int cmd_map(const std::string& config_path, const std::string& out_dir) {
    const json j = load_json(config_path);
    reject_unknown_keys(
        j, {"room", "array", "source", "band", "delta_r", "modes", "sample_rate", "slice_z"},
        "map config");
    if (!j.contains("room")) throw ConfigError("map config needs \"room\"");
    const RoomSpec room = parse_room(j["room"], true);
    const double fs = get_number(j, "sample_rate", "map config");
    const Band band = j.contains("band") ? parse_band(j["band"]) : Band::from_hz(100.0, 6000.0);
    const double delta_r = get_number(j, "delta_r", "map config");
    const std::vector<GccMode> modes = parse_modes(j, "map config");

    if (!j.contains("array") || !j["array"].is_object())
        throw ConfigError("map config needs \"array\"");
    const json& ja = j["array"];
    reject_unknown_keys(ja, {"type", "edge", "center", "positions"}, "array");
    std::vector<Point3> mics;
    const std::string type = ja.contains("type") ? ja["type"].get<std::string>() : "tetrahedron";
    if (type == "tetrahedron") {
        const double edge = get_number(ja, "edge", "array");
        const Point3 center =
            ja.contains("center") ? get_point(ja, "center", "array") : room.center();
        mics = tetrahedron_array(center, edge).mics();
    } else if (type == "mics") {
        if (!ja.contains("positions") || !ja["positions"].is_array())
            throw ConfigError("array of type \"mics\" needs \"positions\"");
        for (const auto& p : ja["positions"]) {
            if (!p.is_array() || p.size() != 3)
                throw ConfigError("each mic position must be [x, y, z]");
            mics.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
        }
    } else {
        throw ConfigError("array type must be \"tetrahedron\" or \"mics\"");
    }
    const ArrayGeometry array(mics);

    if (!j.contains("source") || !j["source"].is_object())
        throw ConfigError("map config needs \"source\"");
    const json& js = j["source"];
    reject_unknown_keys(js, {"position", "signal", "seed", "duration_s"}, "source");
    const Point3 src_pos = get_point(js, "position", "source");
    const std::string signal_kind =
        js.contains("signal") ? js["signal"].get<std::string>() : "noise";
    const auto seed = static_cast<std::uint64_t>(get_number_or(js, "seed", 1.0));
    const double duration = get_number_or(js, "duration_s", 0.2);

    Signal src;
    if (signal_kind == "noise")
        src = band_limited_noise(fs, duration, band, seed);
    else if (signal_kind == "speech")
        src = speech_like_noise(fs, duration, band, seed);
    else
        throw ConfigError("source signal must be \"noise\" or \"speech\"");

    const std::vector<Signal> mic_sigs = simulate_event(room, src_pos, array, src, fs);
    const Grid grid = build_grid(
        Box{{0.0, 0.0, 0.0}, {room.dimensions[0], room.dimensions[1], room.dimensions[2]}},
        delta_r);
    const std::vector<CrossSpectrumPhat> spectra = pair_spectra(mic_sigs, array);

    for (GccMode mode : modes) {
        const SrpMap map = compute_map(grid, spectra, array, mode, band, room.c);
        const LocalizationResult loc = localize(map);
        const std::string name = to_string(mode);
        write_map_csv(map, out_dir + "/map_" + name + ".csv");
        if (j.contains("slice_z")) {
            const double z = get_number(j, "slice_z", "map config");
            // Nearest grid plane to the requested height.
            std::size_t iz = 0;
            double best = 1e300;
            for (std::size_t k = 0; k < grid.shape[2]; ++k) {
                const double zk = grid.points[grid.index_of(0, 0, k)].z;
                if (std::abs(zk - z) < best) {
                    best = std::abs(zk - z);
                    iz = k;
                }
            }
            write_slice_csv(map, iz, out_dir + "/slice_" + name + ".csv");
        }
        std::printf("mode=%s estimate=%.6g,%.6g,%.6g peak=%.9g index=%zu\n", name.c_str(),
                    loc.estimate.x, loc.estimate.y, loc.estimate.z, loc.peak_value,
                    loc.peak_index);
    }
    return 0;
}

int cmd_experiment(const std::string& config_path, const std::string& out_dir) {
    const json j = load_json(config_path);
    reject_unknown_keys(j,
                        {"room", "array_edge", "n_sources", "seed", "delta_r", "modes", "band",
                         "signal", "rt60", "sample_rate", "duration_s", "n_perm", "positions"},
                        "experiment config");
    ExperimentConfig config;
    if (!j.contains("room")) throw ConfigError("experiment config needs \"room\"");
    config.room = parse_room(j["room"], false);
    config.array_edge = get_number(j, "array_edge", "experiment config");
    config.n_sources = static_cast<std::size_t>(get_number(j, "n_sources", "experiment config"));
    config.seed = static_cast<std::uint64_t>(get_number_or(j, "seed", 1.0));
    config.delta_r_values = get_number_list(j, "delta_r", "experiment config");
    config.modes = parse_modes(j, "experiment config");
    if (j.contains("band")) config.band = parse_band(j["band"]);
    config.rt60_values = get_number_list(j, "rt60", "experiment config");
    config.sample_rate = get_number_or(j, "sample_rate", 44100.0);
    config.duration_s = get_number_or(j, "duration_s", 0.2);
    config.n_perm = static_cast<std::size_t>(get_number_or(j, "n_perm", 10000.0));

    if (j.contains("signal")) {
        const json& sig = j["signal"];
        reject_unknown_keys(sig, {"kind", "path"}, "signal");
        const std::string kind = sig.contains("kind") ? sig["kind"].get<std::string>() : "noise";
        if (kind == "noise")
            config.signal_source.kind = SignalKind::Noise;
        else if (kind == "speech")
            config.signal_source.kind = SignalKind::SpeechLike;
        else if (kind == "wav_dir") {
            config.signal_source.kind = SignalKind::WavDirectory;
            if (!sig.contains("path") || !sig["path"].is_string())
                throw ConfigError("signal kind \"wav_dir\" needs \"path\"");
            config.signal_source.wav_dir = sig["path"].get<std::string>();
        } else {
            throw ConfigError("signal kind must be \"noise\", \"speech\" or \"wav_dir\"");
        }
    }

    if (j.contains("positions")) {
        if (!j["positions"].is_array())
            throw ConfigError("\"positions\" must be an array of [x, y, z]");
        for (const auto& p : j["positions"]) {
            if (!p.is_array() || p.size() != 3)
                throw ConfigError("each fixed position must be [x, y, z]");
            config.fixed_positions.push_back(
                {p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
        }
    }

    const ExperimentResult result = run_experiment(config);
    write_experiment_csvs(result, out_dir);

    std::printf("trials=%zu stats_rows=%zu positions=%zu\n", result.trials.size(),
                result.stats.size(), result.positions.size());
    for (const StatsRow& s : result.stats)
        if (s.bucket == -1)
            std::printf("delta_r=%g rt60=%g mode=%s n=%zu mean_error=%.6g mean_deviation=%.6g\n",
                        s.delta_r, s.rt60, to_string(s.mode), s.stats.n, s.stats.mean_error,
                        s.stats.mean_deviation);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Band-limited SRP-PHAT sound source localization toolkit"};
    app.require_subcommand(1);

    int threads = 0;
    app.add_option("--threads", threads, "cap the number of worker threads");

    std::string config_path, out_dir;
    std::string wav_k, wav_l;
    double f_min = 100.0, f_max = 6000.0, f_hat_max = 0.0, tau_max = 0.010;
    std::string mode_name = "standard";

    CLI::App* rir = app.add_subcommand("rir", "image-method room impulse response");
    rir->add_option("--config", config_path, "JSON config")->required();
    rir->add_option("--out", out_dir, "output directory (must exist)")->required();

    CLI::App* gcc = app.add_subcommand("gcc", "cross-correlate two WAV files");
    gcc->add_option("--wav-k", wav_k, "first WAV file")->required();
    gcc->add_option("--wav-l", wav_l, "second WAV file")->required();
    gcc->add_option("--out", out_dir, "output directory (must exist)")->required();
    gcc->add_option("--f-min", f_min, "band floor, Hz");
    gcc->add_option("--f-max", f_max, "band ceiling, Hz");
    gcc->add_option("--mode", mode_name, "standard | band_limited | band_limited_normalized");
    gcc->add_option("--f-hat-max", f_hat_max, "band-limited cutoff, Hz (default: f-max)");
    gcc->add_option("--tau-max", tau_max, "half-width of the lag scan, seconds");

    CLI::App* map = app.add_subcommand("map", "steered-response power map");
    map->add_option("--config", config_path, "JSON config")->required();
    map->add_option("--out", out_dir, "output directory (must exist)")->required();

    CLI::App* experiment = app.add_subcommand("experiment", "seeded localization campaign");
    experiment->add_option("--config", config_path, "JSON config")->required();
    experiment->add_option("--out", out_dir, "output directory (must exist)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }

    try {
        apply_threads(threads);
        if (rir->parsed()) return cmd_rir(config_path, out_dir);
        if (gcc->parsed()) return cmd_gcc(wav_k, wav_l, out_dir, f_min, f_max, mode_name,
                                          f_hat_max, tau_max);
        if (map->parsed()) return cmd_map(config_path, out_dir);
        if (experiment->parsed()) return cmd_experiment(config_path, out_dir);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
