// Benchmark of the SRP map kernel: single-threaded reference vs the OpenMP
// path, with a bitwise equality check between the two. --quick shrinks the
// grid so the comparison can run inside the test suite.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "srpband/experiment.hpp"
#include "srpband/roomsim.hpp"
#include "srpband/srp.hpp"
#include "srpband/synth.hpp"

using namespace srpband;

namespace {

double best_of_ms(int reps, const std::function<void()>& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

bool bitwise_equal(const SrpMap& a, const SrpMap& b) {
    return a.values.size() == b.values.size() &&
           std::memcmp(a.values.data(), b.values.data(), a.values.size() * sizeof(double)) == 0 &&
           std::memcmp(a.applied_f_max.data(), b.applied_f_max.data(),
                       a.applied_f_max.size() * sizeof(double)) == 0 &&
           a.condition_violated == b.condition_violated;
}

} // namespace

int main(int argc, char** argv) {
    bool quick = false;
    for (int i = 1; i < argc; ++i) {
        if (std::string(argv[i]) == "--quick") {
            quick = true;
        } else {
            std::fprintf(stderr, "usage: %s [--quick]\n", argv[0]);
            return 1;
        }
    }

    const double fs = 44100.0;
    const Band band = Band::from_hz(100.0, 6000.0);
    const RoomSpec room{{8.0, 10.0, 4.0}, 0.0, SoundSpeed{}};
    const ArrayGeometry array = tetrahedron_array(room.center(), 0.5);
    const Point3 source{2.25, 7.25, 1.75};

    const Signal src = band_limited_noise(fs, quick ? 0.1 : 0.2, band, 42);
    const std::vector<Signal> mic_sigs = simulate_event(room, source, array, src, fs);
    const std::vector<CrossSpectrumPhat> spectra = pair_spectra(mic_sigs, array);

    const double delta_r = quick ? 1.0 : 0.5;
    const Grid grid = build_grid(Box{{0, 0, 0}, {8.0, 10.0, 4.0}}, delta_r);
    const int reps = quick ? 1 : 3;

    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    std::printf("grid: %zu points (delta_r = %g m), %zu pair spectra, %d thread(s)\n",
                grid.points.size(), delta_r, spectra.size(), threads);

    SrpMap serial_map, parallel_map;
    for (GccMode mode :
         {GccMode::Standard, GccMode::BandLimited, GccMode::BandLimitedNormalized}) {
        const double t_serial = best_of_ms(reps, [&] {
            serial_map = compute_map_serial(grid, spectra, array, mode, band, room.c);
        });
        const double t_parallel = best_of_ms(reps, [&] {
            parallel_map = compute_map(grid, spectra, array, mode, band, room.c);
        });
        const bool equal = bitwise_equal(serial_map, parallel_map);
        std::printf("%-24s serial %9.2f ms | parallel %9.2f ms | speedup %5.2fx | %s\n",
                    to_string(mode), t_serial, t_parallel, t_serial / t_parallel,
                    equal ? "bitwise equal" : "MISMATCH");
        if (!equal) return 1;
    }
    return 0;
}
