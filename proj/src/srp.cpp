#include "srpband/srp.hpp"

#include <algorithm>
#include <cmath>

#include "srpband/csv.hpp"
#include "srpband/errors.hpp"

namespace srpband {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

} // namespace

Grid build_grid(const Box& bounds, double delta_r) {
    if (!(delta_r > 0.0)) throw ConfigError("grid pitch must be positive");

    const double extent[3] = {bounds.hi.x - bounds.lo.x, bounds.hi.y - bounds.lo.y,
                              bounds.hi.z - bounds.lo.z};
    for (double e : extent)
        if (!(e > 0.0)) throw ConfigError("grid box extents must be positive");

    Grid grid;
    grid.bounds = bounds;
    grid.delta_r = delta_r;
    double offset[3];
    for (int i = 0; i < 3; ++i) {
        const auto n = static_cast<std::size_t>(std::floor(extent[i] / delta_r + 1e-9));
        grid.shape[i] = n;
        if (n == 0) throw EmptyGrid();
        // Center the lattice: half a cell in, plus half of whatever the box
        // does not divide into whole cells.
        offset[i] = (extent[i] - static_cast<double>(n) * delta_r) / 2.0 + delta_r / 2.0;
    }

    grid.points.reserve(grid.shape[0] * grid.shape[1] * grid.shape[2]);
    for (std::size_t iz = 0; iz < grid.shape[2]; ++iz)
        for (std::size_t iy = 0; iy < grid.shape[1]; ++iy)
            for (std::size_t ix = 0; ix < grid.shape[0]; ++ix)
                grid.points.push_back(
                    {bounds.lo.x + offset[0] + static_cast<double>(ix) * delta_r,
                     bounds.lo.y + offset[1] + static_cast<double>(iy) * delta_r,
                     bounds.lo.z + offset[2] + static_cast<double>(iz) * delta_r});
    return grid;
}

std::vector<CrossSpectrumPhat> pair_spectra(const std::vector<Signal>& mic_signals,
                                            const ArrayGeometry& array) {
    if (mic_signals.size() != array.size())
        throw ConfigError("need exactly one signal per microphone");
    std::vector<CrossSpectrumPhat> spectra;
    const auto pairs = array.pairs();
    spectra.reserve(pairs.size());
    for (const auto& [k, l] : pairs)
        spectra.push_back(cross_power_spectrum_phat(mic_signals[k], mic_signals[l]));
    return spectra;
}

SrpPointValue srp_point_value(const Point3& point,
                              const std::vector<CrossSpectrumPhat>& spectra,
                              const ArrayGeometry& array, GccMode mode, const Band& band,
                              SoundSpeed c, double delta_r) {
    band.validate();
    const auto pairs = array.pairs();
    if (spectra.size() != pairs.size())
        throw ConfigError("need exactly one cross spectrum per microphone pair");

    SrpPointValue out;
    out.f_max_applied_hz = band.omega_max / kTwoPi;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto [k, l] = pairs[i];
        const CrossSpectrumPhat& spec = spectra[i];
        const double tau = tdoa(array[k], array[l], point, c);

        double omega_hat = band.omega_max;
        bool pair_violated = false;
        if (mode != GccMode::Standard) {
            const PairFrame frame = pair_frame(array[k], array[l], point);
            const double grad = tdoa_gradient_norm(frame, c);
            const AliasFreeBand afb =
                max_alias_free_frequency(grad, delta_r, band, spec.bin_spacing);
            omega_hat = afb.omega_hat_max;
            pair_violated = afb.violated;
        }

        double contribution = 0.0;
        try {
            contribution = mode == GccMode::BandLimitedNormalized
                               ? gcc_eval_normalized(spec, band, omega_hat, tau)
                               : gcc_eval(spec, band.omega_min, omega_hat, tau);
        } catch (const EmptyBand&) {
            pair_violated = true;
        }

        out.value += contribution;
        out.f_max_applied_hz = std::min(out.f_max_applied_hz, omega_hat / kTwoPi);
        out.violated = out.violated || pair_violated;
    }
    return out;
}

double srp_value(const Point3& point, const std::vector<CrossSpectrumPhat>& spectra,
                 const ArrayGeometry& array, GccMode mode, const Band& band, SoundSpeed c,
                 double delta_r) {
    return srp_point_value(point, spectra, array, mode, band, c, delta_r).value;
}

namespace {

SrpMap map_skeleton(const Grid& grid, GccMode mode) {
    if (grid.points.empty()) throw EmptyGrid();
    SrpMap map;
    map.grid = grid;
    map.mode = mode;
    map.values.resize(grid.points.size());
    map.applied_f_max.resize(grid.points.size());
    map.condition_violated.resize(grid.points.size());
    return map;
}

void fill_point(SrpMap& map, std::size_t i, const std::vector<CrossSpectrumPhat>& spectra,
                const ArrayGeometry& array, GccMode mode, const Band& band, SoundSpeed c) {
    const SrpPointValue v = srp_point_value(map.grid.points[i], spectra, array, mode, band, c,
                                            map.grid.delta_r);
    map.values[i] = v.value;
    map.applied_f_max[i] = v.f_max_applied_hz;
    map.condition_violated[i] = v.violated ? 1 : 0;
}

} // namespace

SrpMap compute_map(const Grid& grid, const std::vector<Signal>& mic_signals,
                   const ArrayGeometry& array, GccMode mode, const Band& band, SoundSpeed c) {
    return compute_map(grid, pair_spectra(mic_signals, array), array, mode, band, c);
}

SrpMap compute_map(const Grid& grid, const std::vector<CrossSpectrumPhat>& spectra,
                   const ArrayGeometry& array, GccMode mode, const Band& band, SoundSpeed c) {
    SrpMap map = map_skeleton(grid, mode);
    const auto n = static_cast<long long>(grid.points.size());
    // Each point owns its output slot and pair order inside a point is fixed,
    // so the result is bit-identical for any schedule or thread count.
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i)
        fill_point(map, static_cast<std::size_t>(i), spectra, array, mode, band, c);
    return map;
}

SrpMap compute_map_serial(const Grid& grid, const std::vector<CrossSpectrumPhat>& spectra,
                          const ArrayGeometry& array, GccMode mode, const Band& band,
                          SoundSpeed c) {
    SrpMap map = map_skeleton(grid, mode);
    for (std::size_t i = 0; i < grid.points.size(); ++i)
        fill_point(map, i, spectra, array, mode, band, c);
    return map;
}

LocalizationResult localize(const SrpMap& map) {
    if (map.values.empty() || map.grid.points.size() != map.values.size()) throw EmptyGrid();
    std::size_t best = 0;
    for (std::size_t i = 1; i < map.values.size(); ++i)
        if (map.values[i] > map.values[best]) best = i;
    return {map.grid.points[best], map.values[best], best};
}

void write_map_csv(const SrpMap& map, const std::string& path) {
    std::ofstream out = open_output(path);
    out << "x,y,z,value,f_max_applied,condition_violated\n";
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        const Point3& p = map.grid.points[i];
        out << csv_num(p.x) << ',' << csv_num(p.y) << ',' << csv_num(p.z) << ','
            << csv_num(map.values[i]) << ',' << csv_num(map.applied_f_max[i]) << ','
            << int(map.condition_violated[i]) << '\n';
    }
    if (!out) throw IoError("failed writing map CSV: " + path);
}

void write_slice_csv(const SrpMap& map, std::size_t z_index, const std::string& path) {
    if (z_index >= map.grid.shape[2]) throw ConfigError("slice index outside the grid");
    std::ofstream out = open_output(path);
    for (std::size_t iy = 0; iy < map.grid.shape[1]; ++iy) {
        for (std::size_t ix = 0; ix < map.grid.shape[0]; ++ix) {
            if (ix) out << ',';
            out << csv_num(map.values[map.grid.index_of(ix, iy, z_index)]);
        }
        out << '\n';
    }
    if (!out) throw IoError("failed writing slice CSV: " + path);
}

} // namespace srpband
