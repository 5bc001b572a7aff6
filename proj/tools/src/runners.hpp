// runners.hpp: sweep drivers shared by the CLI and the acceptance suite

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "kernel_cache.hpp"
#include "run_config.hpp"
#include "ncthermo/dynamics.hpp"
#include "ncthermo/metrology.hpp"

namespace ncthermo::app {

// Runs fn(i) for i in [0, n) on up to `workers` threads. Results are written
// by index, so output order never depends on scheduling. The first exception
// is rethrown after all threads join.
template <class Fn>
void parallel_for_index(std::size_t n, unsigned workers, Fn&& fn);

struct AlphaRow {
    double alpha{};
    double n_markov{};
    double steady_dx_abs{};  // NaN when the window is too short
    double steady_spread{};
    bool steady_converged{};
    std::vector<MetrologyResult> metrology;  // one per probing time
    std::vector<double> coherence;
    std::vector<double> dx;
};

struct AlphaSweep {
    RunConfig config;
    std::vector<double> times;
    std::vector<double> grid;
    std::vector<AlphaRow> rows;

    // `alpha,N_C,steady_dx_abs,converged[,qfi_t<t>...]`
    void write_csv(std::ostream& os) const;
    // Full Fisher rows, time-major.
    void write_metrology_csv(std::ostream& os) const;
    // α maximising F_Q at probing time index k.
    double argmax_alpha(std::size_t k) const;
};

// α grid at fixed T. Fisher information is reported at cfg.times (skipped when
// the list is empty); it needs T > 0.
AlphaSweep sweep_alpha(const RunConfig& cfg, KernelCache& cache);

struct SlopeFit {
    double t{};
    double slope{};       // d ln F_Q / d ln T
    double intercept{};
    std::size_t points{};
};

struct TemperatureSweep {
    RunConfig config;
    std::vector<double> temps;
    std::vector<double> times;
    // rows[k * temps.size() + j] is time k, temperature j
    std::vector<MetrologyResult> rows;
    std::vector<SlopeFit> slopes;

    const MetrologyResult& at(std::size_t k, std::size_t j) const { return rows[k * temps.size() + j]; }
    // Metrology rows followed by `# slope ...` footer lines.
    void write_csv(std::ostream& os) const;
};

// Temperature grid at fixed α. Each temperature gets its own stencil family.
TemperatureSweep sweep_temperature(const RunConfig& cfg, KernelCache& cache);

// Least-squares slope of ln F_Q against ln T over the fit window.
SlopeFit fit_low_temperature_slope(const TemperatureSweep& sw, std::size_t time_index);

struct TrajectoryRun {
    Trajectory trajectory;
    double n_markov{};
    double steady_dx_abs{};
    bool steady_converged{};
};

TrajectoryRun run_trajectory(const RunConfig& cfg, KernelCache& cache);

// Writes trajectory.csv (+ svg).
std::vector<std::filesystem::path> write_trajectory(const RunConfig& cfg, const TrajectoryRun& run);
std::vector<std::filesystem::path> write_alpha_sweep(const RunConfig& cfg, const AlphaSweep& sw,
                                                     const std::string& stem = "sweep_alpha");
std::vector<std::filesystem::path> write_temperature_sweep(const RunConfig& cfg, const TemperatureSweep& sw,
                                                           const std::string& stem = "sweep_temperature");
std::vector<std::filesystem::path> dump_kernels(const RunConfig& cfg, KernelCache& cache);

// Figure presets applied on top of cfg.
RunConfig figure_config(const std::string& figure, RunConfig cfg);
std::vector<std::filesystem::path> reproduce(const std::string& figure, const RunConfig& cfg,
                                             KernelCache& cache, std::ostream& log);

// "%.17g"
std::string format_double(double v);

} // namespace ncthermo::app

#include "runners_impl.hpp"
