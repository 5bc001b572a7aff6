// run_config.hpp: run configuration for the ncthermo driver
//
// A flat `key = value` text file ('#' starts a comment) overlaid on built-in
// defaults, then overlaid by command-line flags. List values are comma
// separated.

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ncthermo/dynamics.hpp"
#include "ncthermo/kernels.hpp"
#include "ncthermo/metrology.hpp"

namespace ncthermo::app {

struct RunConfig {
    // scenario
    double epsilon{0.5};
    double T{0.2};
    double eta{0.05};
    double omega_c{1.0};
    double alpha{0.5};

    // numerics
    double t_end{50.0};
    double dt{1e-2};
    QuadratureConfig quad{};
    StencilConfig stencil{};

    // α axis
    double alpha_min{0.0};
    double alpha_max{1.0};
    std::size_t alpha_count{21};

    // temperature axis
    double temp_min{0.01};
    double temp_max{0.5};
    std::size_t temp_count{15};
    bool temp_log{true};

    // probing times at which Fisher information is reported
    std::vector<double> times{1.0, 5.0, 20.0, 50.0};

    // witness
    double rise_tol{1e-10};
    double window_frac{0.2};
    double conv_tol{1e-4};

    // low-temperature slope fit window
    double fit_temp_min{0.01};
    double fit_temp_max{0.05};

    std::filesystem::path out_dir{"."};
    unsigned workers{1};
    bool emit_svg{false};

    // Throws ConfigError on any inconsistency.
    void validate() const;
    // Probing times: increasing, on the dt grid and within (0, t_end].
    void validate_times() const;

    ProbeConfig probe(double alpha_value, double T_value) const;
    ProbeConfig probe() const { return probe(alpha, T); }
    std::vector<double> alpha_grid() const;
    std::vector<double> temperature_grid() const;
};

// Applies one `key = value` assignment. Throws ConfigError for unknown keys or
// unparsable values.
void set_option(RunConfig& cfg, const std::string& key, const std::string& value);

// Reads a config file on top of cfg.
void load_config_file(RunConfig& cfg, const std::filesystem::path& path);
void load_config(RunConfig& cfg, std::istream& in, const std::string& origin = "<stream>");

unsigned default_workers();

} // namespace ncthermo::app
