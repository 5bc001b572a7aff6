// witness.hpp: coherence, re-coherence non-Markovianity, trapped coherence

#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "ncthermo/dynamics.hpp"

namespace ncthermo {

// l1-coherence √(Δx² + Δy²) at every trajectory sample.
std::vector<double> coherence(const Trajectory& traj);

// Σ max(C[i+1] − C[i], 0) over increments larger than rise_tol.
// Throws DomainError for fewer than two samples.
double non_markovianity(std::span<const double> c, double rise_tol = 1e-10);

struct SteadyCoherence {
    double value{};     // mean |Δx| over the trailing window
    double spread{};    // max − min of the per-period means of |Δx|
    bool converged{};   // spread < conv_tol
    std::size_t periods{};
};

// Period-averaged |Δx| over the trailing window_frac of the trajectory. The
// window is cut into whole precession periods 2π/ε (trapezoid rule with
// interpolated end points); the estimate is their mean and convergence is
// judged by their spread. For ε = 0 the window is used as a single block and
// split in two halves for the spread. Throws DomainError if the window holds
// fewer than two periods.
SteadyCoherence steady_coherence(const Trajectory& traj, double window_frac = 0.2,
                                 double conv_tol = 1e-4);

struct WitnessReport {
    double alpha{};
    std::vector<double> coherence;
    double n_markov{};
    double steady_dx_abs{};
    bool steady_converged{};

    // CSV row `alpha,N_C,steady_dx_abs,converged` (no header).
    void write_csv_row(std::ostream& os) const;
    static void write_csv_header(std::ostream& os);
};

WitnessReport witness(const Trajectory& traj, double rise_tol = 1e-10, double window_frac = 0.2,
                      double conv_tol = 1e-4);

} // namespace ncthermo
