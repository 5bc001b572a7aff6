// dynamics.hpp: probe qubit Bloch-vector dynamics
//
// The probe couples to the bath through σ_α = (1−α)σz + ασx. Its Bloch vector
// obeys three linear equations whose time-dependent coefficients are the six
// kernels of kernels.hpp. α = 0 is pure dephasing, α = 1 purely dissipative;
// terms proportional to α(α−1) are interference between the two channels.

#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "ncthermo/kernels.hpp"
#include "ncthermo/spectral.hpp"

namespace ncthermo {

// Tolerated excess of |Δ|² over 1 before a step is declared unphysical.
inline constexpr double kPhysicalitySlack = 1e-8;

struct BlochState {
    double dx{}, dy{}, dz{};

    double norm2() const { return dx * dx + dy * dy + dz * dz; }
    friend bool operator==(const BlochState&, const BlochState&) = default;
};

struct ProbeConfig {
    double epsilon{0.5};
    double alpha{0.5};
    double T{0.2};
    SpectralDensity sd{};
    BlochState initial{1.0, 0.0, 0.0};
    double t_end{50.0};
    double dt{1e-2};

    // Throws DomainError on α outside [0, 1], |Δ(0)| > 1 or a bad grid.
    void validate() const;
    KernelParams kernel_params() const;
};

struct Trajectory {
    std::vector<double> grid;
    std::vector<BlochState> states;
    ProbeConfig config{};

    std::size_t size() const { return grid.size(); }
    // CSV with header `t,dx,dy,dz`, 17 significant digits.
    void write_csv(std::ostream& os) const;
};

// Right-hand side of the Bloch equations at one instant.
BlochState rhs(const BlochState& s, const KernelValues& k, double epsilon, double alpha);

// Classical RK4 with step cfg.dt; stage kernels come from the grid and
// midpoint samples of ks. ks must match cfg in (η, ω_c, ε, T, dt) and cover
// [0, cfg.t_end]; otherwise ConfigError. Throws IntegrationError at the first
// step whose |Δ|² exceeds 1 + kPhysicalitySlack.
Trajectory integrate(const ProbeConfig& cfg, const KernelSet& ks);

// Γ(t) = 4 ∫ J(ω) coth(ω/2T) (1 − cos ωt)/ω² dω by direct adaptive quadrature.
double dephasing_exponent(const SpectralDensity& sd, double T, double t,
                          const QuadratureConfig& q = {});

// Exact α = 0 solution: Δz constant, transverse part rotated by εt and damped
// by exp(−Γ(t)). Evaluated at the requested times.
std::vector<BlochState> dephasing_solution(const ProbeConfig& cfg, std::span<const double> times,
                                           const QuadratureConfig& q = {});

// dephasing_solution on the full grid of cfg. Throws ConfigError unless α = 0.
Trajectory dephasing_oracle(const ProbeConfig& cfg, const QuadratureConfig& q = {});

} // namespace ncthermo
