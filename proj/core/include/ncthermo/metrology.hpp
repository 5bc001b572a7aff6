// metrology.hpp: temperature estimation precision of the probe
//
// The temperature derivative of the Bloch vector is taken with a five-point
// central stencil over full re-simulations at T ± δ, T ± 2δ. Only R, K, X
// depend on T, so the shifted kernel sets share L, F, G and use one panel
// layout; see precompute_temperature_family.

#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <vector>

#include "ncthermo/dynamics.hpp"
#include "ncthermo/kernels.hpp"

namespace ncthermo {

struct StencilConfig {
    double delta_rel{1e-7};  // δ = delta_rel · T

    void validate() const;
};

// (−f(x+2h) + 8f(x+h) − 8f(x−h) + f(x−2h)) / 12h; exact for quartics.
// Summed as paired differences so equal samples give exactly zero.
inline double five_point(double fm2, double fm1, double fp1, double fp2, double h) {
    return (8.0 * (fp1 - fm1) - (fp2 - fm2)) / (12.0 * h);
}

template <class F>
double five_point_derivative(F&& f, double x, double h) {
    return five_point(f(x - 2.0 * h), f(x - h), f(x + h), f(x + 2.0 * h), h);
}

// Shifted temperatures in the order {T−2δ, T−δ, T+δ, T+2δ}. Throws
// DomainError when T − 2δ <= 0.
std::array<double, 4> stencil_temperatures(double T, const StencilConfig& s);

// Δ(t) and ∂_T Δ(t) on the trajectory grid.
struct TemperatureSensitivity {
    ProbeConfig config{};
    std::vector<double> grid;
    std::vector<BlochState> states;
    std::vector<BlochState> derivatives;
};

// Kernel sets for {T, T−2δ, T−δ, T+δ, T+2δ}, in that order.
std::vector<KernelSet> stencil_kernel_family(const ProbeConfig& cfg, const StencilConfig& s,
                                             const QuadratureConfig& q = {}, unsigned workers = 1);

// Runs the five trajectories on a family from stencil_kernel_family (which
// may be shared across α).
TemperatureSensitivity temperature_sensitivity(const ProbeConfig& cfg,
                                               std::span<const KernelSet> family,
                                               const StencilConfig& s = {});

TemperatureSensitivity temperature_sensitivity(const ProbeConfig& cfg, const StencilConfig& s = {},
                                               const QuadratureConfig& q = {},
                                               unsigned workers = 1);

// ∂_T Δ at one grid time (t_eval must be a multiple of cfg.dt).
BlochState d_bloch_dT(const ProbeConfig& cfg, double t_eval, const StencilConfig& s = {},
                      const QuadratureConfig& q = {});

// Tolerance on |Δ|² − 1 treated as a pure state.
inline constexpr double kPureStateGuard = 1e-12;

// Quantum Fisher information ∂Δᵀ (I + ΔΔᵀ/(1 − |Δ|²)) ∂Δ. Near the sphere
// surface the pure-state limit |∂Δ|² is used, after checking ∂Δ ⟂ Δ.
double qfi(const BlochState& delta, const BlochState& ddelta);

enum class Axis { X, Z };

// Classical Fisher information of a projective σ_axis measurement.
double cfi(Axis axis, const BlochState& delta, const BlochState& ddelta);

// 1/√(M F); +∞ when F = 0.
double qcrb(double fisher, double shots = 1.0);

struct MarkovComparator {
    double fisher{};     // ε² e^{−ε/T} / (2T⁴)
    double dT2_min{};    // 2T⁴ e^{ε/T} / (M ε²)
};

// Born–Markov steady-state benchmark. Throws DomainError for ε <= 0 or T <= 0.
MarkovComparator markov_comparator(double epsilon, double T, double shots = 1.0);

struct MetrologyResult {
    double t{};
    double T{};
    double alpha{};
    double qfi{};
    double cfi_x{};
    double cfi_z{};
    double qcrb{};
    double markov_fisher{};  // NaN when the comparator is undefined (ε = 0)

    static void write_csv_header(std::ostream& os);
    // `t,T,alpha,qfi,cfi_x,cfi_z,qcrb,markov_fisher`
    void write_csv_row(std::ostream& os) const;
};

// Fisher quantities at grid index i of a sensitivity run.
MetrologyResult metrology_at(const TemperatureSensitivity& ts, std::size_t i);

} // namespace ncthermo
