// kernels.hpp: the six time-dependent Bloch coefficients R, K, L, X, F, G
//
// Each coefficient is a frequency integral over [0, ∞) of the spectral
// density against an oscillating weight:
//
//   R(t) = ∫ J coth(ω/2T) sin(ωt) / ω
//   K(t) = ∫ J coth(ω/2T) [ε sin(εt) cos(ωt) − ω cos(εt) sin(ωt)] / (ε² − ω²)
//   L(t) = ∫ J (1 − cos(ωt)) / ω
//   X(t) = ∫ J coth(ω/2T) [−ω sin(εt) sin(ωt) − ε cos(εt) cos(ωt) + ε] / (ε² − ω²)
//   F(t) = ∫ J [ε sin(εt) sin(ωt) + ω cos(εt) cos(ωt) − ω] / (ε² − ω²)
//   G(t) = ∫ J [ω sin(εt) cos(ωt) − ε cos(εt) sin(ωt)] / (ε² − ω²)
//
// R, K, X depend on temperature ("thermal" group); L, F, G do not
// ("mechanical" group). The numerators of K, X, F, G vanish at ω = ε, so the
// point is a removable singularity. Inside a guard band around ω = ε the
// integrands are evaluated through the equivalent sum/difference-frequency
// form, e.g. K's bracket equals ½[sin((ε+ω)t)/(ε+ω) + sin((ε−ω)t)/(ε−ω)].

#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "ncthermo/spectral.hpp"

namespace ncthermo {

struct KernelParams {
    SpectralDensity sd{};
    double epsilon{0.5};  // qubit splitting
    double T{0.2};        // bath temperature

    void validate() const;
};

struct QuadratureConfig {
    double rel_tol{1e-9};
    double abs_tol{1e-12};
    double omega_max_factor{60.0};       // ω_max = factor · ω_c
    double panels_per_oscillation{4.0};  // panels per period 2π/t
    double resonance_guard{1e-4};        // half-width of the ω = ε band, units of ω_c
    std::size_t max_subdivisions{20000};

    void validate() const;
};

enum class KernelId : std::size_t { R = 0, K = 1, L = 2, X = 3, F = 4, G = 5 };
inline constexpr std::size_t kKernelCount = 6;
inline constexpr std::array<KernelId, kKernelCount> kAllKernels{
    KernelId::R, KernelId::K, KernelId::L, KernelId::X, KernelId::F, KernelId::G};

std::string_view kernel_name(KernelId id);

struct KernelValues {
    double R{}, K{}, L{}, X{}, F{}, G{};

    double operator[](KernelId id) const;
};

struct ThermalValues {
    double R{}, K{}, X{};
};

struct MechanicalValues {
    double L{}, F{}, G{};
};

// All six coefficients at time t >= 0. Throws NumericError if the adaptive
// panel budget is exhausted before the tolerance is met.
KernelValues evaluate_kernels(const KernelParams& p, double t, const QuadratureConfig& q = {});

double kernel_R(const KernelParams& p, double t, const QuadratureConfig& q = {});
double kernel_K(const KernelParams& p, double t, const QuadratureConfig& q = {});
double kernel_L(const KernelParams& p, double t, const QuadratureConfig& q = {});
double kernel_X(const KernelParams& p, double t, const QuadratureConfig& q = {});
double kernel_F(const KernelParams& p, double t, const QuadratureConfig& q = {});
double kernel_G(const KernelParams& p, double t, const QuadratureConfig& q = {});

// R, K, X at several temperatures on one shared panel layout. The layout and
// its adaptive refinement are decided at p.T; the remaining temperatures are
// integrated on exactly the same nodes, so the results are smooth in T (as
// needed by finite-difference temperature derivatives).
std::vector<ThermalValues> evaluate_thermal_family(const KernelParams& p, double t,
                                                   std::span<const double> temperatures,
                                                   const QuadratureConfig& q = {});

MechanicalValues evaluate_mechanical(const KernelParams& p, double t,
                                     const QuadratureConfig& q = {});

using KernelTable = std::array<std::vector<double>, kKernelCount>;

// Kernel samples on the uniform grid {0, dt, ..., t_end} and on the grid
// midpoints, so that classical RK4 stages land on stored samples.
struct KernelSet {
    KernelParams params{};
    QuadratureConfig quad{};
    double dt{};
    std::vector<double> grid;
    KernelTable values;       // values[k][i] at grid[i]
    KernelTable half_values;  // half_values[k][i] at grid[i] + dt/2

    std::size_t size() const { return grid.size(); }
    double t_end() const { return grid.empty() ? 0.0 : grid.back(); }
    KernelValues at(std::size_t i) const;
    KernelValues at_half(std::size_t i) const;

    // CSV with header `t,R,K,L,X,F,G`, 17 significant digits.
    void write_csv(std::ostream& os) const;
};

// Number of grid intervals for (t_end, dt); t_end must be an integer
// multiple of dt up to rounding.
std::size_t grid_steps(double t_end, double dt);

KernelSet precompute(const KernelParams& p, double t_end, double dt,
                     const QuadratureConfig& q = {}, unsigned workers = 1);

// One KernelSet per temperature. L, F, G are computed once and shared; R, K,
// X use layouts fixed at p.T (see evaluate_thermal_family).
std::vector<KernelSet> precompute_temperature_family(const KernelParams& p,
                                                     std::span<const double> temperatures,
                                                     double t_end, double dt,
                                                     const QuadratureConfig& q = {},
                                                     unsigned workers = 1);

} // namespace ncthermo
