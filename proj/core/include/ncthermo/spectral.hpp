// spectral.hpp: Ohmic bath spectral density and thermal occupation factors

#pragma once

namespace ncthermo {

enum class SpectralModel { Ohmic };

// J(ω) = η ω exp(−ω/ω_c). Frequencies, temperatures and times are all
// expressed in the same unit system with ħ = k_B = 1.
struct SpectralDensity {
    double eta{0.05};      // dimensionless coupling strength
    double omega_c{1.0};   // cutoff frequency
    SpectralModel model{SpectralModel::Ohmic};

    // Throws DomainError unless eta >= 0 and omega_c > 0.
    void validate() const;

    static SpectralDensity ohmic(double eta, double omega_c = 1.0);
};

// J(ω) for ω >= 0.
double evaluate(const SpectralDensity& sd, double omega);

// coth(ω/2T) for ω > 0; 1 at T = 0.
double thermal_factor(double omega, double T);

// ω·coth(ω/2T), finite at ω = 0 where it tends to 2T. Uses the series
// 2T + ω²/(6T) − ω⁴/(360T³) below 10⁻³·min(T, ω_c).
double omega_thermal_factor(double omega, double T, double omega_c = 1.0);

} // namespace ncthermo
