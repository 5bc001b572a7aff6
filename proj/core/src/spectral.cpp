// spectral.cpp: Ohmic spectral density

#include "ncthermo/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ncthermo/errors.hpp"

namespace ncthermo {

void SpectralDensity::validate() const {
    if (!(eta >= 0.0) || !std::isfinite(eta))
        throw DomainError("spectral density: eta must be finite and >= 0");
    if (!(omega_c > 0.0) || !std::isfinite(omega_c))
        throw DomainError("spectral density: omega_c must be finite and > 0");
}

SpectralDensity SpectralDensity::ohmic(double eta, double omega_c) {
    SpectralDensity sd{eta, omega_c, SpectralModel::Ohmic};
    sd.validate();
    return sd;
}

double evaluate(const SpectralDensity& sd, double omega) {
    if (!(omega >= 0.0))
        throw DomainError("spectral density: omega must be >= 0, got " + std::to_string(omega));
    return sd.eta * omega * std::exp(-omega / sd.omega_c);
}

double thermal_factor(double omega, double T) {
    if (!(omega > 0.0))
        throw DomainError("thermal_factor: omega must be > 0 (use the small-omega series)");
    if (!(T >= 0.0))
        throw DomainError("thermal_factor: temperature must be >= 0");
    if (T == 0.0) return 1.0;
    return 1.0 / std::tanh(omega / (2.0 * T));
}

double omega_thermal_factor(double omega, double T, double omega_c) {
    if (T == 0.0) return omega;
    if (omega < 1e-3 * std::min(T, omega_c)) {
        const double w2 = omega * omega;
        return 2.0 * T + w2 / (6.0 * T) - w2 * w2 / (360.0 * T * T * T);
    }
    return omega / std::tanh(omega / (2.0 * T));
}

} // namespace ncthermo
