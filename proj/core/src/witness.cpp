// witness.cpp: coherence-based post-processing of trajectories

#include "ncthermo/witness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "ncthermo/errors.hpp"

namespace ncthermo {

std::vector<double> coherence(const Trajectory& traj) {
    std::vector<double> c(traj.states.size());
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] = std::hypot(traj.states[i].dx, traj.states[i].dy);
    return c;
}

double non_markovianity(std::span<const double> c, double rise_tol) {
    if (c.size() < 2) throw DomainError("non_markovianity: need at least two samples");
    double n = 0.0;
    for (std::size_t i = 0; i + 1 < c.size(); ++i) {
        const double rise = c[i + 1] - c[i];
        if (rise > rise_tol) n += rise;
    }
    return n;
}

namespace {

// ∫ |Δx| dt over [a, b] on the uniform grid, with linear interpolation at
// the fractional end points.
double abs_dx_integral(const Trajectory& traj, double a, double b) {
    const double dt = traj.config.dt;
    const auto& g = traj.grid;
    auto value = [&](double t) {
        const double pos = t / dt;
        auto i = static_cast<std::size_t>(std::floor(pos));
        if (i + 1 >= g.size()) return std::abs(traj.states.back().dx);
        const double f = pos - static_cast<double>(i);
        return (1.0 - f) * std::abs(traj.states[i].dx) + f * std::abs(traj.states[i + 1].dx);
    };
    const auto first = static_cast<std::size_t>(std::ceil(a / dt));
    const auto last = static_cast<std::size_t>(std::floor(b / dt));
    if (first > last) return 0.5 * (value(a) + value(b)) * (b - a);
    double sum = 0.5 * (value(a) + std::abs(traj.states[first].dx)) * (g[first] - a);
    for (std::size_t i = first; i < last; ++i)
        sum += 0.5 * (std::abs(traj.states[i].dx) + std::abs(traj.states[i + 1].dx)) * dt;
    sum += 0.5 * (std::abs(traj.states[last].dx) + value(b)) * (b - g[last]);
    return sum;
}

} // namespace

SteadyCoherence steady_coherence(const Trajectory& traj, double window_frac, double conv_tol) {
    if (!(window_frac > 0.0 && window_frac <= 1.0))
        throw DomainError("steady_coherence: window_frac must lie in (0, 1]");
    if (traj.size() < 3) throw DomainError("steady_coherence: trajectory too short");
    const double t_end = traj.grid.back();
    const double start = (1.0 - window_frac) * t_end;
    const double eps = traj.config.epsilon;

    std::vector<double> means;
    if (eps > 0.0) {
        const double period = 2.0 * std::numbers::pi / eps;
        const auto count = static_cast<std::size_t>(std::floor((t_end - start) / period));
        if (count < 2)
            throw DomainError("steady_coherence: trailing window holds fewer than two precession periods");
        // Align the periods with the end of the trajectory.
        const double a0 = t_end - static_cast<double>(count) * period;
        for (std::size_t k = 0; k < count; ++k) {
            const double a = a0 + static_cast<double>(k) * period;
            means.push_back(abs_dx_integral(traj, a, a + period) / period);
        }
    } else {
        const double mid = 0.5 * (start + t_end);
        means.push_back(abs_dx_integral(traj, start, mid) / (mid - start));
        means.push_back(abs_dx_integral(traj, mid, t_end) / (t_end - mid));
    }
    SteadyCoherence r;
    double sum = 0.0;
    for (double m : means) sum += m;
    r.value = sum / static_cast<double>(means.size());
    const auto [lo, hi] = std::minmax_element(means.begin(), means.end());
    r.spread = *hi - *lo;
    r.converged = r.spread < conv_tol;
    r.periods = eps > 0.0 ? means.size() : 0;
    return r;
}

void WitnessReport::write_csv_header(std::ostream& os) {
    os << "alpha,N_C,steady_dx_abs,converged\n";
}

void WitnessReport::write_csv_row(std::ostream& os) const {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d\n", alpha, n_markov, steady_dx_abs,
                  steady_converged ? 1 : 0);
    os << buf;
}

WitnessReport witness(const Trajectory& traj, double rise_tol, double window_frac,
                      double conv_tol) {
    WitnessReport r;
    r.alpha = traj.config.alpha;
    r.coherence = coherence(traj);
    r.n_markov = non_markovianity(r.coherence, rise_tol);
    const auto steady = steady_coherence(traj, window_frac, conv_tol);
    r.steady_dx_abs = steady.value;
    r.steady_converged = steady.converged;
    return r;
}

} // namespace ncthermo
