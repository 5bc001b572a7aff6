// dynamics.cpp: RK4 Bloch integrator and the pure-dephasing reference solution

#include "ncthermo/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <string>

#include "ncthermo/errors.hpp"
#include "ncthermo/quadrature.hpp"

namespace ncthermo {

void ProbeConfig::validate() const {
    sd.validate();
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("probe: alpha must lie in [0, 1]");
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
        throw DomainError("probe: epsilon must be finite and >= 0");
    if (!(T >= 0.0) || !std::isfinite(T)) throw DomainError("probe: T must be finite and >= 0");
    if (!(initial.norm2() <= 1.0 + kPhysicalitySlack))
        throw DomainError("probe: initial Bloch vector lies outside the unit ball");
    grid_steps(t_end, dt);
}

KernelParams ProbeConfig::kernel_params() const {
    return KernelParams{sd, epsilon, T};
}

void Trajectory::write_csv(std::ostream& os) const {
    os << "t,dx,dy,dz\n";
    char buf[128];
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& s = states[i];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", grid[i], s.dx, s.dy, s.dz);
        os << buf;
    }
}

BlochState rhs(const BlochState& s, const KernelValues& k, double epsilon, double alpha) {
    const std::array<double, 10> in{s.dx, s.dy, s.dz, k.R, k.K, k.L, k.X, k.F, k.G, epsilon};
    for (double v : in)
        if (!std::isfinite(v)) throw NumericError("bloch rhs: non-finite input");

    const double a2 = alpha * alpha;
    const double b2 = (alpha - 1.0) * (alpha - 1.0);
    const double ab = alpha * (alpha - 1.0);  // exactly 0 at α ∈ {0, 1}
    BlochState d;
    d.dx = -epsilon * s.dy - 4.0 * ab * k.G - 4.0 * ab * s.dz * k.K - 4.0 * b2 * s.dx * k.R;
    d.dy = s.dx * (epsilon + 4.0 * a2 * k.X) + 4.0 * ab * (k.F - k.L) -
           4.0 * s.dy * (a2 * k.K + b2 * k.R) - 4.0 * ab * s.dz * k.X;
    d.dz = -4.0 * a2 * k.G - 4.0 * a2 * s.dz * k.K - 4.0 * ab * s.dx * k.R;
    return d;
}

namespace {

bool same(double a, double b) {
    return a == b || std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
}

void check_kernel_set(const ProbeConfig& cfg, const KernelSet& ks, std::size_t steps) {
    const auto& p = ks.params;
    if (!same(p.sd.eta, cfg.sd.eta) || !same(p.sd.omega_c, cfg.sd.omega_c) ||
        !same(p.epsilon, cfg.epsilon) || !same(p.T, cfg.T))
        throw ConfigError("integrate: kernel set was built for different (eta, omega_c, epsilon, T)");
    if (!same(ks.dt, cfg.dt)) throw ConfigError("integrate: kernel set time step differs from dt");
    if (ks.size() < steps + 1 || ks.half_values[0].size() < steps)
        throw ConfigError("integrate: kernel set does not cover [0, t_end]");
}

BlochState axpy(const BlochState& s, double h, const BlochState& d) {
    return {s.dx + h * d.dx, s.dy + h * d.dy, s.dz + h * d.dz};
}

} // namespace

Trajectory integrate(const ProbeConfig& cfg, const KernelSet& ks) {
    cfg.validate();
    const std::size_t n = grid_steps(cfg.t_end, cfg.dt);
    check_kernel_set(cfg, ks, n);

    Trajectory tr;
    tr.config = cfg;
    tr.grid.resize(n + 1);
    tr.states.resize(n + 1);
    tr.grid[0] = 0.0;
    tr.states[0] = cfg.initial;

    const double h = cfg.dt;
    const double eps = cfg.epsilon, alpha = cfg.alpha;
    KernelValues k_next = ks.at(0);
    BlochState s = cfg.initial;
    for (std::size_t i = 0; i < n; ++i) {
        const KernelValues k0 = k_next;
        const KernelValues kh = ks.at_half(i);
        k_next = ks.at(i + 1);
        const BlochState d1 = rhs(s, k0, eps, alpha);
        const BlochState d2 = rhs(axpy(s, 0.5 * h, d1), kh, eps, alpha);
        const BlochState d3 = rhs(axpy(s, 0.5 * h, d2), kh, eps, alpha);
        const BlochState d4 = rhs(axpy(s, h, d3), k_next, eps, alpha);
        s.dx += h / 6.0 * (d1.dx + 2.0 * d2.dx + 2.0 * d3.dx + d4.dx);
        s.dy += h / 6.0 * (d1.dy + 2.0 * d2.dy + 2.0 * d3.dy + d4.dy);
        s.dz += h / 6.0 * (d1.dz + 2.0 * d2.dz + 2.0 * d3.dz + d4.dz);

        const double t = ks.grid[i + 1];
        if (!(s.norm2() <= 1.0 + kPhysicalitySlack))
            throw IntegrationError("integrate: Bloch vector left the unit ball at t=" +
                                       std::to_string(t) + " (|D|^2=" +
                                       std::to_string(s.norm2()) + ")",
                                   t);
        tr.grid[i + 1] = t;
        tr.states[i + 1] = s;
    }
    return tr;
}

double dephasing_exponent(const SpectralDensity& sd, double T, double t,
                          const QuadratureConfig& q) {
    sd.validate();
    q.validate();
    if (!(T >= 0.0)) throw DomainError("dephasing_exponent: T must be >= 0");
    if (!(t >= 0.0)) throw DomainError("dephasing_exponent: t must be >= 0");
    if (t == 0.0 || sd.eta == 0.0) return 0.0;

    const double wc = sd.omega_c;
    // (1 − cos ωt)/ω² = (t²/2)·sinc²(ωt/2)
    auto f = [&](double w) {
        const double u = 0.5 * w * t;
        const double sc = u < 1e-4 ? 1.0 - u * u / 6.0 : std::sin(u) / u;
        return std::exp(-w / wc) * omega_thermal_factor(w, T, wc) * 0.5 * t * t * sc * sc;
    };
    const double w_max = q.omega_max_factor * wc;
    std::vector<double> breaks{0.0, w_max};
    if (T > 0.0)
        for (double m : {1.0, 2.0, 4.0, 8.0})
            if (m * T < w_max) breaks.push_back(m * T);
    std::sort(breaks.begin(), breaks.end());
    const double width = std::min(wc / 4.0, 2.0 * std::numbers::pi / (t * q.panels_per_oscillation));
    const auto r = quad::integrate_adaptive(f, breaks, width, 1e-12, 1e-15, q.max_subdivisions);
    return 4.0 * sd.eta * r.value;
}

std::vector<BlochState> dephasing_solution(const ProbeConfig& cfg, std::span<const double> times,
                                           const QuadratureConfig& q) {
    cfg.validate();
    if (cfg.alpha != 0.0) throw ConfigError("dephasing oracle: requires alpha = 0");
    std::vector<BlochState> out;
    out.reserve(times.size());
    const BlochState& s0 = cfg.initial;
    for (double t : times) {
        if (t == 0.0) {
            out.push_back(s0);
            continue;
        }
        const double damp = std::exp(-dephasing_exponent(cfg.sd, cfg.T, t, q));
        const double c = std::cos(cfg.epsilon * t), s = std::sin(cfg.epsilon * t);
        out.push_back({damp * (s0.dx * c - s0.dy * s), damp * (s0.dx * s + s0.dy * c), s0.dz});
    }
    return out;
}

Trajectory dephasing_oracle(const ProbeConfig& cfg, const QuadratureConfig& q) {
    cfg.validate();
    const std::size_t n = grid_steps(cfg.t_end, cfg.dt);
    Trajectory tr;
    tr.config = cfg;
    tr.grid.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) tr.grid[i] = static_cast<double>(i) * cfg.dt;
    tr.states = dephasing_solution(cfg, tr.grid, q);
    return tr;
}

} // namespace ncthermo
