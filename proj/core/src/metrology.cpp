// metrology.cpp: stencil derivatives and Fisher information

#include "ncthermo/metrology.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

#include "ncthermo/errors.hpp"

namespace ncthermo {

void StencilConfig::validate() const {
    if (!(delta_rel > 1e-12 && delta_rel < 1e-3))
        throw ConfigError("stencil: delta_rel must lie in (1e-12, 1e-3)");
}

std::array<double, 4> stencil_temperatures(double T, const StencilConfig& s) {
    s.validate();
    const double d = s.delta_rel * T;
    if (!(T - 2.0 * d > 0.0)) throw DomainError("stencil: T - 2*delta must be > 0");
    return {T - 2.0 * d, T - d, T + d, T + 2.0 * d};
}

std::vector<KernelSet> stencil_kernel_family(const ProbeConfig& cfg, const StencilConfig& s,
                                             const QuadratureConfig& q, unsigned workers) {
    cfg.validate();
    const auto shifted = stencil_temperatures(cfg.T, s);
    const std::array<double, 5> temps{cfg.T, shifted[0], shifted[1], shifted[2], shifted[3]};
    return precompute_temperature_family(cfg.kernel_params(), temps, cfg.t_end, cfg.dt, q, workers);
}

TemperatureSensitivity temperature_sensitivity(const ProbeConfig& cfg,
                                               std::span<const KernelSet> family,
                                               const StencilConfig& s) {
    cfg.validate();
    if (family.size() != 5) throw ConfigError("temperature_sensitivity: need five kernel sets");
    const auto shifted = stencil_temperatures(cfg.T, s);
    const double h = s.delta_rel * cfg.T;

    std::array<Trajectory, 5> runs;
    for (std::size_t k = 0; k < 5; ++k) {
        ProbeConfig c = cfg;
        if (k > 0) c.T = shifted[k - 1];
        runs[k] = integrate(c, family[k]);
    }

    TemperatureSensitivity ts;
    ts.config = cfg;
    ts.grid = runs[0].grid;
    ts.states = runs[0].states;
    ts.derivatives.resize(ts.grid.size());
    for (std::size_t i = 0; i < ts.grid.size(); ++i) {
        const auto& m2 = runs[1].states[i];
        const auto& m1 = runs[2].states[i];
        const auto& p1 = runs[3].states[i];
        const auto& p2 = runs[4].states[i];
        ts.derivatives[i] = {five_point(m2.dx, m1.dx, p1.dx, p2.dx, h),
                             five_point(m2.dy, m1.dy, p1.dy, p2.dy, h),
                             five_point(m2.dz, m1.dz, p1.dz, p2.dz, h)};
    }
    return ts;
}

TemperatureSensitivity temperature_sensitivity(const ProbeConfig& cfg, const StencilConfig& s,
                                               const QuadratureConfig& q, unsigned workers) {
    const auto family = stencil_kernel_family(cfg, s, q, workers);
    return temperature_sensitivity(cfg, family, s);
}

BlochState d_bloch_dT(const ProbeConfig& cfg, double t_eval, const StencilConfig& s,
                      const QuadratureConfig& q) {
    if (!(cfg.T > 0.0)) throw DomainError("d_bloch_dT: requires T > 0");
    ProbeConfig c = cfg;
    c.t_end = t_eval;
    const std::size_t n = grid_steps(t_eval, cfg.dt);
    const auto ts = temperature_sensitivity(c, s, q);
    return ts.derivatives[n];
}

double qfi(const BlochState& d, const BlochState& dd) {
    const double n2 = d.norm2();
    if (!(n2 <= 1.0 + kPhysicalitySlack)) throw DomainError("qfi: Bloch vector outside the unit ball");
    const double g2 = dd.norm2();
    const double proj = d.dx * dd.dx + d.dy * dd.dy + d.dz * dd.dz;
    if (n2 > 1.0 - kPureStateGuard) {
        if (!(std::abs(proj) <= 1e-8 * std::sqrt(g2)))
            throw NumericError("qfi: derivative not tangent to the pure-state sphere");
        return g2;
    }
    return g2 + proj * proj / (1.0 - n2);
}

double cfi(Axis axis, const BlochState& d, const BlochState& dd) {
    const double v = axis == Axis::X ? d.dx : d.dz;
    const double dv = axis == Axis::X ? dd.dx : dd.dz;
    if (dv == 0.0) return 0.0;
    const double denom = 1.0 - v * v;
    if (!(denom > 0.0)) throw NumericError("cfi: divergent Fisher information at |Delta_axis| = 1");
    return dv * dv / denom;
}

double qcrb(double fisher, double shots) {
    if (!(fisher >= 0.0)) throw DomainError("qcrb: Fisher information must be >= 0");
    if (!(shots >= 1.0)) throw DomainError("qcrb: shot count must be >= 1");
    if (fisher == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / std::sqrt(shots * fisher);
}

MarkovComparator markov_comparator(double epsilon, double T, double shots) {
    if (!(epsilon > 0.0)) throw DomainError("markov_comparator: requires epsilon > 0");
    if (!(T > 0.0)) throw DomainError("markov_comparator: requires T > 0");
    if (!(shots >= 1.0)) throw DomainError("markov_comparator: shot count must be >= 1");
    const double T4 = T * T * T * T;
    MarkovComparator m;
    m.fisher = epsilon * epsilon * std::exp(-epsilon / T) / (2.0 * T4);
    m.dT2_min = 2.0 * T4 * std::exp(epsilon / T) / (shots * epsilon * epsilon);
    return m;
}

void MetrologyResult::write_csv_header(std::ostream& os) {
    os << "t,T,alpha,qfi,cfi_x,cfi_z,qcrb,markov_fisher\n";
}

void MetrologyResult::write_csv_row(std::ostream& os) const {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", t, T,
                  alpha, qfi, cfi_x, cfi_z, qcrb, markov_fisher);
    os << buf;
}

MetrologyResult metrology_at(const TemperatureSensitivity& ts, std::size_t i) {
    if (i >= ts.grid.size()) throw DomainError("metrology_at: index outside the grid");
    const auto& d = ts.states[i];
    const auto& dd = ts.derivatives[i];
    MetrologyResult r;
    r.t = ts.grid[i];
    r.T = ts.config.T;
    r.alpha = ts.config.alpha;
    r.qfi = qfi(d, dd);
    r.cfi_x = cfi(Axis::X, d, dd);
    r.cfi_z = cfi(Axis::Z, d, dd);
    r.qcrb = qcrb(r.qfi);
    r.markov_fisher = ts.config.epsilon > 0.0 ? markov_comparator(ts.config.epsilon, ts.config.T).fisher
                                              : std::numeric_limits<double>::quiet_NaN();
    return r;
}

} // namespace ncthermo
