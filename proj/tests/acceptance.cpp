// acceptance.cpp: end-to-end acceptance checks
//
// Prints one PASS/FAIL line per criterion with the measured quantities and
// wall time, and exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ncthermo/dynamics.hpp"
#include "ncthermo/kernels.hpp"
#include "ncthermo/metrology.hpp"
#include "ncthermo/witness.hpp"
#include "runners.hpp"

using namespace ncthermo;
using namespace ncthermo::app;

namespace {

struct Outcome {
    bool pass{};
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

int failures = 0;

// Fisher rows gathered by the figure checks and reused by the hierarchy check.
std::vector<MetrologyResult> evaluated;

void criterion(int id, const std::string& name, double limit_s, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (limit_s > 0 && secs > limit_s) {
        o.pass = false;
        o.detail += fmt("; over time budget %.0f s", limit_s);
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << id << "] " << name << ": " << o.detail
              << fmt(" (%.1f s", secs) << (limit_s > 0 ? fmt(", budget %.0f s)", limit_s) : std::string(")"))
              << std::endl;
}

ProbeConfig probe(double alpha, double T, double eta, double t_end, double dt) {
    ProbeConfig c;
    c.alpha = alpha;
    c.T = T;
    c.sd = SpectralDensity::ohmic(eta, 1.0);
    c.epsilon = 0.5;
    c.t_end = t_end;
    c.dt = dt;
    return c;
}

Trajectory run(const ProbeConfig& c) {
    return integrate(c, precompute(c.kernel_params(), c.t_end, c.dt));
}

RunConfig base_config() {
    RunConfig cfg;
    cfg.workers = 1;
    return cfg;
}

// ---------------------------------------------------------------------------

Outcome dephasing_zero_temperature() {
    const auto c = probe(0.0, 0.0, 0.05, 50.0, 1e-3);
    const auto tr = run(c);
    double worst = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i) {
        const double t = tr.grid[i];
        const double exact = std::pow(1.0 + t * t, -2.0 * 0.05);
        worst = std::max(worst, std::abs(std::hypot(tr.states[i].dx, tr.states[i].dy) - exact));
    }
    return {worst <= 1e-6, fmt("max |C - (1+t^2)^(-2 eta)| = %.3e over %zu points (limit 1e-6)", worst, tr.size())};
}

Outcome dephasing_finite_temperature() {
    const auto c = probe(0.0, 0.2, 0.05, 50.0, 1e-3);
    const auto tr = run(c);
    // the frequency-space quadrature is costly, so compare every 0.1 time units
    const std::size_t stride = 100;
    std::vector<double> times;
    for (std::size_t i = 0; i < tr.size(); i += stride) times.push_back(tr.grid[i]);
    const auto exact = dephasing_solution(c, times);
    double worst = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const auto& s = tr.states[k * stride];
        worst = std::max(worst, std::abs(std::hypot(s.dx, s.dy) - std::hypot(exact[k].dx, exact[k].dy)));
    }
    return {worst <= 1e-5, fmt("max |C - exp(-Gamma)| = %.3e over %zu points (limit 1e-5)", worst, times.size())};
}

Outcome markov_fixed_point() {
    const double target = -std::tanh(0.5 / (2 * 0.2));
    bool ok = true;
    std::string detail;
    for (double eta : {0.01, 0.05}) {
        const auto tr = run(probe(1.0, 0.2, eta, 200.0, 1e-2));
        const double dev = std::abs(tr.states.back().dz - target);
        ok = ok && dev <= 5 * eta;
        detail += fmt("%seta=%.2f: |dz(200) + tanh| = %.3e (limit %.2f)", detail.empty() ? "" : "; ", eta, dev,
                      5 * eta);
    }
    return {ok, detail};
}

Outcome kernel_checks() {
    KernelParams p;
    p.sd = SpectralDensity::ohmic(0.05, 1.0);
    p.epsilon = 0.5;
    double zero = 0.0;
    for (double T : {0.0, 0.2}) {
        p.T = T;
        const auto k = evaluate_kernels(p, 0.0);
        for (KernelId id : kAllKernels) zero = std::max(zero, std::abs(k[id]));
    }
    p.T = 0.0;
    double rel = 0.0;
    for (double t : {0.1, 1.0, 10.0}) {
        const double exact = 0.05 * t / (t * t + 1.0);
        rel = std::max(rel, std::abs(kernel_R(p, t) - exact) / exact);
    }
    p.T = 0.2;
    const double dL = std::abs(kernel_L(p, 1000.0) - 0.05);
    const bool ok = zero < 1e-12 && rel <= 1e-8 && dL <= 1e-4;
    return {ok, fmt("max |k(0)| = %.1e (limit 1e-12); R(T=0) rel err = %.2e (limit 1e-8); "
                    "|L(1000) - eta w_c| = %.2e (limit 1e-4)",
                    zero, rel, dL)};
}

Outcome figure1(KernelCache& cache) {
    auto cfg = figure_config("fig1", base_config());
    const auto sw = sweep_alpha(cfg, cache);
    const auto& rows = sw.rows;
    const auto& first = rows.front();
    const auto& last = rows.back();
    const bool ends = first.n_markov <= 1e-2 && last.n_markov <= 1e-2 && std::abs(first.steady_dx_abs) <= 1e-2 &&
                      std::abs(last.steady_dx_abs) <= 1e-2;
    bool positive = true;
    std::size_t arg_n = 0, arg_s = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0 && i + 1 < rows.size()) positive = positive && rows[i].n_markov > 0 && rows[i].steady_dx_abs > 0;
        if (rows[i].n_markov > rows[arg_n].n_markov) arg_n = i;
        if (rows[i].steady_dx_abs > rows[arg_s].steady_dx_abs) arg_s = i;
    }
    const bool interior = arg_n > 0 && arg_n + 1 < rows.size() && arg_s > 0 && arg_s + 1 < rows.size();
    return {ends && positive && interior,
            fmt("N_C(0,1) = %.2e, %.2e; steady(0,1) = %.2e, %.2e (limit 1e-2); interior positive: %s; "
                "argmax N_C = %.2f (%.4f), argmax steady = %.2f (%.4f)",
                first.n_markov, last.n_markov, first.steady_dx_abs, last.steady_dx_abs, positive ? "yes" : "no",
                rows[arg_n].alpha, rows[arg_n].n_markov, rows[arg_s].alpha, rows[arg_s].steady_dx_abs)};
}

Outcome figure2(KernelCache& cache) {
    auto cfg = figure_config("fig2", base_config());
    const auto sw = sweep_alpha(cfg, cache);
    for (const auto& r : sw.rows) evaluated.insert(evaluated.end(), r.metrology.begin(), r.metrology.end());
    auto index = [&](double t) {
        return static_cast<std::size_t>(std::find(sw.times.begin(), sw.times.end(), t) - sw.times.begin());
    };
    const std::size_t k1 = index(1.0), k50 = index(50.0);
    const double a50 = sw.argmax_alpha(k50);
    const bool inside = a50 > 0.0 && a50 < 1.0;
    const double f0 = sw.rows.front().metrology[k1].qfi, f1 = sw.rows.back().metrology[k1].qfi;
    std::string trail;
    for (std::size_t k = 0; k < sw.times.size(); ++k)
        trail += fmt("%s%g:%.2f", k ? " " : "", sw.times[k], sw.argmax_alpha(k));
    return {inside && f0 > f1, fmt("argmax_alpha F_Q(t=50) = %.2f (need in (0,1)); F_Q(t=1): alpha=0 %.4e vs alpha=1 "
                                   "%.4e; argmax by time [%s]",
                                   a50, f0, f1, trail.c_str())};
}

Outcome figure3(KernelCache& cache) {
    auto cfg = figure_config("fig3", base_config());
    // fit window sampled on its own log grid so both ends are exact
    cfg.temp_min = 0.01;
    cfg.temp_max = 0.05;
    cfg.temp_count = 9;
    cfg.times = {1.0};
    cfg.t_end = 1.0;
    const auto sw = sweep_temperature(cfg, cache);
    evaluated.insert(evaluated.end(), sw.rows.begin(), sw.rows.end());
    const auto& s = sw.slopes.front();
    const auto& lo = sw.rows.front();
    const auto& hi = sw.rows.back();
    const double growth = (lo.qfi / lo.markov_fisher) / (hi.qfi / hi.markov_fisher);
    // The comparator is a steady-state bound, so at an early time it can exceed
    // F_Q near the warm end of the window. Require F_BM < F_Q at the cold end
    // and report where the two cross.
    double crossover = 0.0;
    for (const auto& r : sw.rows)
        if (r.markov_fisher < r.qfi) crossover = r.T;
    const bool ok = std::abs(s.slope - 2.0) <= 0.3 && growth >= 10.0 && lo.markov_fisher < lo.qfi;
    return {ok, fmt("t=1 slope d ln F_Q/d ln T over [0.01,0.05] = %.4f (%zu points, need 2 +- 0.3); "
                    "F_Q/F_BM = %.3e at T=0.05, %.3e at T=0.01, growth %.3e (need >= 10); "
                    "F_BM < F_Q for T <= %.4f on this grid",
                    s.slope, s.points, hi.qfi / hi.markov_fisher, lo.qfi / lo.markov_fisher, growth, crossover)};
}

Outcome hierarchy(KernelCache& cache) {
    // full fig3 preset adds the wider temperature range and later times
    const auto cfg = figure_config("fig3", base_config());
    const auto sw = sweep_temperature(cfg, cache);
    evaluated.insert(evaluated.end(), sw.rows.begin(), sw.rows.end());
    // and every grid point of the default scenario
    const auto dense = temperature_sensitivity(probe(0.5, 0.2, 0.05, 50.0, 1e-2));
    for (std::size_t i = 0; i < dense.grid.size(); ++i) evaluated.push_back(metrology_at(dense, i));

    std::size_t violations = 0;
    double worst = 0.0;
    for (const auto& r : evaluated) {
        const double slack = 1e-8 * r.qfi;
        worst = std::max({worst, r.cfi_x - r.qfi, r.cfi_z - r.qfi});
        if (r.cfi_x > r.qfi + slack || r.cfi_z > r.qfi + slack) ++violations;
    }
    // earliest probing time, T <= 0.05
    std::size_t early = 0, early_ok = 0;
    for (std::size_t j = 0; j < sw.temps.size(); ++j) {
        if (sw.temps[j] > 0.05 * (1 + 1e-12)) continue;
        ++early;
        if (sw.at(0, j).cfi_x >= sw.at(0, j).cfi_z) ++early_ok;
    }
    return {violations == 0 && early > 0 && early_ok == early,
            fmt("%zu points, %zu violations of F_C <= F_Q (max excess %.2e); F_x >= F_z at t=%g, T<=0.05: %zu/%zu",
                evaluated.size(), violations, worst, sw.times.front(), early_ok, early)};
}

Outcome hygiene() {
    auto quartic = [](double T) { return 3.0 * T * T * T * T - T * T * T + 2.0 * T - 1.0; };
    double stencil_err = 0.0;
    for (double x : {0.01, 0.2, 1.0})
        for (double h : {1e-3, 1e-2}) {
            const double exact = 12.0 * x * x * x - 3.0 * x * x + 2.0;
            stencil_err = std::max(stencil_err, std::abs(five_point_derivative(quartic, x, h) - exact));
        }

    // step halving on the default scenario
    ProbeConfig c;
    BlochState s[3];
    for (int k = 0; k < 3; ++k) {
        c.dt = 0.1 / (1 << k);
        s[k] = run(c).states.back();
    }
    auto diff = [](const BlochState& a, const BlochState& b) {
        return std::max({std::abs(a.dx - b.dx), std::abs(a.dy - b.dy), std::abs(a.dz - b.dz)});
    };
    const double order = std::log2(diff(s[0], s[1]) / diff(s[1], s[2]));

    // CSV outputs with 1 and 8 workers
    auto outputs = [](unsigned workers) {
        RunConfig cfg;
        cfg.workers = workers;
        cfg.t_end = 10.0;
        cfg.alpha_count = 9;
        cfg.times = {2.0, 10.0};
        cfg.temp_min = 0.02;
        cfg.temp_max = 0.4;
        cfg.temp_count = 6;
        KernelCache cache(cfg.quad, workers);
        std::ostringstream os;
        sweep_alpha(cfg, cache).write_csv(os);
        sweep_temperature(cfg, cache).write_csv(os);
        precompute(cfg.probe().kernel_params(), cfg.t_end, cfg.dt, cfg.quad, workers).write_csv(os);
        return os.str();
    };
    const std::string one = outputs(1), eight = outputs(8);
    const bool same = one == eight;
    return {stencil_err <= 1e-10 && order >= 3.5 && order <= 4.5 && same,
            fmt("quartic stencil error %.2e (limit 1e-10); RK4 order %.3f (need 4 +- 0.5); "
                "CSV bytes workers 1 vs 8: %zu vs %zu, %s",
                stencil_err, order, one.size(), eight.size(), same ? "identical" : "DIFFERENT")};
}

} // namespace

int main() {
    KernelCache cache;
    criterion(1, "zero-temperature dephasing oracle", 30, dephasing_zero_temperature);
    criterion(2, "finite-temperature dephasing oracle", 60, dephasing_finite_temperature);
    criterion(3, "Markov fixed point", 0, markov_fixed_point);
    criterion(4, "kernel zero-time and closed forms", 0, kernel_checks);
    criterion(5, "witness over alpha", 300, [&] { return figure1(cache); });
    criterion(6, "QFI over alpha", 600, [&] { return figure2(cache); });
    criterion(7, "low-temperature QFI scaling", 600, [&] { return figure3(cache); });
    criterion(8, "measurement hierarchy", 0, [&] { return hierarchy(cache); });
    criterion(9, "numerical hygiene", 0, hygiene);
    std::cout << (failures ? fmt("%d of 9 criteria failed", failures) : std::string("all 9 criteria passed"))
              << std::endl;
    return failures ? 1 : 0;
}
