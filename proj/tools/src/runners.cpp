#include "runners.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>

#include "ncthermo/errors.hpp"
#include "ncthermo/witness.hpp"
#include "svg_plot.hpp"

namespace ncthermo::app {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string short_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::ofstream open_output(const RunConfig& cfg, const std::string& name, std::vector<std::filesystem::path>& out) {
    std::filesystem::create_directories(cfg.out_dir);
    const auto path = cfg.out_dir / name;
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path.string());
    out.push_back(path);
    return os;
}

void write_plot(const RunConfig& cfg, const Plot& plot, const std::string& name,
                std::vector<std::filesystem::path>& out) {
    std::filesystem::create_directories(cfg.out_dir);
    plot.write(cfg.out_dir / name);
    out.push_back(cfg.out_dir / name);
}

struct WitnessSummary {
    std::vector<double> coherence;
    double n_markov{};
    double steady{kNaN};
    double spread{kNaN};
    bool converged{false};
};

WitnessSummary summarise(const Trajectory& tr, const RunConfig& cfg) {
    WitnessSummary w;
    w.coherence = coherence(tr);
    w.n_markov = non_markovianity(w.coherence, cfg.rise_tol);
    try {
        const auto s = steady_coherence(tr, cfg.window_frac, cfg.conv_tol);
        w.steady = s.value;
        w.spread = s.spread;
        w.converged = s.converged;
    } catch (const DomainError&) {
        // window too short for a period average
    }
    return w;
}

std::vector<std::size_t> time_indices(const std::vector<double>& times, double dt) {
    std::vector<std::size_t> idx;
    for (double t : times) idx.push_back(grid_steps(t, dt));
    return idx;
}

} // namespace

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---- α sweep ---------------------------------------------------------------

AlphaSweep sweep_alpha(const RunConfig& cfg, KernelCache& cache) {
    cfg.validate();
    cfg.validate_times();
    AlphaSweep sw;
    sw.config = cfg;
    sw.times = cfg.times;
    const auto alphas = cfg.alpha_grid();
    sw.rows.resize(alphas.size());
    const bool fisher = !cfg.times.empty();
    if (fisher && !(cfg.T > 0.0)) throw ConfigError("sweep-alpha: Fisher information needs T > 0");

    const auto kp = cfg.probe().kernel_params();
    KernelCache::FamilyPtr family;
    KernelCache::SetPtr set;
    if (fisher)
        family = cache.family(kp, cfg.t_end, cfg.dt, cfg.stencil);
    else
        set = cache.get(kp, cfg.t_end, cfg.dt);
    const auto idx = time_indices(cfg.times, cfg.dt);

    parallel_for_index(alphas.size(), cfg.workers, [&](std::size_t i) {
        const auto pc = cfg.probe(alphas[i], cfg.T);
        AlphaRow& row = sw.rows[i];
        row.alpha = alphas[i];
        Trajectory tr;
        if (fisher) {
            const auto ts = temperature_sensitivity(pc, *family, cfg.stencil);
            for (std::size_t k : idx) row.metrology.push_back(metrology_at(ts, k));
            tr = Trajectory{ts.grid, ts.states, pc};
        } else {
            tr = integrate(pc, *set);
        }
        auto w = summarise(tr, cfg);
        row.n_markov = w.n_markov;
        row.steady_dx_abs = w.steady;
        row.steady_spread = w.spread;
        row.steady_converged = w.converged;
        row.coherence = std::move(w.coherence);
        row.dx.reserve(tr.size());
        for (const auto& s : tr.states) row.dx.push_back(s.dx);
        if (i == 0) sw.grid = tr.grid;
    });
    return sw;
}

void AlphaSweep::write_csv(std::ostream& os) const {
    os << "alpha,N_C,steady_dx_abs,converged";
    for (double t : times) os << ",qfi_t" << short_num(t);
    os << '\n';
    for (const auto& r : rows) {
        os << format_double(r.alpha) << ',' << format_double(r.n_markov) << ','
           << format_double(r.steady_dx_abs) << ',' << (r.steady_converged ? 1 : 0);
        for (const auto& m : r.metrology) os << ',' << format_double(m.qfi);
        os << '\n';
    }
}

void AlphaSweep::write_metrology_csv(std::ostream& os) const {
    MetrologyResult::write_csv_header(os);
    for (std::size_t k = 0; k < times.size(); ++k)
        for (const auto& r : rows) r.metrology[k].write_csv_row(os);
}

double AlphaSweep::argmax_alpha(std::size_t k) const {
    double best = -1.0, arg = kNaN;
    for (const auto& r : rows)
        if (r.metrology.at(k).qfi > best) {
            best = r.metrology[k].qfi;
            arg = r.alpha;
        }
    return arg;
}

// ---- temperature sweep -----------------------------------------------------

TemperatureSweep sweep_temperature(const RunConfig& cfg, KernelCache& cache) {
    cfg.validate();
    cfg.validate_times();
    if (cfg.times.empty()) throw ConfigError("sweep-temperature: no probing times given");
    TemperatureSweep sw;
    sw.config = cfg;
    sw.temps = cfg.temperature_grid();
    sw.times = cfg.times;
    const std::size_t nT = sw.temps.size();
    sw.rows.resize(nT * sw.times.size());

    // only integrate as far as the last probing time
    RunConfig run = cfg;
    run.t_end = sw.times.back();
    const auto idx = time_indices(sw.times, cfg.dt);
    const unsigned outer = std::max(1u, std::min<unsigned>(cfg.workers, static_cast<unsigned>(nT)));
    const unsigned inner = std::max(1u, cfg.workers / outer);

    parallel_for_index(nT, outer, [&](std::size_t j) {
        const auto pc = run.probe(cfg.alpha, sw.temps[j]);
        const auto family = cache.family(pc.kernel_params(), run.t_end, cfg.dt, cfg.stencil, inner);
        const auto ts = temperature_sensitivity(pc, *family, cfg.stencil);
        for (std::size_t k = 0; k < idx.size(); ++k) sw.rows[k * nT + j] = metrology_at(ts, idx[k]);
    });
    for (std::size_t k = 0; k < sw.times.size(); ++k) sw.slopes.push_back(fit_low_temperature_slope(sw, k));
    return sw;
}

SlopeFit fit_low_temperature_slope(const TemperatureSweep& sw, std::size_t k) {
    SlopeFit f;
    f.t = sw.times.at(k);
    const double lo = sw.config.fit_temp_min * (1 - 1e-12), hi = sw.config.fit_temp_max * (1 + 1e-12);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t j = 0; j < sw.temps.size(); ++j) {
        const double T = sw.temps[j], F = sw.at(k, j).qfi;
        if (T < lo || T > hi || !(F > 0.0)) continue;
        const double x = std::log(T), y = std::log(F);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++f.points;
    }
    if (f.points < 2) {
        f.slope = f.intercept = kNaN;
        return f;
    }
    const double n = static_cast<double>(f.points);
    f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / n;
    return f;
}

void TemperatureSweep::write_csv(std::ostream& os) const {
    MetrologyResult::write_csv_header(os);
    for (const auto& r : rows) r.write_csv_row(os);
    for (const auto& s : slopes)
        os << "# slope_qfi t=" << short_num(s.t) << " T=[" << short_num(config.fit_temp_min) << ','
           << short_num(config.fit_temp_max) << "] points=" << s.points << " slope=" << format_double(s.slope)
           << '\n';
}

// ---- single trajectory and kernels -----------------------------------------

TrajectoryRun run_trajectory(const RunConfig& cfg, KernelCache& cache) {
    cfg.validate();
    const auto pc = cfg.probe();
    const auto ks = cache.get(pc.kernel_params(), cfg.t_end, cfg.dt);
    TrajectoryRun r;
    r.trajectory = integrate(pc, *ks);
    const auto w = summarise(r.trajectory, cfg);
    r.n_markov = w.n_markov;
    r.steady_dx_abs = w.steady;
    r.steady_converged = w.converged;
    return r;
}

std::vector<std::filesystem::path> write_trajectory(const RunConfig& cfg, const TrajectoryRun& run) {
    std::vector<std::filesystem::path> out;
    {
        auto os = open_output(cfg, "trajectory.csv", out);
        run.trajectory.write_csv(os);
    }
    if (cfg.emit_svg) {
        const auto& tr = run.trajectory;
        std::vector<double> x, y, z, c;
        for (const auto& s : tr.states) {
            x.push_back(s.dx);
            y.push_back(s.dy);
            z.push_back(s.dz);
            c.push_back(std::hypot(s.dx, s.dy));
        }
        Plot p{"Bloch components, alpha = " + short_num(cfg.alpha) + ", T = " + short_num(cfg.T), "t",
               "component"};
        p.add("dx", tr.grid, x);
        p.add("dy", tr.grid, y);
        p.add("dz", tr.grid, z);
        p.add("|C|", tr.grid, c, Stroke::Dashed);
        write_plot(cfg, p, "trajectory.svg", out);
    }
    return out;
}

std::vector<std::filesystem::path> dump_kernels(const RunConfig& cfg, KernelCache& cache) {
    cfg.validate();
    const auto ks = cache.get(cfg.probe().kernel_params(), cfg.t_end, cfg.dt);
    std::vector<std::filesystem::path> out;
    {
        auto os = open_output(cfg, "kernels.csv", out);
        ks->write_csv(os);
    }
    if (cfg.emit_svg) {
        Plot p{"Memory kernels, T = " + short_num(cfg.T), "t", "kernel"};
        for (KernelId id : kAllKernels) {
            std::vector<double> v;
            for (std::size_t i = 0; i < ks->size(); ++i) v.push_back(ks->at(i)[id]);
            p.add(std::string(kernel_name(id)), ks->grid, v);
        }
        write_plot(cfg, p, "kernels.svg", out);
    }
    return out;
}

std::vector<std::filesystem::path> write_alpha_sweep(const RunConfig& cfg, const AlphaSweep& sw,
                                                     const std::string& stem) {
    std::vector<std::filesystem::path> out;
    {
        auto os = open_output(cfg, stem + ".csv", out);
        sw.write_csv(os);
    }
    if (!sw.times.empty()) {
        auto os = open_output(cfg, stem + "_metrology.csv", out);
        sw.write_metrology_csv(os);
    }
    if (cfg.emit_svg) {
        std::vector<double> a, n, s;
        for (const auto& r : sw.rows) {
            a.push_back(r.alpha);
            n.push_back(r.n_markov);
            s.push_back(r.steady_dx_abs);
        }
        Plot p{"Witness against alpha", "alpha", "value"};
        p.add("N_C", a, n).markers = true;
        p.add("steady |dx|", a, s, Stroke::Dashed).markers = true;
        write_plot(cfg, p, stem + "_witness.svg", out);
        if (!sw.times.empty()) {
            Plot q{"QFI against alpha", "alpha", "F_Q"};
            q.log_y = true;
            for (std::size_t k = 0; k < sw.times.size(); ++k) {
                std::vector<double> f;
                for (const auto& r : sw.rows) f.push_back(r.metrology[k].qfi);
                q.add("t = " + short_num(sw.times[k]), a, f).markers = true;
            }
            write_plot(cfg, q, stem + "_qfi.svg", out);
        }
    }
    return out;
}

std::vector<std::filesystem::path> write_temperature_sweep(const RunConfig& cfg, const TemperatureSweep& sw,
                                                           const std::string& stem) {
    std::vector<std::filesystem::path> out;
    {
        auto os = open_output(cfg, stem + ".csv", out);
        sw.write_csv(os);
    }
    if (cfg.emit_svg) {
        Plot p{"QFI against temperature, alpha = " + short_num(cfg.alpha), "T", "F_Q"};
        p.log_x = p.log_y = true;
        for (std::size_t k = 0; k < sw.times.size(); ++k) {
            std::vector<double> f;
            for (std::size_t j = 0; j < sw.temps.size(); ++j) f.push_back(sw.at(k, j).qfi);
            p.add("t = " + short_num(sw.times[k]), sw.temps, f).markers = true;
        }
        std::vector<double> bm;
        for (std::size_t j = 0; j < sw.temps.size(); ++j) bm.push_back(sw.at(0, j).markov_fisher);
        p.add("Markov", sw.temps, bm, Stroke::Dashed);
        // T² guide through the lowest-temperature point of the earliest time
        const double f0 = sw.at(0, 0).qfi, T0 = sw.temps.front();
        std::vector<double> guide;
        for (double T : sw.temps) guide.push_back(f0 * (T / T0) * (T / T0));
        p.add("T^2", sw.temps, guide, Stroke::Dotted);
        write_plot(cfg, p, stem + "_qfi.svg", out);

        Plot c{"Fisher information at t = " + short_num(sw.times.front()), "T", "F"};
        c.log_x = c.log_y = true;
        std::vector<double> q, x, z;
        for (std::size_t j = 0; j < sw.temps.size(); ++j) {
            q.push_back(sw.at(0, j).qfi);
            x.push_back(sw.at(0, j).cfi_x);
            z.push_back(sw.at(0, j).cfi_z);
        }
        c.add("F_Q", sw.temps, q);
        c.add("F_x", sw.temps, x);
        c.add("F_z", sw.temps, z, Stroke::Dashed);
        write_plot(cfg, c, stem + "_cfi.svg", out);
    }
    return out;
}

// ---- figure presets --------------------------------------------------------

RunConfig figure_config(const std::string& figure, RunConfig cfg) {
    if (figure == "fig1") {
        cfg.t_end = 200.0;
        cfg.times.clear();
        cfg.alpha_min = 0.0;
        cfg.alpha_max = 1.0;
        cfg.alpha_count = 21;
    } else if (figure == "fig2") {
        cfg.t_end = 200.0;
        cfg.times = {1.0, 5.0, 20.0, 50.0, 100.0, 200.0};
        cfg.alpha_min = 0.0;
        cfg.alpha_max = 1.0;
        cfg.alpha_count = 21;
    } else if (figure == "fig3") {
        cfg.alpha = 0.5;
        cfg.t_end = 20.0;
        cfg.times = {1.0, 5.0, 20.0};
        cfg.temp_min = 0.01;
        cfg.temp_max = 0.5;
        cfg.temp_count = 15;
        cfg.temp_log = true;
    } else {
        throw ConfigError("unknown figure '" + figure + "' (expected fig1, fig2 or fig3)");
    }
    return cfg;
}

std::vector<std::filesystem::path> reproduce(const std::string& figure, const RunConfig& base,
                                             KernelCache& cache, std::ostream& log) {
    const RunConfig cfg = figure_config(figure, base);
    std::vector<std::filesystem::path> out;

    if (figure == "fig1" || figure == "fig2") {
        const auto sw = sweep_alpha(cfg, cache);
        out = write_alpha_sweep(cfg, sw, figure);
        for (const auto& r : sw.rows)
            log << "alpha=" << short_num(r.alpha) << " N_C=" << format_double(r.n_markov)
                << " steady_dx_abs=" << format_double(r.steady_dx_abs) << (r.steady_converged ? "" : " (unconverged)")
                << '\n';
        for (std::size_t k = 0; k < sw.times.size(); ++k)
            log << "t=" << short_num(sw.times[k]) << " argmax_alpha F_Q=" << short_num(sw.argmax_alpha(k)) << '\n';

        if (figure == "fig1") {
            // coherence and dx traces for a few α, thinned to about 2000 rows
            const std::vector<double> picks{0.0, 0.25, 0.5, 0.75, 1.0};
            std::vector<const AlphaRow*> rows;
            for (double a : picks)
                for (const auto& r : sw.rows)
                    if (std::abs(r.alpha - a) < 1e-12) rows.push_back(&r);
            const std::size_t stride = std::max<std::size_t>(1, sw.grid.size() / 2000);
            {
                auto os = open_output(cfg, "fig1_traces.csv", out);
                os << 't';
                for (const auto* r : rows) os << ",C_a" << short_num(r->alpha) << ",dx_a" << short_num(r->alpha);
                os << '\n';
                for (std::size_t i = 0; i < sw.grid.size(); i += stride) {
                    os << format_double(sw.grid[i]);
                    for (const auto* r : rows) os << ',' << format_double(r->coherence[i]) << ',' << format_double(r->dx[i]);
                    os << '\n';
                }
            }
            if (cfg.emit_svg) {
                Plot p{"Coherence, T = " + short_num(cfg.T), "t", "|C(t)|"};
                Plot q{"dx, T = " + short_num(cfg.T), "t", "dx"};
                for (const auto* r : rows) {
                    std::vector<double> t, c, x;
                    for (std::size_t i = 0; i < sw.grid.size(); i += stride) {
                        t.push_back(sw.grid[i]);
                        c.push_back(r->coherence[i]);
                        x.push_back(r->dx[i]);
                    }
                    p.add("alpha = " + short_num(r->alpha), t, c);
                    q.add("alpha = " + short_num(r->alpha), t, x);
                }
                write_plot(cfg, p, "fig1_coherence.svg", out);
                write_plot(cfg, q, "fig1_dx.svg", out);
            }
        }
        return out;
    }

    const auto sw = sweep_temperature(cfg, cache);
    out = write_temperature_sweep(cfg, sw, figure);
    for (const auto& s : sw.slopes)
        log << "t=" << short_num(s.t) << " slope d ln F_Q / d ln T over [" << short_num(cfg.fit_temp_min) << ','
            << short_num(cfg.fit_temp_max) << "] = " << format_double(s.slope) << '\n';
    return out;
}

} // namespace ncthermo::app
