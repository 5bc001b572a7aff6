// main.cpp: ncthermo command-line driver

#include <chrono>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ncthermo/errors.hpp"
#include "run_config.hpp"
#include "runners.hpp"

using namespace ncthermo;
using namespace ncthermo::app;

namespace {

struct Overrides {
    std::string config_file;
    std::optional<std::string> out;
    std::optional<unsigned> workers;
    bool svg{false};
    std::optional<double> alpha, temp, epsilon, eta, omega_c, t_end, dt;
    std::vector<std::string> set;
};

void add_common(CLI::App* sub, Overrides& o) {
    sub->add_option("--config", o.config_file, "key = value configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--svg", o.svg, "also write SVG plots");
    sub->add_option("--alpha", o.alpha, "coupling-axis mixing angle alpha in [0, 1]");
    sub->add_option("--temp,-T", o.temp, "bath temperature");
    sub->add_option("--epsilon", o.epsilon, "qubit splitting");
    sub->add_option("--eta", o.eta, "coupling strength");
    sub->add_option("--omega-c", o.omega_c, "bath cutoff frequency");
    sub->add_option("--t-end", o.t_end, "final time");
    sub->add_option("--dt", o.dt, "time step");
    sub->add_option("--set", o.set, "extra key=value assignment (repeatable)");
}

RunConfig resolve(const Overrides& o) {
    RunConfig cfg;
    cfg.workers = default_workers();
    if (!o.config_file.empty()) load_config_file(cfg, o.config_file);
    for (const auto& kv : o.set) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
        set_option(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (o.out) cfg.out_dir = *o.out;
    if (o.workers) cfg.workers = *o.workers;
    if (o.svg) cfg.emit_svg = true;
    if (o.alpha) cfg.alpha = *o.alpha;
    if (o.temp) cfg.T = *o.temp;
    if (o.epsilon) cfg.epsilon = *o.epsilon;
    if (o.eta) cfg.eta = *o.eta;
    if (o.omega_c) cfg.omega_c = *o.omega_c;
    if (o.t_end) cfg.t_end = *o.t_end;
    if (o.dt) cfg.dt = *o.dt;
    return cfg;
}

void report(const std::vector<std::filesystem::path>& files) {
    for (const auto& f : files) std::cout << "wrote " << f.string() << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonequilibrium qubit thermometry: generalized Bloch dynamics, non-Markovianity witness "
                 "and temperature Fisher information."};
    app.require_subcommand(1);

    Overrides o;
    auto* traj = app.add_subcommand("trajectory", "integrate one trajectory and report the witness");
    auto* sa = app.add_subcommand("sweep-alpha", "witness and QFI over the alpha grid");
    auto* st = app.add_subcommand("sweep-temperature", "Fisher information over the temperature grid");
    auto* dk = app.add_subcommand("dump-kernels", "write the six memory kernels on the time grid");
    auto* rp = app.add_subcommand("reproduce", "run a figure preset");
    std::string figure;
    rp->add_option("figure", figure, "fig1, fig2 or fig3")
        ->required()
        ->check(CLI::IsMember({"fig1", "fig2", "fig3"}));
    for (auto* sub : {traj, sa, st, dk, rp}) add_common(sub, o);

    CLI11_PARSE(app, argc, argv);

    const auto start = std::chrono::steady_clock::now();
    try {
        RunConfig cfg = resolve(o);
        if (rp->parsed()) cfg = figure_config(figure, cfg);
        cfg.validate();
        KernelCache cache(cfg.quad, cfg.workers);

        if (traj->parsed()) {
            const auto run = run_trajectory(cfg, cache);
            report(write_trajectory(cfg, run));
            std::cout << "N_C=" << format_double(run.n_markov)
                      << " steady_dx_abs=" << format_double(run.steady_dx_abs)
                      << (run.steady_converged ? "" : " (unconverged)") << '\n';
        } else if (sa->parsed()) {
            if (!(cfg.T > 0.0)) cfg.times.clear();
            const auto sw = sweep_alpha(cfg, cache);
            report(write_alpha_sweep(cfg, sw));
            for (std::size_t k = 0; k < sw.times.size(); ++k)
                std::cout << "t=" << sw.times[k] << " argmax_alpha F_Q=" << sw.argmax_alpha(k) << '\n';
        } else if (st->parsed()) {
            const auto sw = sweep_temperature(cfg, cache);
            report(write_temperature_sweep(cfg, sw));
            for (const auto& s : sw.slopes)
                std::cout << "t=" << s.t << " slope=" << format_double(s.slope) << " (" << s.points
                          << " points)\n";
        } else if (dk->parsed()) {
            report(dump_kernels(cfg, cache));
        } else if (rp->parsed()) {
            report(reproduce(figure, cfg, cache, std::cout));
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cerr << "elapsed " << secs << " s\n";
    return 0;
}
