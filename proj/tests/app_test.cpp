#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "kernel_cache.hpp"
#include "ncthermo/errors.hpp"
#include "run_config.hpp"
#include "runners.hpp"
#include "svg_plot.hpp"

using namespace ncthermo;
using namespace ncthermo::app;

TEST_CASE("config file overlays defaults") {
    RunConfig cfg;
    std::istringstream in(
        "# comment\n"
        "epsilon = 0.7\n"
        "T=0.1   # trailing comment\n"
        "times = 1, 2.5 ,10\n"
        "temp_log = false\n"
        "rel_tol = 1e-8\n"
        "\n");
    load_config(cfg, in);
    CHECK(cfg.epsilon == 0.7);
    CHECK(cfg.T == 0.1);
    CHECK(cfg.times == std::vector<double>{1.0, 2.5, 10.0});
    CHECK_FALSE(cfg.temp_log);
    CHECK(cfg.quad.rel_tol == 1e-8);
    CHECK(cfg.eta == 0.05);
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("config errors name the line") {
    RunConfig cfg;
    std::istringstream unknown("eta = 0.1\nbogus = 3\n");
    try {
        load_config(cfg, unknown, "run.cfg");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("run.cfg:2") != std::string::npos);
    }
    std::istringstream bad_number("dt = 0.01x\n");
    CHECK_THROWS_AS(load_config(cfg, bad_number), ConfigError);
    std::istringstream no_eq("dt 0.01\n");
    CHECK_THROWS_AS(load_config(cfg, no_eq), ConfigError);
    CHECK_THROWS_AS(set_option(cfg, "alpha_count", "2.5"), ConfigError);
    CHECK_THROWS_AS(load_config_file(cfg, "/nonexistent/ncthermo.cfg"), ConfigError);
}

TEST_CASE("config validation") {
    auto invalid = [](auto mutate) {
        RunConfig cfg;
        mutate(cfg);
        return [cfg] {
            cfg.validate();
            cfg.validate_times();
        };
    };
    CHECK_THROWS_AS(invalid([](RunConfig& c) { c.alpha_max = 1.5; })(), ConfigError);
    CHECK_THROWS_AS(invalid([](RunConfig& c) { c.alpha_min = c.alpha_max = 0.5; })(), ConfigError);
    CHECK_THROWS_AS(invalid([](RunConfig& c) { c.temp_min = 0.0; })(), ConfigError);
    CHECK_THROWS_AS(invalid([](RunConfig& c) { c.times = {5.0, 1.0}; })(), ConfigError);
    CHECK_THROWS_AS(invalid([](RunConfig& c) { c.times = {60.0}; })(), ConfigError);
    CHECK_THROWS_AS(invalid([](RunConfig& c) { c.times = {1.005}; })(), ConfigError);
    CHECK_THROWS_AS(invalid([](RunConfig& c) { c.dt = 0.03; })(), ConfigError);
    CHECK_THROWS_AS(invalid([](RunConfig& c) { c.eta = -0.1; })(), ConfigError);
    CHECK_THROWS_AS(invalid([](RunConfig& c) { c.stencil.delta_rel = 0.1; })(), ConfigError);
    CHECK_THROWS_AS(invalid([](RunConfig& c) { c.workers = 0; })(), ConfigError);
    // a single-point sweep may collapse its range
    CHECK_NOTHROW(invalid([](RunConfig& c) {
        c.alpha_min = c.alpha_max = 0.5;
        c.alpha_count = 1;
    })());
}

TEST_CASE("sweep grids hit both ends exactly") {
    RunConfig cfg;
    const auto a = cfg.alpha_grid();
    REQUIRE(a.size() == 21);
    CHECK(a.front() == 0.0);
    CHECK(a[10] == 0.5);
    CHECK(a.back() == 1.0);
    const auto T = cfg.temperature_grid();
    REQUIRE(T.size() == 15);
    CHECK(T.front() == 0.01);
    CHECK(T.back() == 0.5);
    CHECK(T[7] == doctest::Approx(std::sqrt(0.01 * 0.5)));
    cfg.temp_log = false;
    CHECK(cfg.temperature_grid()[7] == doctest::Approx(0.255));
}

TEST_CASE("kernel cache computes each key once") {
    KernelCache cache;
    KernelParams p;
    const auto a = cache.get(p, 1.0, 0.1);
    const auto b = cache.get(p, 1.0, 0.1);
    CHECK(a.get() == b.get());
    CHECK(cache.computed() == 1);
    p.T = 0.3;
    CHECK(cache.get(p, 1.0, 0.1).get() != a.get());
    CHECK(cache.computed() == 2);
    // failures propagate and stay cached
    p.T = -1.0;
    CHECK_THROWS_AS(cache.get(p, 1.0, 0.1), DomainError);
    CHECK_THROWS_AS(cache.get(p, 1.0, 0.1), DomainError);
    CHECK(cache.computed() == 3);
}

TEST_CASE("parallel_for_index covers every index and rethrows") {
    std::vector<int> hits(100, 0);
    parallel_for_index(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
    CHECK(std::count(hits.begin(), hits.end(), 1) == 100);
    CHECK_THROWS_AS(parallel_for_index(10, 3,
                                       [](std::size_t i) {
                                           if (i == 7) throw NumericError("boom", 0.0);
                                       }),
                    NumericError);
}

TEST_CASE("alpha sweep rows and CSV layout") {
    RunConfig cfg;
    cfg.t_end = 4.0;
    cfg.dt = 0.05;
    cfg.alpha_count = 3;
    cfg.times = {1.0, 4.0};
    KernelCache cache;
    const auto sw = sweep_alpha(cfg, cache);
    REQUIRE(sw.rows.size() == 3);
    CHECK(sw.rows[0].n_markov == 0.0);
    // window shorter than two precession periods
    CHECK(std::isnan(sw.rows[1].steady_dx_abs));
    for (const auto& r : sw.rows) {
        REQUIRE(r.metrology.size() == 2);
        CHECK(r.metrology[1].t == 4.0);
        CHECK(r.metrology[0].qfi > 0.0);
    }
    std::ostringstream os;
    sw.write_csv(os);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "alpha,N_C,steady_dx_abs,converged,qfi_t1,qfi_t4");
    std::getline(is, line);
    CHECK(line.rfind("0,0,", 0) == 0);

    cfg.T = 0.0;
    CHECK_THROWS_AS(sweep_alpha(cfg, cache), ConfigError);
    cfg.times.clear();
    CHECK_NOTHROW(sweep_alpha(cfg, cache));
}

TEST_CASE("temperature sweep fits a slope and writes a footer") {
    RunConfig cfg;
    cfg.dt = 0.05;
    cfg.times = {1.0};
    cfg.temp_min = 0.01;
    cfg.temp_max = 0.05;
    cfg.temp_count = 3;
    KernelCache cache;
    const auto sw = sweep_temperature(cfg, cache);
    REQUIRE(sw.rows.size() == 3);
    REQUIRE(sw.slopes.size() == 1);
    CHECK(sw.slopes[0].points == 3);
    // ln F is linear in ln T between the stored points to fit accuracy
    const double s = (std::log(sw.rows[2].qfi) - std::log(sw.rows[0].qfi)) / std::log(5.0);
    CHECK(sw.slopes[0].slope == doctest::Approx(s).epsilon(0.05));
    std::ostringstream os;
    sw.write_csv(os);
    CHECK(os.str().find("# slope_qfi t=1 T=[0.01,0.05] points=3 slope=") != std::string::npos);

    cfg.times.clear();
    CHECK_THROWS_AS(sweep_temperature(cfg, cache), ConfigError);
}

TEST_CASE("figure presets") {
    RunConfig cfg;
    cfg.eta = 0.02;
    const auto f2 = figure_config("fig2", cfg);
    CHECK(f2.t_end == 200.0);
    CHECK(f2.times.front() == 1.0);
    CHECK(f2.eta == 0.02);
    CHECK(figure_config("fig1", cfg).times.empty());
    CHECK(figure_config("fig3", cfg).alpha == 0.5);
    CHECK_THROWS_AS(figure_config("fig4", cfg), ConfigError);
}

TEST_CASE("svg plot skips unusable points") {
    Plot p("t <&> x", "x", "y");
    p.log_y = true;
    p.add("a", {1, 2, 3, 4}, {1, -1, NAN, 10});
    CHECK_THROWS_AS(p.add("bad", {1, 2}, {1}), ConfigError);
    const auto svg = p.render();
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("t &lt;&amp;&gt; x") != std::string::npos);
    // the negative and NaN samples split the line into two single-point pieces
    std::size_t lines = 0;
    for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) ++lines;
    CHECK(lines == 2);
    CHECK(svg.find("nan") == std::string::npos);
}

TEST_CASE("trajectory writer") {
    const auto dir = std::filesystem::temp_directory_path() / "ncthermo_app_test";
    std::filesystem::remove_all(dir);
    RunConfig cfg;
    cfg.t_end = 1.0;
    cfg.dt = 0.1;
    cfg.out_dir = dir;
    cfg.emit_svg = true;
    KernelCache cache;
    const auto files = write_trajectory(cfg, run_trajectory(cfg, cache));
    REQUIRE(files.size() == 2);
    std::ifstream in(files[0]);
    std::string header, first;
    std::getline(in, header);
    std::getline(in, first);
    CHECK(header == "t,dx,dy,dz");
    CHECK(first == "0,1,0,0");
    CHECK(std::filesystem::file_size(files[1]) > 0);
    std::filesystem::remove_all(dir);
}
