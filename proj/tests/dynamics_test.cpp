#include "doctest.h"

#include <cmath>
#include <sstream>
#include <string>

#include "ncthermo/dynamics.hpp"
#include "ncthermo/errors.hpp"

using namespace ncthermo;

namespace {

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

} // namespace

TEST_CASE("rhs reproduces the hand-evaluated coefficients") {
    const KernelValues k{0.3, 0.7, 0.11, 0.13, 0.17, 0.19};

    SUBCASE("pure dephasing never moves the populations") {
        for (const BlochState s : {BlochState{1, 0, 0}, BlochState{0.3, -0.4, 0.5}})
            CHECK(rhs(s, k, 0.5, 0.0).dz == 0.0);
    }
    SUBCASE("closed system precesses") {
        const auto d = rhs({1, 0, 0}, KernelValues{}, 0.5, 0.37);
        CHECK(d.dx == 0.0);
        CHECK(d.dy == 0.5);
        CHECK(d.dz == 0.0);
    }
    SUBCASE("alpha = 1/2 on the pole") {
        const auto d = rhs({0, 0, 1}, k, 0.5, 0.5);
        CHECK(d.dx == doctest::Approx(k.G + k.K));
        // −4α(α−1) = +1, so dy = −(F − L) + X and dz = −G − K
        CHECK(d.dy == doctest::Approx(-(k.F - k.L) + k.X));
        CHECK(d.dz == doctest::Approx(-k.G - k.K));
    }
    SUBCASE("general point against an expanded formula") {
        const BlochState s{0.2, -0.3, 0.6};
        const double a = 0.3, e = 0.9;
        const auto d = rhs(s, k, e, a);
        const double c = a * (a - 1), a2 = a * a, b2 = (a - 1) * (a - 1);
        CHECK(d.dx == doctest::Approx(-e * s.dy - 4 * c * k.G - 4 * c * s.dz * k.K - 4 * b2 * s.dx * k.R));
        CHECK(d.dy == doctest::Approx(s.dx * (e + 4 * a2 * k.X) + 4 * c * (k.F - k.L) -
                                      4 * s.dy * (a2 * k.K + b2 * k.R) - 4 * c * s.dz * k.X));
        CHECK(d.dz == doctest::Approx(-4 * a2 * k.G - 4 * a2 * s.dz * k.K - 4 * c * s.dx * k.R));
    }
}

TEST_CASE("interference terms vanish exactly at alpha in {0, 1}") {
    // Only F, L, G enter without a state factor; with a zero state only the
    // cross terms survive.
    const KernelValues k{0.0, 0.0, 0.4, 0.0, 0.9, 0.0};
    for (double a : {0.0, 1.0}) {
        const auto d = rhs({0, 0, 0}, k, 0.5, a);
        CHECK(d.dy == 0.0);
    }
    const auto d = rhs({0, 0, 0}, k, 0.5, 0.5);
    CHECK(d.dy == doctest::Approx(-(0.9 - 0.4)));
}

TEST_CASE("rhs rejects non-finite input") {
    KernelValues k;
    k.K = std::nan("");
    CHECK_THROWS_AS(rhs({1, 0, 0}, k, 0.5, 0.5), NumericError);
    CHECK_THROWS_AS(rhs({INFINITY, 0, 0}, KernelValues{}, 0.5, 0.5), NumericError);
}

TEST_CASE("free precession without coupling") {
    const auto c = probe(0.4, 0.2, 0.0, 10.0, 1e-3);
    const auto tr = run(c);
    CHECK(tr.states[0] == c.initial);
    const auto& s = tr.states.back();
    CHECK(std::abs(s.dx - std::cos(5.0)) < 1e-8);
    CHECK(std::abs(s.dy - std::sin(5.0)) < 1e-8);
    CHECK(std::abs(s.dz) < 1e-12);
    CHECK(std::abs(s.norm2() - 1.0) < 1e-8);
}

TEST_CASE("zero-temperature dephasing follows the power law") {
    const auto c = probe(0.0, 0.0, 0.05, 10.0, 1e-2);
    const auto tr = run(c);
    for (std::size_t i : {std::size_t{100}, std::size_t{300}, std::size_t{1000}}) {
        const double t = tr.grid[i];
        const double coh = std::hypot(tr.states[i].dx, tr.states[i].dy);
        CHECK(std::abs(coh - std::pow(1.0 + t * t, -0.1)) < 1e-6);
    }
    const double c3 = std::hypot(tr.states[300].dx, tr.states[300].dy);
    CHECK(c3 == doctest::Approx(0.7943282347).epsilon(1e-6));
}

TEST_CASE("dephasing exponent quadrature matches the zero-temperature closed form") {
    const auto sd = SpectralDensity::ohmic(0.05, 1.0);
    for (double t : {0.1, 1.0, 3.0, 20.0, 50.0})
        CHECK(dephasing_exponent(sd, 0.0, t) == doctest::Approx(0.1 * std::log1p(t * t)).epsilon(1e-9));
    CHECK(dephasing_exponent(sd, 0.2, 0.0) == 0.0);
    CHECK(dephasing_exponent(SpectralDensity::ohmic(0.0, 1.0), 0.2, 3.0) == 0.0);
    // warmer baths dephase faster
    CHECK(dephasing_exponent(sd, 0.5, 5.0) > dephasing_exponent(sd, 0.2, 5.0));
}

TEST_CASE("finite-temperature dephasing: ODE against the frequency-space solution") {
    const auto c = probe(0.0, 0.2, 0.05, 50.0, 1e-2);
    const auto tr = run(c);
    std::vector<double> times;
    for (std::size_t i = 0; i < tr.size(); i += 250) times.push_back(tr.grid[i]);
    const auto exact = dephasing_solution(c, times);
    double worst = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const auto& s = tr.states[k * 250];
        worst = std::max(worst, std::abs(std::hypot(s.dx, s.dy) - std::hypot(exact[k].dx, exact[k].dy)));
        CHECK(std::abs(s.dx - exact[k].dx) < 1e-6);
        CHECK(std::abs(s.dy - exact[k].dy) < 1e-6);
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("dephasing oracle edge cases") {
    auto c = probe(0.0, 0.2, 0.05, 1.0, 0.5);
    c.initial = {0.6, 0.0, 0.8};
    const auto tr = dephasing_oracle(c);
    CHECK(tr.states[0] == c.initial);
    CHECK(tr.states[2].dz == 0.8);
    c.alpha = 0.1;
    CHECK_THROWS_AS(dephasing_oracle(c), ConfigError);
}

TEST_CASE("integrate validates its kernel set") {
    const auto c = probe(0.5, 0.2, 0.05, 2.0, 0.1);
    const auto ks = precompute(c.kernel_params(), 2.0, 0.1);

    auto other_T = c;
    other_T.T = 0.3;
    CHECK_THROWS_AS(integrate(other_T, ks), ConfigError);
    auto other_dt = c;
    other_dt.dt = 0.05;
    CHECK_THROWS_AS(integrate(other_dt, ks), ConfigError);
    auto longer = c;
    longer.t_end = 3.0;
    CHECK_THROWS_AS(integrate(longer, ks), ConfigError);
    // a longer kernel set covers a shorter run
    auto shorter = c;
    shorter.t_end = 1.0;
    CHECK(integrate(shorter, ks).size() == 11);

    auto bad = c;
    bad.alpha = 1.5;
    CHECK_THROWS_AS(integrate(bad, ks), DomainError);
    bad = c;
    bad.initial = {1.0, 0.1, 0.0};
    CHECK_THROWS_AS(integrate(bad, ks), DomainError);
}

TEST_CASE("leaving the Bloch ball is an integration failure at the first bad time") {
    auto c = probe(0.0, 0.2, 0.05, 1.0, 0.1);
    c.initial = {0.99, 0.0, 0.0};
    auto ks = precompute(c.kernel_params(), 1.0, 0.1);
    // negative dephasing rate amplifies coherence
    for (auto& v : ks.values[0]) v = -1.0;
    for (auto& v : ks.half_values[0]) v = -1.0;
    try {
        (void)integrate(c, ks);
        FAIL("expected IntegrationError");
    } catch (const IntegrationError& e) {
        // |Δ| grows like 0.99 e^{4t}, crossing 1 during the first step
        CHECK(e.time() == doctest::Approx(0.1));
        CHECK(std::string(e.what()).find("t=0.1") != std::string::npos);
    }
}

TEST_CASE("RK4 step halving shows fourth order") {
    auto c = probe(0.5, 0.2, 0.05, 10.0, 0.2);
    BlochState s[3];
    for (int k = 0; k < 3; ++k) {
        c.dt = 0.2 / (1 << k);
        s[k] = run(c).states.back();
    }
    auto diff = [](const BlochState& a, const BlochState& b) {
        return std::max({std::abs(a.dx - b.dx), std::abs(a.dy - b.dy), std::abs(a.dz - b.dz)});
    };
    const double order = std::log2(diff(s[0], s[1]) / diff(s[1], s[2]));
    CHECK(order > 3.5);
    CHECK(order < 4.5);
}

TEST_CASE("trajectory CSV") {
    const auto c = probe(0.5, 0.2, 0.05, 0.2, 0.1);
    std::ostringstream os;
    run(c).write_csv(os);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "t,dx,dy,dz");
    std::getline(is, line);
    CHECK(line == "0,1,0,0");
}
