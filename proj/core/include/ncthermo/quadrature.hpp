// quadrature.hpp: 7/15-point Gauss–Kronrod panels and a globally adaptive
// composite integrator over a prescribed panel layout.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <vector>

#include "ncthermo/errors.hpp"

namespace ncthermo::quad {

// Abscissae on [-1, 1] ordered left to right; the Gauss weights are zero at
// the Kronrod-only nodes.
struct GaussKronrod15 {
    static constexpr std::size_t size = 15;
    std::array<double, size> x;
    std::array<double, size> wk;
    std::array<double, size> wg;
};

inline constexpr GaussKronrod15 make_gk15() {
    constexpr std::array<double, 8> xgk{
        0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
        0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
    constexpr std::array<double, 8> wgk{
        0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    // Gauss 7-point weights for xgk[1], xgk[3], xgk[5], xgk[7].
    constexpr std::array<double, 4> wg7{
        0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
        0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

    GaussKronrod15 r{};
    for (std::size_t j = 0; j < 7; ++j) {
        r.x[j] = -xgk[j];
        r.x[14 - j] = xgk[j];
        r.wk[j] = r.wk[14 - j] = wgk[j];
        const double g = (j % 2 == 1) ? wg7[j / 2] : 0.0;
        r.wg[j] = r.wg[14 - j] = g;
    }
    r.x[7] = 0.0;
    r.wk[7] = wgk[7];
    r.wg[7] = wg7[3];
    return r;
}

inline constexpr GaussKronrod15 kGK15 = make_gk15();

// QUADPACK error heuristic: scales |K15 - G7| against the panel's mean
// absolute deviation and floors it at the roundoff level of the panel.
inline double qk15_error(double kronrod, double gauss, double resabs, double resasc,
                         double half_width) {
    constexpr double epmach = std::numeric_limits<double>::epsilon();
    constexpr double uflow = std::numeric_limits<double>::min();
    double err = std::abs((kronrod - gauss) * half_width);
    resabs *= std::abs(half_width);
    resasc *= std::abs(half_width);
    if (resasc != 0.0 && err != 0.0) {
        const double r = 200.0 * err / resasc;
        err = resasc * std::min(1.0, r * std::sqrt(r));
    }
    if (resabs > uflow / (50.0 * epmach))
        err = std::max(50.0 * epmach * resabs, err);
    return err;
}

struct PanelResult {
    double a{};
    double b{};
    double value{};
    double error{};
};

template <class F>
PanelResult gk15_panel(F&& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double hw = 0.5 * (b - a);
    std::array<double, GaussKronrod15::size> fv{};
    double rk = 0.0, rg = 0.0, rabs = 0.0;
    for (std::size_t j = 0; j < GaussKronrod15::size; ++j) {
        fv[j] = f(c + hw * kGK15.x[j]);
        rk += kGK15.wk[j] * fv[j];
        rg += kGK15.wg[j] * fv[j];
        rabs += kGK15.wk[j] * std::abs(fv[j]);
    }
    const double mean = 0.5 * rk;
    double rasc = 0.0;
    for (std::size_t j = 0; j < GaussKronrod15::size; ++j)
        rasc += kGK15.wk[j] * std::abs(fv[j] - mean);
    return {a, b, rk * hw, qk15_error(rk, rg, rabs, rasc, hw)};
}

struct AdaptiveResult {
    double value{};
    double error{};
    std::size_t panels{};
};

// Splits every interval between consecutive breakpoints into equal panels no
// wider than max_width, then repeatedly bisects the panel with the largest
// error estimate until the total error meets max(abs_tol, rel_tol·|I|).
template <class F>
AdaptiveResult integrate_adaptive(F&& f, std::span<const double> breakpoints, double max_width,
                                  double rel_tol, double abs_tol,
                                  std::size_t max_subdivisions = 20000) {
    if (breakpoints.size() < 2)
        throw DomainError("integrate_adaptive: need at least two breakpoints");

    auto cmp = [](const PanelResult& l, const PanelResult& r) { return l.error < r.error; };
    std::priority_queue<PanelResult, std::vector<PanelResult>, decltype(cmp)> queue(cmp);

    double total = 0.0, err = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        const double a = breakpoints[i], b = breakpoints[i + 1];
        if (!(b > a)) continue;
        const auto n = static_cast<std::size_t>(
            std::max(1.0, std::ceil((b - a) / max_width)));
        const double w = (b - a) / static_cast<double>(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double pa = a + static_cast<double>(k) * w;
            const double pb = (k + 1 == n) ? b : a + static_cast<double>(k + 1) * w;
            auto p = gk15_panel(f, pa, pb);
            total += p.value;
            err += p.error;
            queue.push(p);
        }
    }

    std::size_t splits = 0;
    while (err > std::max(abs_tol, rel_tol * std::abs(total))) {
        if (splits++ >= max_subdivisions || queue.empty())
            throw NumericError("integrate_adaptive: tolerance not reached", err);
        const PanelResult worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const auto left = gk15_panel(f, worst.a, mid);
        const auto right = gk15_panel(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
    }
    if (!std::isfinite(total))
        throw NumericError("integrate_adaptive: non-finite result", err);
    return {total, err, queue.size()};
}

} // namespace ncthermo::quad
