// kernels.cpp: panel quadrature for the six Bloch coefficients
//
// The two kernel groups (thermal R, K, X and mechanical L, F, G) are
// integrated separately, each on its own panel layout. A layout cuts the
// frequency axis at 0, at the guard band [ε−δ, ε+δ], at 1, 2, 4 and 8 times T
// (thermal group only) and at the truncation frequency, then fills every
// interval with equal 7/15-point Gauss–Kronrod panels no wider than
// min(ω_c/4, 2π/(t_L·panels_per_oscillation)). The layout time t_L is t
// rounded up on a geometric ladder, so one layout serves a whole block of
// sample times and the t-independent part of every integrand is tabulated
// once per block:
//
//   R = Σ A s              with A = e^{−ω/ω_c} coth(ω/2T)
//   K = sin(εt) Σ P c − cos(εt) Σ Q s
//   X = X₀ − sin(εt) Σ Q s − cos(εt) Σ P c
//
// where s, c are sin(ωt), cos(ωt), P = ε·D, Q = ω·D and D = A ω/(ε² − ω²);
// the mechanical group factors the same way with coth → 1. Panels inside the
// guard band use the sum/difference-frequency form of the integrands and are
// evaluated node by node, as are panels produced by adaptive bisection.

#include "ncthermo/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <numbers>
#include <ostream>
#include <queue>
#include <string>
#include <thread>

#include "ncthermo/errors.hpp"
#include "ncthermo/quadrature.hpp"

namespace ncthermo {

namespace {

using quad::kGK15;
constexpr std::size_t kNodes = quad::GaussKronrod15::size;
constexpr std::size_t kGaussNodes = 7;  // odd Kronrod indices
using NodeArray = std::array<double, kNodes>;
using GaussArray = std::array<double, kGaussNodes>;
using Triple = std::array<double, 3>;

enum class Group { Thermal, Mechanical };

constexpr double kLadderRatio = 1.0625;
constexpr std::size_t kResync = 16;
constexpr double kRoundoffFloor = 50.0 * std::numeric_limits<double>::epsilon();

// sin(u)/u
double sinc(double u) {
    if (std::abs(u) < 1e-3) {
        const double u2 = u * u;
        return 1.0 - u2 / 6.0 + u2 * u2 / 120.0;
    }
    return std::sin(u) / u;
}

// (1 − cos u)/u
double versinc(double u) {
    if (std::abs(u) < 1e-3) {
        const double u2 = u * u;
        return u * (0.5 - u2 / 24.0 + u2 * u2 / 720.0);
    }
    const double h = std::sin(0.5 * u);
    return 2.0 * h * h / u;
}

double coth_at(double w, double T, double omega_c) {
    return T == 0.0 ? 1.0 : omega_thermal_factor(w, T, omega_c) / w;
}

// Smallest ladder time >= t. Below t_sat the ω_c/4 width bound is the
// binding one, so all such times share a single layout.
double layout_time(double t, const QuadratureConfig& q, double omega_c) {
    if (t == 0.0) return 0.0;
    const double t_sat = 2.0 * std::numbers::pi / (q.panels_per_oscillation * omega_c / 4.0);
    if (t <= t_sat) return t_sat;
    int k = static_cast<int>(std::floor(std::log(t / t_sat) / std::log(kLadderRatio)));
    k = std::max(k - 1, 0);
    double tl = t_sat * std::pow(kLadderRatio, k);
    while (tl < t) tl = t_sat * std::pow(kLadderRatio, ++k);
    return tl;
}

// Frequency beyond which every unit-η integrand is bounded by
// 4·coth(W/2T)·e^{−ω/ω_c}; the tail above it is below 10⁻³·abs_tol.
double truncation_frequency(const KernelParams& p, const QuadratureConfig& q, Group g) {
    const double omega_c = p.sd.omega_c;
    const double omega_max = q.omega_max_factor * omega_c;
    const double floor_w = 2.0 * p.epsilon + omega_c;
    const double target = 1e-3 * q.abs_tol;
    double w = floor_w;
    for (int it = 0; it < 4; ++it) {
        const double coth = (g == Group::Thermal) ? coth_at(w, p.T, omega_c) : 1.0;
        w = std::max(floor_w, omega_c * std::log(4.0 * coth * omega_c / target));
    }
    return std::min(omega_max, w);
}

struct Interval {
    double a{};
    double b{};
    std::size_t count{};
    bool resonant{};
    std::size_t first_panel{};

    double width() const { return (b - a) / static_cast<double>(count); }
};

struct Panel {
    std::size_t interval{};
    std::size_t k{};
    double a{};
    double b{};
    double cc{};
    double hw{};
};

// Tabulated integrand factors of one panel at one temperature. The k/g
// variants carry the Kronrod/Gauss weights.
//   thermal:    a ↔ sin(ωt) (R), p ↔ cos(ωt), q ↔ sin(ωt); c0 = {X₀, 0}
//   mechanical: a ↔ cos(ωt) (L), p ↔ sin(ωt), q ↔ cos(ωt); c0 = {L₀, F₀}
struct Prefactors {
    NodeArray ak{}, pk{}, qk{};
    GaussArray ag{}, pg{}, qg{};
    std::array<double, 2> c0k{}, c0g{};
    Triple floor{};
};

struct PanelValue {
    Triple value{};
    Triple error{};
};

class Layout {
public:
    Layout(const KernelParams& p, const QuadratureConfig& q, Group g, double t_layout,
           std::span<const double> temperatures)
        : p_(p), q_(q), group_(g), temps_(temperatures.begin(), temperatures.end()) {
        eps_ = p.epsilon;
        omega_c_ = p.sd.omega_c;
        if (group_ == Group::Mechanical) temps_.assign(1, 0.0);
        build_intervals(t_layout);
        tabulate();
    }

    const KernelParams& params() const { return p_; }
    const QuadratureConfig& config() const { return q_; }
    Group group() const { return group_; }
    double epsilon() const { return eps_; }
    double omega_c() const { return omega_c_; }
    std::size_t temperature_count() const { return temps_.size(); }
    double temperature(std::size_t i) const { return temps_[i]; }
    const std::vector<Interval>& intervals() const { return intervals_; }
    const std::vector<Panel>& panels() const { return panels_; }
    const Prefactors& prefactors(std::size_t temp, std::size_t panel) const {
        return pref_[temp][panel];
    }

private:
    void build_intervals(double t_layout) {
        const double omega_max = truncation_frequency(p_, q_, group_);
        const double guard = q_.resonance_guard * omega_c_;
        std::vector<double> cuts{0.0, omega_max};
        double guard_lo = 0.0, guard_hi = 0.0;
        const bool has_guard = eps_ > 0.0 && eps_ - guard < omega_max;
        if (has_guard) {
            guard_lo = std::max(0.0, eps_ - guard);
            guard_hi = std::min(omega_max, eps_ + guard);
            cuts.push_back(guard_lo);
            cuts.push_back(guard_hi);
        }
        const double T = temps_.front();
        if (group_ == Group::Thermal && T > 0.0)
            for (double m : {1.0, 2.0, 4.0, 8.0}) cuts.push_back(m * T);
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::remove_if(cuts.begin(), cuts.end(),
                                  [&](double x) { return x < 0.0 || x > omega_max; }),
                   cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

        double h = omega_c_ / 4.0;
        if (t_layout > 0.0)
            h = std::min(h, 2.0 * std::numbers::pi / (t_layout * q_.panels_per_oscillation));

        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            Interval iv;
            iv.a = cuts[i];
            iv.b = cuts[i + 1];
            iv.count = static_cast<std::size_t>(std::max(1.0, std::ceil((iv.b - iv.a) / h)));
            iv.resonant = has_guard && iv.a >= guard_lo && iv.b <= guard_hi;
            iv.first_panel = panels_.size();
            const double w = iv.width();
            for (std::size_t k = 0; k < iv.count; ++k) {
                Panel pn;
                pn.interval = intervals_.size();
                pn.k = k;
                pn.a = iv.a + static_cast<double>(k) * w;
                pn.b = (k + 1 == iv.count) ? iv.b : pn.a + w;
                pn.cc = iv.a + (static_cast<double>(k) + 0.5) * w;
                pn.hw = 0.5 * w;
                panels_.push_back(pn);
            }
            intervals_.push_back(iv);
        }
    }

    void tabulate() {
        pref_.assign(temps_.size(), std::vector<Prefactors>(panels_.size()));
        for (std::size_t ti = 0; ti < temps_.size(); ++ti) {
            for (std::size_t pi = 0; pi < panels_.size(); ++pi) {
                const Panel& pn = panels_[pi];
                if (intervals_[pn.interval].resonant) continue;
                pref_[ti][pi] = group_ == Group::Thermal ? thermal(pn, temps_[ti]) : mechanical(pn);
            }
        }
    }

    Prefactors thermal(const Panel& pn, double T) const {
        Prefactors f;
        double x0k = 0.0, x0g = 0.0, fr = 0.0, fk = 0.0, fx = 0.0;
        for (std::size_t j = 0; j < kNodes; ++j) {
            const double w = pn.cc + pn.hw * kGK15.x[j];
            const double A = std::exp(-w / omega_c_) * coth_at(w, T, omega_c_);
            const double D = A * w / ((eps_ - w) * (eps_ + w));
            const double P = eps_ * D, Q = w * D;
            const double wk = kGK15.wk[j], wg = kGK15.wg[j];
            f.ak[j] = wk * A;
            f.pk[j] = wk * P;
            f.qk[j] = wk * Q;
            if (j % 2 == 1) {
                f.ag[j / 2] = wg * A;
                f.pg[j / 2] = wg * P;
                f.qg[j / 2] = wg * Q;
            }
            x0k += wk * P;
            x0g += wg * P;
            fr += wk * std::abs(A);
            fk += wk * (std::abs(P) + std::abs(Q));
            fx += wk * (2.0 * std::abs(P) + std::abs(Q));
        }
        f.c0k = {x0k, 0.0};
        f.c0g = {x0g, 0.0};
        f.floor = {kRoundoffFloor * fr * pn.hw, kRoundoffFloor * fk * pn.hw,
                   kRoundoffFloor * fx * pn.hw};
        return f;
    }

    Prefactors mechanical(const Panel& pn) const {
        Prefactors f;
        double l0k = 0.0, l0g = 0.0, f0k = 0.0, f0g = 0.0, fl = 0.0, ff = 0.0, fg = 0.0;
        for (std::size_t j = 0; j < kNodes; ++j) {
            const double w = pn.cc + pn.hw * kGK15.x[j];
            const double E = std::exp(-w / omega_c_);
            const double D = E * w / ((eps_ - w) * (eps_ + w));
            const double P = eps_ * D, Q = w * D;
            const double wk = kGK15.wk[j], wg = kGK15.wg[j];
            f.ak[j] = wk * E;
            f.pk[j] = wk * P;
            f.qk[j] = wk * Q;
            if (j % 2 == 1) {
                f.ag[j / 2] = wg * E;
                f.pg[j / 2] = wg * P;
                f.qg[j / 2] = wg * Q;
            }
            l0k += wk * E;
            l0g += wg * E;
            f0k += wk * Q;
            f0g += wg * Q;
            fl += wk * 2.0 * E;
            ff += wk * (std::abs(P) + 2.0 * std::abs(Q));
            fg += wk * (std::abs(P) + std::abs(Q));
        }
        f.c0k = {l0k, f0k};
        f.c0g = {l0g, f0g};
        f.floor = {kRoundoffFloor * fl * pn.hw, kRoundoffFloor * ff * pn.hw,
                   kRoundoffFloor * fg * pn.hw};
        return f;
    }

    const KernelParams& p_;
    const QuadratureConfig& q_;
    Group group_;
    std::vector<double> temps_;
    double eps_{}, omega_c_{};
    std::vector<Interval> intervals_;
    std::vector<Panel> panels_;
    std::vector<std::vector<Prefactors>> pref_;
};

struct Leaf {
    double a{};
    double b{};
    std::size_t panel{};  // base panel index, or kSplit for bisected leaves
    bool resonant{};
};

constexpr std::size_t kSplit = std::numeric_limits<std::size_t>::max();

// Integrates one group at one time on a prepared layout, for every
// temperature of the layout. Adaptivity is driven by the first temperature.
class TimeEvaluator {
public:
    TimeEvaluator(const Layout& layout, double t) : L_(layout), t_(t) {
        eps_ = layout.epsilon();
        omega_c_ = layout.omega_c();
        s_eps_ = std::sin(eps_ * t);
        c_eps_ = std::cos(eps_ * t);
    }

    // Unit-η integrals, one triple per layout temperature.
    std::vector<Triple> run() {
        const auto& panels = L_.panels();
        const std::size_t nt = L_.temperature_count();
        base_.assign(nt, {});
        for (std::size_t ti = 1; ti < nt; ++ti) base_[ti].resize(panels.size());
        std::vector<PanelValue> centre(panels.size());

        for (const auto& iv : L_.intervals()) {
            if (iv.resonant) {
                for (std::size_t k = 0; k < iv.count; ++k) {
                    const std::size_t pi = iv.first_panel + k;
                    const Panel& pn = panels[pi];
                    for (std::size_t ti = 0; ti < nt; ++ti) {
                        const PanelValue pv = direct(pn.a, pn.b, true, L_.temperature(ti), ti == 0);
                        if (ti == 0)
                            centre[pi] = pv;
                        else
                            base_[ti][pi] = pv.value;
                    }
                }
                continue;
            }
            offsets(0.5 * iv.width());
            // Panel centres are equally spaced, so sin/cos of cc·t advance by a
            // fixed rotation; re-anchored every kResync panels.
            const double step = iv.width() * t_;
            const double rs = std::sin(step), rc = std::cos(step);
            double S = 0.0, C = 1.0;
            for (std::size_t k = 0; k < iv.count; ++k) {
                const std::size_t pi = iv.first_panel + k;
                if (k % kResync == 0) {
                    S = std::sin(panels[pi].cc * t_);
                    C = std::cos(panels[pi].cc * t_);
                } else {
                    const double S1 = S * rc + C * rs;
                    C = C * rc - S * rs;
                    S = S1;
                }
                tabulated(panels[pi], pi, S, C, centre[pi]);
            }
        }

        std::vector<PanelValue>& leaf_values = centre;
        leaves_.resize(panels.size());
        Triple total{}, err{};
        for (std::size_t pi = 0; pi < panels.size(); ++pi) {
            const Panel& pn = panels[pi];
            leaves_[pi] = {pn.a, pn.b, pi, L_.intervals()[pn.interval].resonant};
            for (std::size_t m = 0; m < 3; ++m) {
                total[m] += centre[pi].value[m];
                err[m] += centre[pi].error[m];
            }
        }
        refine(leaf_values, total, err);

        std::vector<std::size_t> order(leaves_.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        if (leaves_.size() > panels.size())
            std::sort(order.begin(), order.end(),
                      [&](std::size_t l, std::size_t r) { return leaves_[l].a < leaves_[r].a; });

        std::vector<Triple> out(nt);
        for (std::size_t ti = 0; ti < nt; ++ti) {
            Triple sum{};
            for (std::size_t i : order) {
                const Leaf& leaf = leaves_[i];
                Triple v;
                if (ti == 0)
                    v = leaf_values[i].value;
                else if (leaf.panel != kSplit)
                    v = base_[ti][leaf.panel];
                else
                    v = direct(leaf.a, leaf.b, leaf.resonant, L_.temperature(ti), false).value;
                for (std::size_t m = 0; m < 3; ++m) sum[m] += v[m];
            }
            out[ti] = sum;
        }
        return out;
    }

    std::size_t failed_component() const { return failed_component_; }

private:
    double tolerance(double value) const {
        const double abs_tol = L_.config().abs_tol / L_.params().sd.eta;
        return std::max(abs_tol, L_.config().rel_tol * std::abs(value));
    }

    bool converged(const Triple& total, const Triple& err) const {
        for (std::size_t m = 0; m < 3; ++m)
            if (!(err[m] <= tolerance(total[m]))) return false;
        return true;
    }

    void refine(std::vector<PanelValue>& values, Triple& total, Triple& err) {
        if (converged(total, err)) return;

        Triple scale{};
        for (std::size_t m = 0; m < 3; ++m) scale[m] = tolerance(total[m]);
        auto key = [&](std::size_t idx) {
            double worst = 0.0;
            for (std::size_t m = 0; m < 3; ++m)
                worst = std::max(worst, values[idx].error[m] / scale[m]);
            return worst;
        };
        using Item = std::pair<double, std::size_t>;
        auto cmp = [](const Item& l, const Item& r) {
            return l.first < r.first || (l.first == r.first && l.second > r.second);
        };
        std::priority_queue<Item, std::vector<Item>, decltype(cmp)> queue(cmp);
        for (std::size_t i = 0; i < values.size(); ++i) queue.emplace(key(i), i);

        const double T = L_.temperature(0);
        std::size_t splits = 0;
        while (!converged(total, err)) {
            if (splits++ >= L_.config().max_subdivisions) {
                std::size_t m = 0;
                for (std::size_t j = 1; j < 3; ++j)
                    if (err[j] / tolerance(total[j]) > err[m] / tolerance(total[m])) m = j;
                failed_component_ = m;
                throw NumericError("kernel quadrature: tolerance not reached", err[m]);
            }
            const std::size_t idx = queue.top().second;
            queue.pop();
            const Leaf worst = leaves_[idx];
            const PanelValue old = values[idx];
            const double mid = 0.5 * (worst.a + worst.b);
            const PanelValue lv = direct(worst.a, mid, worst.resonant, T, true);
            const PanelValue rv = direct(mid, worst.b, worst.resonant, T, true);
            for (std::size_t m = 0; m < 3; ++m) {
                total[m] += lv.value[m] + rv.value[m] - old.value[m];
                err[m] += lv.error[m] + rv.error[m] - old.error[m];
            }
            leaves_[idx] = {worst.a, mid, kSplit, worst.resonant};
            values[idx] = lv;
            leaves_.push_back({mid, worst.b, kSplit, worst.resonant});
            values.push_back(rv);
            queue.emplace(key(idx), idx);
            queue.emplace(key(values.size() - 1), values.size() - 1);
        }
    }

    void offsets(double hw) {
        for (std::size_t j = 0; j < kNodes; ++j) {
            const double o = hw * kGK15.x[j];
            so_[j] = std::sin(o * t_);
            co_[j] = std::cos(o * t_);
        }
    }

    void tabulated(const Panel& pn, std::size_t pi, double S, double C, PanelValue& centre) {
        NodeArray s, c;
        for (std::size_t j = 0; j < kNodes; ++j) {
            s[j] = S * co_[j] + C * so_[j];
            c[j] = C * co_[j] - S * so_[j];
        }
        const bool thermal = L_.group() == Group::Thermal;
        const NodeArray& a_trig = thermal ? s : c;
        const NodeArray& p_trig = thermal ? c : s;
        const NodeArray& q_trig = thermal ? s : c;

        for (std::size_t ti = 0; ti < L_.temperature_count(); ++ti) {
            const Prefactors& f = L_.prefactors(ti, pi);
            double ak = 0.0, ag = 0.0, pk = 0.0, pg = 0.0, qk = 0.0, qg = 0.0;
            for (std::size_t j = 0; j < kNodes; ++j) {
                ak += f.ak[j] * a_trig[j];
                pk += f.pk[j] * p_trig[j];
                qk += f.qk[j] * q_trig[j];
            }
            for (std::size_t j = 0; j < kGaussNodes; ++j) {
                ag += f.ag[j] * a_trig[2 * j + 1];
                pg += f.pg[j] * p_trig[2 * j + 1];
                qg += f.qg[j] * q_trig[2 * j + 1];
            }
            Triple vk, vg;
            if (thermal) {
                vk = {ak, s_eps_ * pk - c_eps_ * qk, f.c0k[0] - s_eps_ * qk - c_eps_ * pk};
                vg = {ag, s_eps_ * pg - c_eps_ * qg, f.c0g[0] - s_eps_ * qg - c_eps_ * pg};
            } else {
                vk = {f.c0k[0] - ak, s_eps_ * pk + c_eps_ * qk - f.c0k[1], s_eps_ * qk - c_eps_ * pk};
                vg = {f.c0g[0] - ag, s_eps_ * pg + c_eps_ * qg - f.c0g[1], s_eps_ * qg - c_eps_ * pg};
            }
            Triple value;
            for (std::size_t m = 0; m < 3; ++m) value[m] = vk[m] * pn.hw;
            if (ti > 0) {
                base_[ti][pi] = value;
            } else {
                centre.value = value;
                for (std::size_t m = 0; m < 3; ++m)
                    centre.error[m] = std::max(std::abs((vk[m] - vg[m]) * pn.hw), f.floor[m]);
            }
        }
    }

    // Node-by-node evaluation of the integrands on [a, b].
    PanelValue direct(double a, double b, bool resonant, double T, bool want_error) const {
        const double cc = 0.5 * (a + b);
        const double hw = 0.5 * (b - a);
        const bool thermal = L_.group() == Group::Thermal;
        std::array<NodeArray, 3> f{};
        for (std::size_t j = 0; j < kNodes; ++j) {
            const double w = cc + hw * kGK15.x[j];
            const double s = std::sin(w * t_), c = std::cos(w * t_);
            const double A = std::exp(-w / omega_c_) * (thermal ? coth_at(w, T, omega_c_) : 1.0);
            if (resonant) {
                const double x = eps_ - w, y = eps_ + w;
                const double sx = t_ * sinc(x * t_), sy = t_ * sinc(y * t_);
                const double vx = t_ * versinc(x * t_), vy = t_ * versinc(y * t_);
                const double Jw = A * w;
                if (thermal) {
                    f[0][j] = A * s;
                    f[1][j] = Jw * 0.5 * (sy + sx);
                    f[2][j] = Jw * 0.5 * (vx + vy);
                } else {
                    f[0][j] = A * (1.0 - c);
                    f[1][j] = Jw * 0.5 * (vy - vx);
                    f[2][j] = Jw * 0.5 * (sx - sy);
                }
            } else {
                const double D = A * w / ((eps_ - w) * (eps_ + w));
                if (thermal) {
                    f[0][j] = A * s;
                    f[1][j] = D * (eps_ * s_eps_ * c - w * c_eps_ * s);
                    f[2][j] = D * (eps_ - w * s_eps_ * s - eps_ * c_eps_ * c);
                } else {
                    f[0][j] = A * (1.0 - c);
                    f[1][j] = D * (eps_ * s_eps_ * s + w * c_eps_ * c - w);
                    f[2][j] = D * (w * s_eps_ * c - eps_ * c_eps_ * s);
                }
            }
        }
        PanelValue pv;
        for (std::size_t m = 0; m < 3; ++m) {
            double rk = 0.0, rg = 0.0, rabs = 0.0;
            for (std::size_t j = 0; j < kNodes; ++j) {
                rk += kGK15.wk[j] * f[m][j];
                rg += kGK15.wg[j] * f[m][j];
                rabs += kGK15.wk[j] * std::abs(f[m][j]);
            }
            pv.value[m] = rk * hw;
            if (want_error)
                pv.error[m] = std::max(std::abs((rk - rg) * hw), kRoundoffFloor * rabs * hw);
        }
        return pv;
    }

    const Layout& L_;
    double t_;
    double eps_{}, omega_c_{}, s_eps_{}, c_eps_{};
    NodeArray so_{}, co_{};
    std::vector<std::vector<Triple>> base_;
    std::vector<Leaf> leaves_;
    std::size_t failed_component_{0};
};

constexpr std::array<KernelId, 3> kThermalIds{KernelId::R, KernelId::K, KernelId::X};
constexpr std::array<KernelId, 3> kMechanicalIds{KernelId::L, KernelId::F, KernelId::G};

std::vector<Triple> run_group(const Layout& layout, double t) {
    TimeEvaluator ev(layout, t);
    try {
        return ev.run();
    } catch (const NumericError& e) {
        const auto& ids = layout.group() == Group::Thermal ? kThermalIds : kMechanicalIds;
        throw NumericError("kernel " + std::string(kernel_name(ids[ev.failed_component()])) +
                               " at t=" + std::to_string(t) + ": " + e.what(),
                           e.error_estimate());
    }
}

void check_time(double t) {
    if (!(t >= 0.0) || !std::isfinite(t))
        throw DomainError("kernel evaluation: time must be finite and >= 0");
}

void check_family(const KernelParams& p, std::span<const double> temperatures) {
    if (temperatures.empty()) throw DomainError("thermal family: no temperatures");
    for (double T : temperatures) {
        if (!(T >= 0.0) || !std::isfinite(T))
            throw DomainError("thermal family: temperatures must be finite and >= 0");
        if ((p.T == 0.0) != (T == 0.0))
            throw DomainError("thermal family: cannot mix zero and positive temperatures");
    }
}

// Layout temperatures: p.T first (it drives adaptivity), then every other
// requested temperature once. slot[i] locates temperatures[i] in the list.
struct TemperatureSlots {
    std::vector<double> temps;
    std::vector<std::size_t> slot;
};

TemperatureSlots layout_temperatures(const KernelParams& p,
                                     std::span<const double> temperatures) {
    TemperatureSlots ts;
    ts.temps.push_back(p.T);
    for (double T : temperatures) {
        const auto it = std::find(ts.temps.begin(), ts.temps.end(), T);
        ts.slot.push_back(static_cast<std::size_t>(it - ts.temps.begin()));
        if (it == ts.temps.end()) ts.temps.push_back(T);
    }
    return ts;
}

} // namespace

void KernelParams::validate() const {
    sd.validate();
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
        throw DomainError("kernel params: epsilon must be finite and >= 0");
    if (!(T >= 0.0) || !std::isfinite(T))
        throw DomainError("kernel params: temperature must be finite and >= 0");
}

void QuadratureConfig::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
        throw ConfigError("quadrature: tolerances must be > 0");
    if (!(omega_max_factor >= 10.0))
        throw ConfigError("quadrature: omega_max_factor must be >= 10");
    if (!(panels_per_oscillation >= 2.0))
        throw ConfigError("quadrature: panels_per_oscillation must be >= 2");
    if (!(resonance_guard > 0.0))
        throw ConfigError("quadrature: resonance_guard must be > 0");
}

std::string_view kernel_name(KernelId id) {
    static constexpr std::array<std::string_view, kKernelCount> names{"R", "K", "L",
                                                                      "X", "F", "G"};
    return names[static_cast<std::size_t>(id)];
}

double KernelValues::operator[](KernelId id) const {
    switch (id) {
    case KernelId::R: return R;
    case KernelId::K: return K;
    case KernelId::L: return L;
    case KernelId::X: return X;
    case KernelId::F: return F;
    case KernelId::G: return G;
    }
    return 0.0;
}

std::vector<ThermalValues> evaluate_thermal_family(const KernelParams& p, double t,
                                                   std::span<const double> temperatures,
                                                   const QuadratureConfig& q) {
    p.validate();
    q.validate();
    check_time(t);
    check_family(p, temperatures);
    if (t == 0.0 || p.sd.eta == 0.0) return std::vector<ThermalValues>(temperatures.size());
    const auto ts = layout_temperatures(p, temperatures);
    const Layout layout(p, q, Group::Thermal, layout_time(t, q, p.sd.omega_c), ts.temps);
    const auto unit = run_group(layout, t);
    const double eta = p.sd.eta;
    std::vector<ThermalValues> out;
    out.reserve(ts.slot.size());
    for (std::size_t k : ts.slot) out.push_back({eta * unit[k][0], eta * unit[k][1], eta * unit[k][2]});
    return out;
}

MechanicalValues evaluate_mechanical(const KernelParams& p, double t, const QuadratureConfig& q) {
    p.validate();
    q.validate();
    check_time(t);
    if (t == 0.0 || p.sd.eta == 0.0) return {};
    const Layout layout(p, q, Group::Mechanical, layout_time(t, q, p.sd.omega_c), {});
    const Triple v = run_group(layout, t).front();
    const double eta = p.sd.eta;
    return {eta * v[0], eta * v[1], eta * v[2]};
}

KernelValues evaluate_kernels(const KernelParams& p, double t, const QuadratureConfig& q) {
    const double T = p.T;
    const auto th = evaluate_thermal_family(p, t, std::span<const double>(&T, 1), q);
    const auto mech = evaluate_mechanical(p, t, q);
    return {th[0].R, th[0].K, mech.L, th[0].X, mech.F, mech.G};
}

double kernel_R(const KernelParams& p, double t, const QuadratureConfig& q) {
    return evaluate_kernels(p, t, q).R;
}
double kernel_K(const KernelParams& p, double t, const QuadratureConfig& q) {
    return evaluate_kernels(p, t, q).K;
}
double kernel_L(const KernelParams& p, double t, const QuadratureConfig& q) {
    return evaluate_kernels(p, t, q).L;
}
double kernel_X(const KernelParams& p, double t, const QuadratureConfig& q) {
    return evaluate_kernels(p, t, q).X;
}
double kernel_F(const KernelParams& p, double t, const QuadratureConfig& q) {
    return evaluate_kernels(p, t, q).F;
}
double kernel_G(const KernelParams& p, double t, const QuadratureConfig& q) {
    return evaluate_kernels(p, t, q).G;
}

KernelValues KernelSet::at(std::size_t i) const {
    return {values[0][i], values[1][i], values[2][i], values[3][i], values[4][i], values[5][i]};
}

KernelValues KernelSet::at_half(std::size_t i) const {
    return {half_values[0][i], half_values[1][i], half_values[2][i],
            half_values[3][i], half_values[4][i], half_values[5][i]};
}

void KernelSet::write_csv(std::ostream& os) const {
    os << "t,R,K,L,X,F,G\n";
    char buf[32];
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", grid[i]);
        os << buf;
        for (std::size_t k = 0; k < kKernelCount; ++k) {
            std::snprintf(buf, sizeof buf, ",%.17g", values[k][i]);
            os << buf;
        }
        os << '\n';
    }
}

std::size_t grid_steps(double t_end, double dt) {
    if (!(dt > 0.0) || !(t_end >= dt) || !std::isfinite(t_end))
        throw DomainError("time grid: need 0 < dt <= t_end");
    const double ratio = t_end / dt;
    const double n = std::round(ratio);
    if (std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio))
        throw DomainError("time grid: t_end must be an integer multiple of dt");
    return static_cast<std::size_t>(n);
}

namespace {

// Runs fn(j) for j in [begin, end) on `workers` threads with a static
// interleaved partition. Rethrows the failure with the smallest index.
template <class Fn>
void parallel_for(std::size_t begin, std::size_t end, unsigned workers, Fn&& fn) {
    workers = std::max(1u, workers);
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::size_t> error_index(workers, std::numeric_limits<std::size_t>::max());
    auto body = [&](unsigned w) {
        for (std::size_t j = begin + w; j < end; j += workers) {
            try {
                fn(j);
            } catch (...) {
                errors[w] = std::current_exception();
                error_index[w] = j;
                return;
            }
        }
    };
    if (workers == 1 || end - begin < 2) {
        body(0);
        for (unsigned w = 1; w < workers; ++w) body(w);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body, w);
    }
    std::size_t best = std::numeric_limits<std::size_t>::max();
    std::exception_ptr first;
    for (unsigned w = 0; w < workers; ++w)
        if (errors[w] && error_index[w] < best) {
            best = error_index[w];
            first = errors[w];
        }
    if (first) std::rethrow_exception(first);
}

// Sample j of the interleaved time axis: even j are grid points, odd j
// midpoints.
double sample_time(std::size_t j, double dt) {
    const std::size_t i = j / 2;
    return (j % 2 == 0) ? static_cast<double>(i) * dt : (static_cast<double>(i) + 0.5) * dt;
}

KernelSet empty_set(const KernelParams& p, const QuadratureConfig& q, std::size_t n, double dt) {
    KernelSet ks;
    ks.params = p;
    ks.quad = q;
    ks.dt = dt;
    ks.grid.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) ks.grid[i] = static_cast<double>(i) * dt;
    for (auto& v : ks.values) v.assign(n + 1, 0.0);
    for (auto& v : ks.half_values) v.assign(n, 0.0);
    return ks;
}

void store(KernelSet& ks, std::size_t j, KernelId id, double v) {
    const auto k = static_cast<std::size_t>(id);
    if (j % 2 == 0)
        ks.values[k][j / 2] = v;
    else
        ks.half_values[k][j / 2] = v;
}

} // namespace

KernelSet precompute(const KernelParams& p, double t_end, double dt, const QuadratureConfig& q,
                     unsigned workers) {
    const double T = p.T;
    auto family = precompute_temperature_family(p, std::span<const double>(&T, 1), t_end, dt, q,
                                                workers);
    return std::move(family.front());
}

std::vector<KernelSet> precompute_temperature_family(const KernelParams& p,
                                                     std::span<const double> temperatures,
                                                     double t_end, double dt,
                                                     const QuadratureConfig& q,
                                                     unsigned workers) {
    p.validate();
    q.validate();
    check_family(p, temperatures);
    const std::size_t n = grid_steps(t_end, dt);

    std::vector<KernelSet> sets;
    for (double T : temperatures) {
        KernelParams pt = p;
        pt.T = T;
        sets.push_back(empty_set(pt, q, n, dt));
    }
    if (p.sd.eta == 0.0) return sets;

    const auto ts = layout_temperatures(p, temperatures);
    const double eta = p.sd.eta;
    const std::size_t samples = 2 * n + 1;

    // Sample times increase with j, so equal layout times form contiguous blocks.
    std::size_t begin = 1;  // t = 0 stays zero
    while (begin < samples) {
        const double tl = layout_time(sample_time(begin, dt), q, p.sd.omega_c);
        std::size_t end = begin + 1;
        while (end < samples && layout_time(sample_time(end, dt), q, p.sd.omega_c) == tl) ++end;

        const Layout thermal(p, q, Group::Thermal, tl, ts.temps);
        const Layout mechanical(p, q, Group::Mechanical, tl, {});
        parallel_for(begin, end, workers, [&](std::size_t j) {
            const double t = sample_time(j, dt);
            const auto th = run_group(thermal, t);
            const Triple mech = run_group(mechanical, t).front();
            for (std::size_t s = 0; s < sets.size(); ++s) {
                const Triple& v = th[ts.slot[s]];
                store(sets[s], j, KernelId::R, eta * v[0]);
                store(sets[s], j, KernelId::K, eta * v[1]);
                store(sets[s], j, KernelId::X, eta * v[2]);
                store(sets[s], j, KernelId::L, eta * mech[0]);
                store(sets[s], j, KernelId::F, eta * mech[1]);
                store(sets[s], j, KernelId::G, eta * mech[2]);
            }
        });
        begin = end;
    }
    return sets;
}

} // namespace ncthermo
