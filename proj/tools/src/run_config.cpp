// run_config.cpp: key=value configuration parsing

#include "run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <thread>

#include "ncthermo/errors.hpp"

namespace ncthermo::app {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    const std::string s = trim(v);
    double out{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
    return out;
}

std::size_t parse_count(const std::string& key, const std::string& v) {
    const double d = parse_double(key, v);
    if (!(d >= 0.0) || d != std::floor(d))
        throw ConfigError("config: '" + key + "' expects a non-negative integer, got '" + v + "'");
    return static_cast<std::size_t>(d);
}

bool parse_bool(const std::string& key, const std::string& v) {
    const std::string s = trim(v);
    if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
    if (s == "0" || s == "false" || s == "no" || s == "off") return false;
    throw ConfigError("config: '" + key + "' expects a boolean, got '" + v + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::size_t start = 0;
    const std::string s = trim(v);
    if (s.empty()) return out;
    while (true) {
        const auto comma = s.find(',', start);
        out.push_back(parse_double(key, s.substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    auto num = [](double RunConfig::*m) {
        return Setter([m](RunConfig& c, const std::string& k, const std::string& v) {
            c.*m = parse_double(k, v);
        });
    };
    auto quad = [](double QuadratureConfig::*m) {
        return Setter([m](RunConfig& c, const std::string& k, const std::string& v) {
            c.quad.*m = parse_double(k, v);
        });
    };
    auto count = [](std::size_t RunConfig::*m) {
        return Setter([m](RunConfig& c, const std::string& k, const std::string& v) {
            c.*m = parse_count(k, v);
        });
    };
    static const std::map<std::string, Setter> table{
        {"epsilon", num(&RunConfig::epsilon)},
        {"T", num(&RunConfig::T)},
        {"temp", num(&RunConfig::T)},
        {"eta", num(&RunConfig::eta)},
        {"omega_c", num(&RunConfig::omega_c)},
        {"alpha", num(&RunConfig::alpha)},
        {"t_end", num(&RunConfig::t_end)},
        {"dt", num(&RunConfig::dt)},
        {"rel_tol", quad(&QuadratureConfig::rel_tol)},
        {"abs_tol", quad(&QuadratureConfig::abs_tol)},
        {"omega_max_factor", quad(&QuadratureConfig::omega_max_factor)},
        {"panels_per_oscillation", quad(&QuadratureConfig::panels_per_oscillation)},
        {"resonance_guard", quad(&QuadratureConfig::resonance_guard)},
        {"max_subdivisions",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.quad.max_subdivisions = parse_count(k, v);
         }},
        {"delta_rel",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.stencil.delta_rel = parse_double(k, v);
         }},
        {"alpha_min", num(&RunConfig::alpha_min)},
        {"alpha_max", num(&RunConfig::alpha_max)},
        {"alpha_count", count(&RunConfig::alpha_count)},
        {"temp_min", num(&RunConfig::temp_min)},
        {"temp_max", num(&RunConfig::temp_max)},
        {"temp_count", count(&RunConfig::temp_count)},
        {"temp_log",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.temp_log = parse_bool(k, v); }},
        {"times",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.times = parse_list(k, v); }},
        {"rise_tol", num(&RunConfig::rise_tol)},
        {"window_frac", num(&RunConfig::window_frac)},
        {"conv_tol", num(&RunConfig::conv_tol)},
        {"fit_temp_min", num(&RunConfig::fit_temp_min)},
        {"fit_temp_max", num(&RunConfig::fit_temp_max)},
        {"out", [](RunConfig& c, const std::string&, const std::string& v) { c.out_dir = trim(v); }},
        {"workers",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.workers = static_cast<unsigned>(parse_count(k, v));
         }},
        {"svg", [](RunConfig& c, const std::string& k, const std::string& v) { c.emit_svg = parse_bool(k, v); }},
    };
    return table;
}

bool on_grid(double t, double dt) {
    const double r = t / dt;
    return std::abs(r - std::round(r)) <= 1e-9 * std::max(1.0, r);
}

} // namespace

void set_option(RunConfig& cfg, const std::string& key, const std::string& value) {
    const auto& table = setters();
    const auto it = table.find(trim(key));
    if (it == table.end()) throw ConfigError("config: unknown key '" + key + "'");
    it->second(cfg, it->first, value);
}

void load_config(RunConfig& cfg, std::istream& in, const std::string& origin) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
        try {
            set_option(cfg, line.substr(0, eq), line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

void load_config_file(RunConfig& cfg, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    load_config(cfg, in, path.string());
}

void RunConfig::validate() const {
    try {
        probe().validate();
        quad.validate();
        stencil.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (alpha_count == 0 || temp_count == 0) throw ConfigError("config: sweep counts must be >= 1");
    if (!(alpha_min >= 0.0 && alpha_max <= 1.0 && alpha_min <= alpha_max) ||
        (alpha_count > 1 && !(alpha_min < alpha_max)))
        throw ConfigError("config: alpha range must be increasing within [0, 1]");
    if (!(temp_min > 0.0 && temp_min <= temp_max) || (temp_count > 1 && !(temp_min < temp_max)))
        throw ConfigError("config: temperature range must be positive and increasing");
    // keep every stencil shift positive
    if (!(temp_min - 2.0 * stencil.delta_rel * temp_min > 0.0))
        throw ConfigError("config: temp_min too small for the stencil step");
    if (!(window_frac > 0.0 && window_frac <= 1.0)) throw ConfigError("config: window_frac must lie in (0, 1]");
    if (!(rise_tol >= 0.0) || !(conv_tol > 0.0)) throw ConfigError("config: witness tolerances invalid");
    if (!(fit_temp_min > 0.0 && fit_temp_min < fit_temp_max))
        throw ConfigError("config: fit window must be positive and increasing");
    if (workers == 0) throw ConfigError("config: workers must be >= 1");
}

void RunConfig::validate_times() const {
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] > 0.0 && times[i] <= t_end * (1 + 1e-12)))
            throw ConfigError("config: probing times must lie in (0, t_end]");
        if (i > 0 && !(times[i] > times[i - 1]))
            throw ConfigError("config: probing times must be strictly increasing");
        if (!on_grid(times[i], dt)) throw ConfigError("config: probing times must be multiples of dt");
    }
}

ProbeConfig RunConfig::probe(double alpha_value, double T_value) const {
    ProbeConfig p;
    p.epsilon = epsilon;
    p.alpha = alpha_value;
    p.T = T_value;
    p.sd = SpectralDensity{eta, omega_c};
    p.t_end = t_end;
    p.dt = dt;
    return p;
}

std::vector<double> RunConfig::alpha_grid() const {
    std::vector<double> g(alpha_count);
    for (std::size_t i = 0; i < alpha_count; ++i)
        g[i] = alpha_count == 1 ? alpha_min
                                : alpha_min + (alpha_max - alpha_min) * static_cast<double>(i) /
                                                  static_cast<double>(alpha_count - 1);
    if (alpha_count > 1) g.back() = alpha_max;
    return g;
}

std::vector<double> RunConfig::temperature_grid() const {
    std::vector<double> g(temp_count);
    for (std::size_t i = 0; i < temp_count; ++i) {
        const double f = temp_count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(temp_count - 1);
        g[i] = temp_log ? temp_min * std::pow(temp_max / temp_min, f) : temp_min + (temp_max - temp_min) * f;
    }
    g.front() = temp_min;
    if (temp_count > 1) g.back() = temp_max;
    return g;
}

unsigned default_workers() {
    return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace ncthermo::app
