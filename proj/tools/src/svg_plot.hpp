// svg_plot.hpp: minimal line-plot writer for quick-look figures

#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace ncthermo::app {

enum class Stroke { Solid, Dashed, Dotted };

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    Stroke stroke{Stroke::Solid};
    bool markers{false};
};

struct Plot {
    Plot(std::string t, std::string x, std::string y)
        : title(std::move(t)), xlabel(std::move(x)), ylabel(std::move(y)) {}

    std::string title;
    std::string xlabel;
    std::string ylabel;
    bool log_x{false};
    bool log_y{false};
    std::vector<Series> series;

    Series& add(std::string label, std::vector<double> x, std::vector<double> y,
                Stroke stroke = Stroke::Solid);

    // Non-finite points (and non-positive ones on log axes) are skipped.
    std::string render(int width = 640, int height = 420) const;
    void write(const std::filesystem::path& path) const;
};

} // namespace ncthermo::app
