#pragma once

#include <string>
#include <vector>

namespace impulse_games {

/// Static polyline charts written as standalone SVG, no plotting dependency.
/// Panels are laid out horizontally; each carries its own axes and legend.
class SvgPlot {
public:
    struct Series {
        std::string label;
        std::vector<double> x;
        std::vector<double> y;
    };

    struct Panel {
        std::string title;
        std::string x_label;
        std::string y_label;
        std::vector<Series> series;
        bool log_x = false;
        bool log_y = false;
        std::string annotation;  ///< free text drawn inside the plot area
    };

    void add_panel(Panel panel) { panels_.push_back(std::move(panel)); }

    std::string render() const;
    void write_file(const std::string& path) const;

private:
    std::vector<Panel> panels_;
};

} // namespace impulse_games
