#include "impulse_games/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace impulse_games {

namespace {

constexpr int kPanelW = 520;
constexpr int kPanelH = 420;
constexpr int kMarginL = 64;
constexpr int kMarginR = 18;
constexpr int kMarginT = 40;
constexpr int kMarginB = 52;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void include(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (!(lo < hi)) {
            lo -= 1;
            hi += 1;
        } else {
            const double m = 0.05 * (hi - lo);
            lo -= m;
            hi += m;
        }
    }
};

std::vector<double> ticks(double lo, double hi, int target = 5) {
    const double span = hi - lo;
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double mult : {1.0, 2.0, 5.0, 10.0}) {
        if (mag * mult >= raw) {
            step = mag * mult;
            break;
        }
    }
    std::vector<double> out;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-12 * span; t += step)
        out.push_back(t);
    return out;
}

} // namespace

std::string SvgPlot::render() const {
    if (panels_.empty()) throw std::logic_error("no panels to render");
    const int width = kPanelW * static_cast<int>(panels_.size());
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << kPanelH << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"" << width << "\" height=\"" << kPanelH << "\" fill=\"white\"/>\n";

    for (size_t pi = 0; pi < panels_.size(); ++pi) {
        const auto& panel = panels_[pi];
        const double x0 = kPanelW * pi + kMarginL;
        const double y0 = kMarginT;
        const double plot_w = kPanelW - kMarginL - kMarginR;
        const double plot_h = kPanelH - kMarginT - kMarginB;

        auto tx = [&](double v) { return panel.log_x ? std::log10(v) : v; };
        auto ty = [&](double v) { return panel.log_y ? std::log10(v) : v; };

        Range rx, ry;
        for (const auto& s : panel.series)
            for (size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(tx(s.x[i])) || !std::isfinite(ty(s.y[i]))) continue;
                rx.include(tx(s.x[i]));
                ry.include(ty(s.y[i]));
            }
        rx.pad();
        ry.pad();

        auto px = [&](double v) { return x0 + (tx(v) - rx.lo) / (rx.hi - rx.lo) * plot_w; };
        auto py = [&](double v) { return y0 + plot_h - (ty(v) - ry.lo) / (ry.hi - ry.lo) * plot_h; };

        svg << "<g>\n";
        svg << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << plot_w
            << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#333\"/>\n";
        svg << "<text x=\"" << x0 + plot_w / 2 << "\" y=\"" << y0 - 16
            << "\" text-anchor=\"middle\" font-size=\"14\">" << panel.title << "</text>\n";
        svg << "<text x=\"" << x0 + plot_w / 2 << "\" y=\"" << y0 + plot_h + 36
            << "\" text-anchor=\"middle\">" << panel.x_label << "</text>\n";
        svg << "<text x=\"" << x0 - 46 << "\" y=\"" << y0 + plot_h / 2
            << "\" text-anchor=\"middle\" transform=\"rotate(-90 " << x0 - 46 << " "
            << y0 + plot_h / 2 << ")\">" << panel.y_label << "</text>\n";

        for (double t : ticks(rx.lo, rx.hi)) {
            const double gx = x0 + (t - rx.lo) / (rx.hi - rx.lo) * plot_w;
            svg << "<line x1=\"" << gx << "\" y1=\"" << y0 << "\" x2=\"" << gx << "\" y2=\""
                << y0 + plot_h << "\" stroke=\"#ddd\"/>\n";
            svg << "<text x=\"" << gx << "\" y=\"" << y0 + plot_h + 16
                << "\" text-anchor=\"middle\">" << (panel.log_x ? "1e" + fmt(t) : fmt(t))
                << "</text>\n";
        }
        for (double t : ticks(ry.lo, ry.hi)) {
            const double gy = y0 + plot_h - (t - ry.lo) / (ry.hi - ry.lo) * plot_h;
            svg << "<line x1=\"" << x0 << "\" y1=\"" << gy << "\" x2=\"" << x0 + plot_w
                << "\" y2=\"" << gy << "\" stroke=\"#ddd\"/>\n";
            svg << "<text x=\"" << x0 - 6 << "\" y=\"" << gy + 4
                << "\" text-anchor=\"end\">" << (panel.log_y ? "1e" + fmt(t) : fmt(t))
                << "</text>\n";
        }

        for (size_t si = 0; si < panel.series.size(); ++si) {
            const auto& s = panel.series[si];
            const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
            svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
            for (size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(tx(s.x[i])) || !std::isfinite(ty(s.y[i]))) continue;
                svg << px(s.x[i]) << "," << py(s.y[i]) << " ";
            }
            svg << "\"/>\n";
            const double ly = y0 + 16 + 16 * si;
            svg << "<rect x=\"" << x0 + 10 << "\" y=\"" << ly - 9
                << "\" width=\"12\" height=\"4\" fill=\"" << color << "\"/>\n";
            svg << "<text x=\"" << x0 + 28 << "\" y=\"" << ly - 2 << "\">" << s.label
                << "</text>\n";
        }

        if (!panel.annotation.empty()) {
            svg << "<text x=\"" << x0 + plot_w - 8 << "\" y=\"" << y0 + plot_h - 10
                << "\" text-anchor=\"end\" fill=\"#555\">" << panel.annotation << "</text>\n";
        }
        svg << "</g>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void SvgPlot::write_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << render();
}

} // namespace impulse_games
