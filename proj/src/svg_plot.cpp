#include <algorithm>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "ntw/data_io.hpp"

namespace ntw {
namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 400.0;
constexpr double kMargin = 40.0;

struct Frame {
    double y_min;
    double y_max;
    int z_max;

    double x(int z) const { return kMargin + (kWidth - 2 * kMargin) * z / std::max(z_max, 1); }
    double y(double v) const {
        const double range = y_max > y_min ? y_max - y_min : 1.0;
        return kHeight - kMargin - (kHeight - 2 * kMargin) * (v - y_min) / range;
    }
};

// at most ~2000 vertices per line
std::vector<int> plot_indices(int z_max) {
    const int stride = std::max(1, z_max / 2000);
    std::vector<int> idx;
    for (int z = 0; z < z_max; z += stride) idx.push_back(z);
    idx.push_back(z_max);
    return idx;
}

std::string pt(double x, double y) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", x, y);
    return buf;
}

}  // namespace

std::string render_plot_svg(const AlignedSet& aligned, const std::vector<double>& mean,
                            const std::vector<double>& sd) {
    const int z_max = aligned.z_max();
    Frame f{aligned.values.minCoeff(), aligned.values.maxCoeff(), z_max};
    for (std::size_t z = 0; z < mean.size(); ++z) {
        f.y_min = std::min(f.y_min, mean[z] - sd[z]);
        f.y_max = std::max(f.y_max, mean[z] + sd[z]);
    }

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kWidth - 2 * kMargin
        << "\" height=\"" << kHeight - 2 * kMargin << "\" fill=\"none\" stroke=\"#444\"/>\n";

    // band: upper edge forward, lower edge back
    svg << "<polygon fill=\"#1f77b4\" fill-opacity=\"0.25\" stroke=\"none\" points=\"";
    const auto idx = plot_indices(z_max);
    for (int z : idx) svg << pt(f.x(z), f.y(mean[z] + sd[z]));
    for (auto it = idx.rbegin(); it != idx.rend(); ++it) svg << pt(f.x(*it), f.y(mean[*it] - sd[*it]));
    svg << "\"/>\n";

    for (int i = 0; i < aligned.n_series(); ++i) {
        svg << "<polyline fill=\"none\" stroke=\"#888\" stroke-opacity=\"0.5\" stroke-width=\"1\" "
               "points=\"";
        for (int z : idx) svg << pt(f.x(z), f.y(aligned.values(i, z)));
        svg << "\"/>\n";
    }
    svg << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
    for (int z : idx) svg << pt(f.x(z), f.y(mean[z]));
    svg << "\"/>\n";
    svg << "<text x=\"" << kMargin << "\" y=\"" << kMargin - 10
        << "\" font-family=\"sans-serif\" font-size=\"14\">warped average &#177; SD (N = "
        << aligned.n_series() << ", Z = " << z_max << ")</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace ntw
