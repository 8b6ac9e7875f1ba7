#include "covsim/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "covsim/errors.hpp"

namespace covsim {

namespace {

constexpr int kPanelSize = 500;
constexpr int kMargin = 24;
constexpr int kGap = 48;
constexpr int kHeatmapCells = 128;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

struct Mapper {
    double min_x, max_y, scale, off_x, off_y;
    double x(double wx) const { return off_x + (wx - min_x) * scale; }
    double y(double wy) const { return off_y + (max_y - wy) * scale; }
};

// Dark-to-warm color ramp for the density panel.
std::string heat_color(double t) {
    static const double stops[5][3] = {{0.05, 0.03, 0.20},
                                       {0.35, 0.05, 0.38},
                                       {0.80, 0.20, 0.25},
                                       {0.98, 0.65, 0.15},
                                       {0.99, 0.98, 0.80}};
    t = std::clamp(t, 0.0, 1.0);
    const double pos = t * 4.0;
    const int lo = std::min(3, static_cast<int>(pos));
    const double f = pos - lo;
    char buf[8];
    unsigned rgb[3];
    for (int c = 0; c < 3; ++c) {
        const double v = stops[lo][c] + f * (stops[lo + 1][c] - stops[lo][c]);
        rgb[c] = static_cast<unsigned>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
    }
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
    return buf;
}

}  // namespace

std::string render_snapshot_svg(const SwarmState& state, const DensityField& field,
                                const ScenarioConfig& config) {
    const Workspace& ws = config.workspace;
    const double scale = kPanelSize / std::max(ws.width(), ws.height());
    const double panel_w = ws.width() * scale;
    const double panel_h = ws.height() * scale;
    const double total_w = 2 * kMargin + 2 * panel_w + kGap;
    const double total_h = 2 * kMargin + panel_h + 20;

    const Mapper left{ws.min_corner.x, ws.max_corner.y, scale, kMargin, kMargin};
    const Mapper right{ws.min_corner.x, ws.max_corner.y, scale, kMargin + panel_w + kGap,
                       kMargin};

    std::string svg;
    svg.reserve(1 << 20);
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(total_w) + "\" height=\"" +
           fmt(total_h) + "\" viewBox=\"0 0 " + fmt(total_w) + " " + fmt(total_h) + "\">\n";

    char label[64];
    std::snprintf(label, sizeof label, "t = %.2f s", state.time);
    svg += "<text class=\"label\" x=\"" + fmt(kMargin) + "\" y=\"" +
           fmt(kMargin + panel_h + 16) + "\" font-family=\"sans-serif\" font-size=\"13\">" +
           label + "</text>\n";

    // Left panel: workspace, targets, cells, sensor disks, agents.
    svg += "<rect class=\"workspace\" x=\"" + fmt(left.x(ws.min_corner.x)) + "\" y=\"" +
           fmt(left.y(ws.max_corner.y)) + "\" width=\"" + fmt(panel_w) + "\" height=\"" +
           fmt(panel_h) + "\" fill=\"#d4d4d4\" stroke=\"#404040\" stroke-width=\"1\"/>\n";
    for (const TargetRegion& t : config.targets) {
        svg += "<rect class=\"target\" x=\"" + fmt(left.x(t.min_corner.x)) + "\" y=\"" +
               fmt(left.y(t.max_corner.y)) + "\" width=\"" +
               fmt((t.max_corner.x - t.min_corner.x) * scale) + "\" height=\"" +
               fmt((t.max_corner.y - t.min_corner.y) * scale) +
               "\" fill=\"#e03030\" fill-opacity=\"0.85\"/>\n";
    }
    for (const VoronoiCell& cell : state.cells) {
        if (cell.region.empty()) continue;
        svg += "<polygon class=\"cell\" points=\"";
        bool first = true;
        for (const Point& v : cell.region.vertices()) {
            if (!first) svg += " ";
            first = false;
            svg += fmt(left.x(v.x)) + "," + fmt(left.y(v.y));
        }
        svg += "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
    }
    for (const Point& p : state.positions) {
        svg += "<circle class=\"sensor\" cx=\"" + fmt(left.x(p.x)) + "\" cy=\"" +
               fmt(left.y(p.y)) + "\" r=\"" + fmt(config.sensor.radius * scale) +
               "\" fill=\"none\" stroke=\"#e03030\" stroke-width=\"1.2\"/>\n";
    }
    for (const Point& p : state.positions) {
        svg += "<circle class=\"agent\" cx=\"" + fmt(left.x(p.x)) + "\" cy=\"" +
               fmt(left.y(p.y)) + "\" r=\"4\" fill=\"#000000\"/>\n";
    }

    // Right panel: density heatmap on a fixed grid.
    double phi_min = 0.0, phi_max = 0.0;
    bool seeded = false;
    std::vector<double> values(static_cast<std::size_t>(kHeatmapCells) * kHeatmapCells);
    const double cw = ws.width() / kHeatmapCells;
    const double ch = ws.height() / kHeatmapCells;
    for (int iy = 0; iy < kHeatmapCells; ++iy) {
        const double qy = ws.min_corner.y + (iy + 0.5) * ch;
        for (int ix = 0; ix < kHeatmapCells; ++ix) {
            const double qx = ws.min_corner.x + (ix + 0.5) * cw;
            const double phi = evaluate_density(field, {qx, qy});
            if (!seeded) {
                phi_min = phi_max = phi;
                seeded = true;
            } else {
                phi_min = std::min(phi_min, phi);
                phi_max = std::max(phi_max, phi);
            }
            values[static_cast<std::size_t>(iy) * kHeatmapCells + ix] = phi;
        }
    }
    const double span = phi_max > phi_min ? phi_max - phi_min : 1.0;
    const double px_w = panel_w / kHeatmapCells;
    const double px_h = panel_h / kHeatmapCells;
    for (int iy = 0; iy < kHeatmapCells; ++iy) {
        for (int ix = 0; ix < kHeatmapCells; ++ix) {
            const double phi = values[static_cast<std::size_t>(iy) * kHeatmapCells + ix];
            const double t = (phi - phi_min) / span;
            // SVG rows run top-down; grid rows run bottom-up.
            const double x = right.off_x + ix * px_w;
            const double y = right.off_y + (kHeatmapCells - 1 - iy) * px_h;
            svg += "<rect class=\"density\" x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" width=\"" +
                   fmt(px_w + 0.05) + "\" height=\"" + fmt(px_h + 0.05) + "\" fill=\"" +
                   heat_color(t) + "\"/>\n";
        }
    }
    svg += "<rect class=\"heatmap-frame\" x=\"" + fmt(right.off_x) + "\" y=\"" +
           fmt(right.off_y) + "\" width=\"" + fmt(panel_w) + "\" height=\"" + fmt(panel_h) +
           "\" fill=\"none\" stroke=\"#404040\" stroke-width=\"1\"/>\n";
    svg += "</svg>\n";
    return svg;
}

void render_snapshot(const SwarmState& state, const DensityField& field,
                     const ScenarioConfig& config, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path.string(), "cannot open for writing");
    out << render_snapshot_svg(state, field, config);
    if (!out) throw IoError(path.string(), "write failed");
}

}  // namespace covsim
