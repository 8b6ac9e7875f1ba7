#include "covsim/coverage.hpp"

#include <cmath>
#include <vector>

#include "covsim/errors.hpp"

namespace covsim {

namespace {

struct EdgeTest {
    double vx, vy;   // edge start
    double ex, ey;   // edge vector
    double thr;      // -tol * edge length
};

// Same predicate as point_in_polygon with the per-edge constants hoisted.
std::vector<EdgeTest> compile_edges(const ConvexPolygon& poly) {
    std::vector<EdgeTest> edges;
    const std::size_t n = poly.size();
    edges.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const Point& v = poly[k];
        const Point& w = poly[(k + 1) % n];
        const double ex = w.x - v.x;
        const double ey = w.y - v.y;
        const double len = std::sqrt(ex * ex + ey * ey);
        if (len <= kGeomTol) continue;
        edges.push_back({v.x, v.y, ex, ey, -kGeomTol * len});
    }
    return edges;
}

inline bool inside(const std::vector<EdgeTest>& edges, double qx, double qy) {
    for (const EdgeTest& e : edges) {
        if (e.ex * (qy - e.vy) - e.ey * (qx - e.vx) < e.thr) return false;
    }
    return true;
}

struct RawSums {
    double m = 0.0, mx = 0.0, my = 0.0, m2 = 0.0;
    long covered = 0;
};

// Interior half-plane of one polygon edge, a.q <= b.
struct HalfPlane {
    double ax, ay, b;
};

std::vector<HalfPlane> edge_halfplanes(const ConvexPolygon& poly) {
    std::vector<HalfPlane> hps;
    const std::size_t n = poly.size();
    hps.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const Point& v = poly[k];
        const Point& w = poly[(k + 1) % n];
        const double ex = w.x - v.x;
        const double ey = w.y - v.y;
        if (std::sqrt(ex * ex + ey * ey) <= kGeomTol) continue;
        hps.push_back({ey, -ex, ey * v.x - ex * v.y});
    }
    return hps;
}

// Clips an axis-aligned grid cell against the polygon half-planes without
// allocating. Buffers hold at most 4 + one vertex per clip.
int clip_grid_cell(const std::vector<HalfPlane>& hps, double x0, double y0, double x1, double y1,
                   double* outx, double* outy) {
    double bufx[2][24], bufy[2][24];
    bufx[0][0] = x0; bufy[0][0] = y0;
    bufx[0][1] = x1; bufy[0][1] = y0;
    bufx[0][2] = x1; bufy[0][2] = y1;
    bufx[0][3] = x0; bufy[0][3] = y1;
    int n = 4;
    int cur = 0;
    for (const HalfPlane& hp : hps) {
        const int nxt = 1 - cur;
        int m = 0;
        for (int k = 0; k < n; ++k) {
            const int k1 = (k + 1) % n;
            const double dc = hp.b - (hp.ax * bufx[cur][k] + hp.ay * bufy[cur][k]);
            const double dn = hp.b - (hp.ax * bufx[cur][k1] + hp.ay * bufy[cur][k1]);
            if (dc >= 0.0) {
                bufx[nxt][m] = bufx[cur][k];
                bufy[nxt][m] = bufy[cur][k];
                ++m;
            }
            if ((dc > 0.0 && dn < 0.0) || (dc < 0.0 && dn > 0.0)) {
                const double t = dc / (dc - dn);
                bufx[nxt][m] = bufx[cur][k] + t * (bufx[cur][k1] - bufx[cur][k]);
                bufy[nxt][m] = bufy[cur][k] + t * (bufy[cur][k1] - bufy[cur][k]);
                ++m;
            }
        }
        cur = nxt;
        n = m;
        if (n == 0) break;
    }
    for (int k = 0; k < n; ++k) {
        outx[k] = bufx[cur][k];
        outy[k] = bufy[cur][k];
    }
    return n;
}

// Midpoint samples on interior grid cells; boundary-straddling cells are
// clipped exactly and sampled at the centroid of the covered piece, which
// integrates constant and linear fields without a masking bias.
RawSums accumulate_grid(const ConvexPolygon& poly, const DensityField& field, int resolution) {
    Point lo, hi;
    poly.bounding_box(lo, hi);
    const double hx = (hi.x - lo.x) / resolution;
    const double hy = (hi.y - lo.y) / resolution;

    std::vector<detail::CompiledComponent> comps;
    comps.reserve(field.components.size());
    for (const GaussianComponent& c : field.components) {
        comps.push_back(detail::compile_component(c));
    }
    const std::vector<EdgeTest> edges = compile_edges(poly);
    const std::vector<HalfPlane> hps = edge_halfplanes(poly);

    // Corner inclusion flags, shared between neighboring grid cells. Corners
    // of a convex polygon bound their cell: four inside corners imply the
    // whole cell is inside.
    const int stride = resolution + 1;
    std::vector<std::uint8_t> corner(static_cast<std::size_t>(stride) * stride);
    for (int jy = 0; jy <= resolution; ++jy) {
        const double cy = lo.y + jy * hy;
        for (int jx = 0; jx <= resolution; ++jx) {
            const double cx = lo.x + jx * hx;
            corner[static_cast<std::size_t>(jy) * stride + jx] = inside(edges, cx, cy) ? 1 : 0;
        }
    }

    const double w_full = hx * hy;
    RawSums total;
    double clipx[24], clipy[24];
    for (int iy = 0; iy < resolution; ++iy) {
        const double y0 = lo.y + iy * hy;
        const double y1 = lo.y + (iy + 1) * hy;
        const double qy_mid = lo.y + (iy + 0.5) * hy;
        const std::uint8_t* row_lo = corner.data() + static_cast<std::size_t>(iy) * stride;
        const std::uint8_t* row_hi = row_lo + stride;
        RawSums row;
        for (int ix = 0; ix < resolution; ++ix) {
            double w, qx, qy;
            if (row_lo[ix] && row_lo[ix + 1] && row_hi[ix] && row_hi[ix + 1]) {
                w = w_full;
                qx = lo.x + (ix + 0.5) * hx;
                qy = qy_mid;
            } else {
                const double x0 = lo.x + ix * hx;
                const double x1 = lo.x + (ix + 1) * hx;
                const int nv = clip_grid_cell(hps, x0, y0, x1, y1, clipx, clipy);
                if (nv < 3) continue;
                double a2 = 0.0, cx = 0.0, cy = 0.0;
                for (int k = 0; k < nv; ++k) {
                    const int k1 = (k + 1) % nv;
                    const double c = clipx[k] * clipy[k1] - clipx[k1] * clipy[k];
                    a2 += c;
                    cx += (clipx[k] + clipx[k1]) * c;
                    cy += (clipy[k] + clipy[k1]) * c;
                }
                if (!(a2 > 0.0)) continue;
                w = 0.5 * a2;
                qx = cx / (3.0 * a2);
                qy = cy / (3.0 * a2);
            }
            double phi = field.baseline;
            for (const detail::CompiledComponent& c : comps) {
                phi += detail::eval_component(c, qx, qy);
            }
            for (const TargetRegion& t : field.boosted_regions) {
                if (t.contains({qx, qy})) phi += field.region_bonus;
            }
            const double wphi = w * phi;
            row.m += wphi;
            row.mx += wphi * qx;
            row.my += wphi * qy;
            row.m2 += wphi * (qx * qx + qy * qy);
            ++row.covered;
        }
        total.m += row.m;
        total.mx += row.mx;
        total.my += row.my;
        total.m2 += row.m2;
        total.covered += row.covered;
    }
    return total;
}

// Shoelace centroid, used only when every grid midpoint misses the polygon.
Point area_centroid(const ConvexPolygon& poly) {
    const std::size_t n = poly.size();
    double a2 = 0.0, cx = 0.0, cy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const Point& v = poly[k];
        const Point& w = poly[(k + 1) % n];
        const double c = v.x * w.y - w.x * v.y;
        a2 += c;
        cx += (v.x + w.x) * c;
        cy += (v.y + w.y) * c;
    }
    if (a2 == 0.0) return poly[0];
    return {cx / (3.0 * a2), cy / (3.0 * a2)};
}

}  // namespace

CellQuadrature integrate_cell(const VoronoiCell& cell, const DensityField& field,
                              int resolution) {
    if (cell.region.empty()) throw EmptyCellError();

    int res = resolution;
    while (true) {
        const RawSums s = accumulate_grid(cell.region, field, res);
        if (s.covered > 0) {
            return {s.m, s.mx, s.my, s.m2};
        }
        if (res >= 1024) break;
        res *= 2;
    }
    // Degenerate sliver: integrate as area times the density at the centroid.
    const Point c = area_centroid(cell.region);
    const double phi = evaluate_density(field, c);
    const double mass = polygon_area(cell.region) * phi;
    return {mass, mass * c.x, mass * c.y, mass * (c.x * c.x + c.y * c.y)};
}

CellMoment cell_moment(const VoronoiCell& cell, const DensityField& field, int resolution) {
    return integrate_cell(cell, field, resolution).moment();
}

double locational_cost(std::span<const VoronoiCell> cells, std::span<const Point> positions,
                       const DensityField& field, int resolution) {
    double total = 0.0;
    for (const VoronoiCell& cell : cells) {
        total += integrate_cell(cell, field, resolution).cost_about(positions[cell.owner]);
    }
    return total;
}

ControlInput nominal_control(Point position, Point centroid, double gain) {
    return {-gain * (position.x - centroid.x), -gain * (position.y - centroid.y)};
}

}  // namespace covsim
