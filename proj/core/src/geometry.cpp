#include "covsim/geometry.hpp"

#include <algorithm>

#include "covsim/errors.hpp"

namespace covsim {

Point Workspace::clamp(Point p) const {
    Point q = p;
    if (q.x < min_corner.x) q.x = min_corner.x;
    if (q.x > max_corner.x) q.x = max_corner.x;
    if (q.y < min_corner.y) q.y = min_corner.y;
    if (q.y > max_corner.y) q.y = max_corner.y;
    return q;
}

namespace {

// Drops consecutive vertices closer than the merge tolerance, wrapping around.
std::vector<Point> merge_close_vertices(std::vector<Point> verts) {
    if (verts.size() < 2) return verts;
    std::vector<Point> out;
    out.reserve(verts.size());
    for (const Point& v : verts) {
        if (out.empty() || squared_distance(out.back(), v) > kGeomTol * kGeomTol) {
            out.push_back(v);
        }
    }
    while (out.size() >= 2 &&
           squared_distance(out.front(), out.back()) <= kGeomTol * kGeomTol) {
        out.pop_back();
    }
    return out;
}

}  // namespace

ConvexPolygon::ConvexPolygon(std::vector<Point> vertices)
    : vertices_(merge_close_vertices(std::move(vertices))) {
    if (vertices_.size() < 3) vertices_.clear();
}

ConvexPolygon ConvexPolygon::rectangle(Point lo, Point hi) {
    return ConvexPolygon({{lo.x, lo.y}, {hi.x, lo.y}, {hi.x, hi.y}, {lo.x, hi.y}});
}

void ConvexPolygon::bounding_box(Point& lo, Point& hi) const {
    lo = hi = vertices_.front();
    for (const Point& v : vertices_) {
        lo.x = std::min(lo.x, v.x);
        lo.y = std::min(lo.y, v.y);
        hi.x = std::max(hi.x, v.x);
        hi.y = std::max(hi.y, v.y);
    }
}

ConvexPolygon clip_halfplane(const ConvexPolygon& poly, Point a, double b) {
    if (poly.empty()) return {};
    const std::size_t n = poly.size();
    std::vector<Point> out;
    out.reserve(n + 1);
    for (std::size_t k = 0; k < n; ++k) {
        const Point& cur = poly[k];
        const Point& nxt = poly[(k + 1) % n];
        const double dc = b - (a.x * cur.x + a.y * cur.y);
        const double dn = b - (a.x * nxt.x + a.y * nxt.y);
        if (dc >= 0.0) out.push_back(cur);
        if ((dc > 0.0 && dn < 0.0) || (dc < 0.0 && dn > 0.0)) {
            const double t = dc / (dc - dn);
            out.push_back({cur.x + t * (nxt.x - cur.x), cur.y + t * (nxt.y - cur.y)});
        }
    }
    return ConvexPolygon(std::move(out));
}

std::vector<VoronoiCell> voronoi_tessellation(std::span<const Point> sites,
                                              const Workspace& workspace) {
    const int n = static_cast<int>(sites.size());
    for (int i = 0; i < n; ++i) {
        if (!workspace.contains(sites[i])) throw SiteOutsideWorkspaceError(i);
        for (int j = i + 1; j < n; ++j) {
            if (squared_distance(sites[i], sites[j]) <= kGeomTol * kGeomTol) {
                throw DuplicateSitesError(i, j);
            }
        }
    }

    const ConvexPolygon box =
        ConvexPolygon::rectangle(workspace.min_corner, workspace.max_corner);
    std::vector<VoronoiCell> cells;
    cells.reserve(sites.size());
    for (int i = 0; i < n; ++i) {
        ConvexPolygon region = box;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            // ||q - p_i|| <= ||q - p_j||  rewritten as  a·q <= b  with the
            // bisector normal a = p_j - p_i through the pair midpoint.
            const Point a = sites[j] - sites[i];
            const double b =
                a.x * ((sites[i].x + sites[j].x) * 0.5) + a.y * ((sites[i].y + sites[j].y) * 0.5);
            region = clip_halfplane(region, a, b);
            if (region.empty()) break;
        }
        cells.push_back({i, std::move(region)});
    }
    return cells;
}

double polygon_area(const ConvexPolygon& poly) {
    if (poly.empty()) return 0.0;
    const std::size_t n = poly.size();
    double twice = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const Point& v = poly[k];
        const Point& w = poly[(k + 1) % n];
        twice += v.x * w.y - w.x * v.y;
    }
    return 0.5 * twice;
}

bool point_in_polygon(Point pt, const ConvexPolygon& poly) {
    if (poly.empty()) return false;
    const std::size_t n = poly.size();
    for (std::size_t k = 0; k < n; ++k) {
        const Point& v = poly[k];
        const Point& w = poly[(k + 1) % n];
        const Point e = w - v;
        const double len = std::sqrt(e.x * e.x + e.y * e.y);
        if (len <= kGeomTol) continue;
        const double c = e.x * (pt.y - v.y) - e.y * (pt.x - v.x);
        if (c < -kGeomTol * len) return false;
    }
    return true;
}

}  // namespace covsim
