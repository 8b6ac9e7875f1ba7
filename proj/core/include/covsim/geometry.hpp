#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace covsim {

/// Collinearity / duplicate-vertex tolerance used throughout the geometry layer, in meters.
inline constexpr double kGeomTol = 1e-9;

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
inline bool operator==(Point a, Point b) { return a.x == b.x && a.y == b.y; }

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double squared_distance(Point a, Point b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}
inline double distance(Point a, Point b) { return std::sqrt(squared_distance(a, b)); }
inline bool is_finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

struct Workspace {
    Point min_corner;
    Point max_corner;

    double width() const { return max_corner.x - min_corner.x; }
    double height() const { return max_corner.y - min_corner.y; }
    double area() const { return width() * height(); }
    bool contains(Point p) const {
        return p.x >= min_corner.x && p.x <= max_corner.x && p.y >= min_corner.y &&
               p.y <= max_corner.y;
    }
    Point clamp(Point p) const;
};

/// Convex polygon with counter-clockwise vertex order. An empty vertex list
/// represents the empty region; fewer than three vertices is treated as empty.
class ConvexPolygon {
public:
    ConvexPolygon() = default;
    explicit ConvexPolygon(std::vector<Point> vertices);

    static ConvexPolygon rectangle(Point lo, Point hi);

    bool empty() const { return vertices_.size() < 3; }
    std::size_t size() const { return vertices_.size(); }
    std::span<const Point> vertices() const { return vertices_; }
    const Point& operator[](std::size_t i) const { return vertices_[i]; }

    /// Axis-aligned bounding box; undefined for the empty polygon.
    void bounding_box(Point& lo, Point& hi) const;

private:
    std::vector<Point> vertices_;
};

struct VoronoiCell {
    int owner = -1;
    ConvexPolygon region;
};

/// Intersects `poly` with the half-plane {q : a·q <= b}. The result keeps
/// counter-clockwise order; it may be empty.
ConvexPolygon clip_halfplane(const ConvexPolygon& poly, Point a, double b);

/// Bounded Voronoi tessellation: one cell per site, each the intersection of
/// the workspace rectangle with the site's dominance half-planes.
/// Throws DuplicateSitesError or SiteOutsideWorkspaceError on bad input.
std::vector<VoronoiCell> voronoi_tessellation(std::span<const Point> sites,
                                              const Workspace& workspace);

/// Shoelace area; non-negative for counter-clockwise polygons, 0 when empty.
double polygon_area(const ConvexPolygon& poly);

/// Boundary-inclusive containment test with a 1e-9 m tolerance band.
bool point_in_polygon(Point pt, const ConvexPolygon& poly);

}  // namespace covsim
