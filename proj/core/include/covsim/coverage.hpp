#pragma once

#include <span>

#include "covsim/density.hpp"
#include "covsim/geometry.hpp"

namespace covsim {

struct CellMoment {
    double mass = 0.0;  // integral of phi over the cell
    Point centroid;     // mass-weighted centroid c_i
};

struct ControlInput {
    double ux = 0.0;  // m/s
    double uy = 0.0;  // m/s
};

/// Raw quadrature sums of a cell: mass, first moments, and the trace of the
/// second moment about the origin. Enough to recover the centroid and the
/// squared-distance cost about any reference point in one pass.
struct CellQuadrature {
    double mass = 0.0;
    double moment_x = 0.0;       // integral of q_x phi
    double moment_y = 0.0;       // integral of q_y phi
    double second_trace = 0.0;   // integral of (q_x^2 + q_y^2) phi

    CellMoment moment() const { return {mass, {moment_x / mass, moment_y / mass}}; }
    /// integral over the cell of ||q - ref||^2 phi(q) dq
    double cost_about(Point ref) const {
        return second_trace - 2.0 * (ref.x * moment_x + ref.y * moment_y) +
               (ref.x * ref.x + ref.y * ref.y) * mass;
    }
};

/// Midpoint-rule quadrature on a resolution x resolution grid over the cell's
/// bounding box, masked by point_in_polygon. If the grid is too coarse to hit
/// the cell at all, the resolution is doubled (up to a cap) before falling
/// back to the area centroid of the polygon.
CellQuadrature integrate_cell(const VoronoiCell& cell, const DensityField& field,
                              int resolution);

/// Mass and density-weighted centroid of one cell. Throws EmptyCellError.
CellMoment cell_moment(const VoronoiCell& cell, const DensityField& field, int resolution);

/// Sum over cells of the squared-distance coverage cost, accumulated in cell
/// order so results are independent of execution environment.
double locational_cost(std::span<const VoronoiCell> cells, std::span<const Point> positions,
                       const DensityField& field, int resolution);

/// u = -k (p - c)
ControlInput nominal_control(Point position, Point centroid, double gain);

}  // namespace covsim
