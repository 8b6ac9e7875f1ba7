#pragma once

#include <span>
#include <vector>

#include "covsim/coverage.hpp"
#include "covsim/geometry.hpp"

namespace covsim {

struct SafetyParams {
    double d_min = 0.5;  // meters
    double gamma = 1.0;  // 1/s
};

/// One linearized pairwise barrier row of the joint program:
///   grad_i . u_i + grad_j . u_j + offset >= 0
/// with grad_i = 2 (p_i - p_j), grad_j = -grad_i and offset = gamma * h_ij.
struct SafetyConstraint {
    int i = 0;
    int j = 0;
    Point grad_i;
    Point grad_j;
    double offset = 0.0;
};

struct QpOptions {
    /// Componentwise speed bound added as box rows; disabled when <= 0.
    double u_max = 0.0;
    /// Active row indices from the previous solve; tried as the initial
    /// working set and discarded if no longer consistent.
    std::vector<int> warm_start;
    /// Agent positions. Only consulted when the zero input is infeasible
    /// (some h_ij < 0) to build a radially expanding feasible start.
    std::vector<Point> retreat_hint;
    int max_iterations = 200;
};

struct QpSolution {
    std::vector<ControlInput> inputs;
    /// Indices of rows active at the solution: 0..m-1 are the barrier rows in
    /// the order given, m.. are box rows (per variable: lower, then upper).
    std::vector<int> active_set;
    double kkt_residual = 0.0;
};

/// h_ij = ||p_i - p_j||^2 - d_min^2
double barrier_value(Point pi, Point pj, double d_min);

/// One constraint per unordered pair (i < j, lexicographic order).
/// Throws CoincidentAgentsError when a gradient vanishes.
std::vector<SafetyConstraint> assemble_constraints(std::span<const Point> positions,
                                                   const SafetyParams& params);

/// Minimally invasive filter: the stacked input u in R^{2N} closest to the
/// nominal input satisfying every barrier (and box) row. Dense primal
/// active-set method; deterministic for identical inputs.
QpSolution solve_safety_qp(std::span<const ControlInput> nominal,
                           std::span<const SafetyConstraint> constraints,
                           const QpOptions& options = {});

}  // namespace covsim
