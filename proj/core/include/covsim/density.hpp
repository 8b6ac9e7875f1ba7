#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "covsim/geometry.hpp"

namespace covsim {

/// Axis-aligned rectangular target area.
struct TargetRegion {
    int id = 0;
    Point min_corner;
    Point max_corner;

    Point center() const {
        return {(min_corner.x + max_corner.x) * 0.5, (min_corner.y + max_corner.y) * 0.5};
    }
    double area() const {
        return (max_corner.x - min_corner.x) * (max_corner.y - min_corner.y);
    }
    /// Squared Euclidean distance from `p` to the closed rectangle.
    double squared_distance_to(Point p) const;
    bool contains(Point p) const {
        return p.x >= min_corner.x && p.x <= max_corner.x && p.y >= min_corner.y &&
               p.y <= max_corner.y;
    }
};

struct SensorModel {
    double radius = 1.0;
};

struct DetectionState {
    std::vector<std::uint8_t> flags;                // rho_i, one per agent
    std::vector<std::vector<int>> detected_regions; // target ids per agent

    bool all_detected() const {
        for (std::uint8_t f : flags)
            if (!f) return false;
        return !flags.empty();
    }
    int count() const {
        int c = 0;
        for (std::uint8_t f : flags) c += f;
        return c;
    }
};

struct GaussianComponent {
    double weight = 1.0;   // omega, dimensionless
    double sigma_x = 0.5;  // meters
    double sigma_y = 0.5;  // meters
    Point mean;
};

enum class MaskMode { off, detected_region_boost };

struct DensityField {
    double baseline = 0.01;  // phi_0
    std::vector<GaussianComponent> components;
    // Populated only under MaskMode::detected_region_boost.
    std::vector<TargetRegion> boosted_regions;
    double region_bonus = 0.0;
};

/// Per-agent density parameters. The weight/sigma vectors hold either a single
/// value applied to every agent or one value per agent.
struct DensityParams {
    double baseline = 0.01;
    std::vector<double> weights = {10.0};
    std::vector<double> sigma_x = {0.5};
    std::vector<double> sigma_y = {0.5};
    MaskMode mask_mode = MaskMode::off;
    double region_bonus = 5.0;

    double weight_for(std::size_t agent) const {
        return weights.size() == 1 ? weights[0] : weights[agent];
    }
    double sigma_x_for(std::size_t agent) const {
        return sigma_x.size() == 1 ? sigma_x[0] : sigma_x[agent];
    }
    double sigma_y_for(std::size_t agent) const {
        return sigma_y.size() == 1 ? sigma_y[0] : sigma_y[agent];
    }
};

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

namespace detail {

/// Gaussian component with the per-point constants factored out. Both the
/// point evaluator and the cell quadrature go through eval_component, so the
/// two paths produce identical floating-point results.
struct CompiledComponent {
    double amp;
    double inv2x;
    double inv2y;
    double mx;
    double my;
};

inline CompiledComponent compile_component(const GaussianComponent& c) {
    return {c.weight / (kTwoPi * c.sigma_x * c.sigma_y), 1.0 / (c.sigma_x * c.sigma_x),
            1.0 / (c.sigma_y * c.sigma_y), c.mean.x, c.mean.y};
}

inline double eval_component(const CompiledComponent& c, double qx, double qy) {
    const double dx = qx - c.mx;
    const double dy = qy - c.my;
    const double e = 0.5 * (dx * dx * c.inv2x + dy * dy * c.inv2y);
    return c.amp * std::exp(-e);
}

}  // namespace detail

/// rho_i = 1 iff the closed sensor disk about agent i intersects at least one
/// target rectangle; detected_regions[i] lists every intersecting target id.
DetectionState update_detection(std::span<const Point> positions, const SensorModel& sensor,
                                std::span<const TargetRegion> targets);

/// One Gaussian component per detecting agent, centered at the agent's current
/// position. Under detected_region_boost the field also carries the detected
/// target rectangles with a uniform bonus density.
DensityField build_density(const DetectionState& detection, std::span<const Point> positions,
                           const DensityParams& params,
                           std::span<const TargetRegion> targets = {});

double evaluate_density(const DensityField& field, Point pt);

}  // namespace covsim
