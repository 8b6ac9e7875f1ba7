#include "covsim/density.hpp"

#include <cmath>

namespace covsim {

double TargetRegion::squared_distance_to(Point p) const {
    double cx = p.x;
    if (cx < min_corner.x) cx = min_corner.x;
    if (cx > max_corner.x) cx = max_corner.x;
    double cy = p.y;
    if (cy < min_corner.y) cy = min_corner.y;
    if (cy > max_corner.y) cy = max_corner.y;
    const double dx = p.x - cx;
    const double dy = p.y - cy;
    return dx * dx + dy * dy;
}

DetectionState update_detection(std::span<const Point> positions, const SensorModel& sensor,
                                std::span<const TargetRegion> targets) {
    DetectionState state;
    state.flags.resize(positions.size(), 0);
    state.detected_regions.resize(positions.size());
    const double r2 = sensor.radius * sensor.radius;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        for (const TargetRegion& t : targets) {
            if (t.squared_distance_to(positions[i]) <= r2) {
                state.detected_regions[i].push_back(t.id);
            }
        }
        state.flags[i] = state.detected_regions[i].empty() ? 0 : 1;
    }
    return state;
}

DensityField build_density(const DetectionState& detection, std::span<const Point> positions,
                           const DensityParams& params, std::span<const TargetRegion> targets) {
    DensityField field;
    field.baseline = params.baseline;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (!detection.flags[i]) continue;
        field.components.push_back({params.weight_for(i), params.sigma_x_for(i),
                                    params.sigma_y_for(i), positions[i]});
    }
    if (params.mask_mode == MaskMode::detected_region_boost) {
        field.region_bonus = params.region_bonus;
        for (const TargetRegion& t : targets) {
            bool detected = false;
            for (const auto& ids : detection.detected_regions) {
                for (int id : ids) {
                    if (id == t.id) {
                        detected = true;
                        break;
                    }
                }
                if (detected) break;
            }
            if (detected) field.boosted_regions.push_back(t);
        }
    }
    return field;
}

double evaluate_density(const DensityField& field, Point pt) {
    double phi = field.baseline;
    for (const GaussianComponent& c : field.components) {
        phi += detail::eval_component(detail::compile_component(c), pt.x, pt.y);
    }
    for (const TargetRegion& t : field.boosted_regions) {
        if (t.contains(pt)) phi += field.region_bonus;
    }
    return phi;
}

}  // namespace covsim
