#include "onss/regions.hpp"

#include <limits>
#include <stdexcept>

namespace onss {

const char* to_string(RegionType t) {
    switch (t) {
        case RegionType::Unknown: return "UR";
        case RegionType::Safe: return "SR";
        case RegionType::Critical: return "CR";
        case RegionType::Detection: return "DR";
        case RegionType::Target: return "TR";
    }
    return "?";
}

RegionType classify(const RegionMap& map, Vec2 p) {
    if (!map.workspace.contains(p)) {
        throw std::domain_error("classify: point outside workspace");
    }
    double nearest = std::numeric_limits<double>::infinity();
    for (const Region& cr : map.crs) {
        double d = dist(p, cr.center) - cr.radius;
        if (d < nearest) nearest = d;
    }
    if (nearest <= 0.0) return RegionType::Critical;
    if (nearest <= map.dr_width) return RegionType::Detection;
    if (dist(p, map.tr.center) <= map.tr.radius) return RegionType::Target;
    if (map.known_safe.contains(cell_key(map.cell_of(p)))) return RegionType::Safe;
    return RegionType::Unknown;
}

RegionMap add_discovered_cr(const RegionMap& map, Vec2 est_center, double assumed_radius) {
    if (assumed_radius <= 0.0) {
        throw std::invalid_argument("add_discovered_cr: radius must be positive");
    }
    RegionMap out = map;
    out.crs.push_back({est_center, assumed_radius, RegionType::Critical});
    // Forget safe cells now covered by the new disc or its annulus.
    double blocked = assumed_radius + out.dr_width;
    std::erase_if(out.known_safe, [&](std::uint64_t key) {
        Cell c{static_cast<int>(static_cast<std::int32_t>(key >> 32)),
               static_cast<int>(static_cast<std::int32_t>(key & 0xffffffffu))};
        return dist(out.cell_center(c), est_center) <= blocked;
    });
    return out;
}

RegionMap mark_safe(const RegionMap& map, std::span<const Cell> cells) {
    RegionMap out = map;
    for (Cell c : cells) {
        Vec2 center = out.cell_center(c);
        if (!out.workspace.contains(center)) {
            throw std::domain_error("mark_safe: cell outside workspace");
        }
        if (classify(out, center) == RegionType::Unknown) {
            out.known_safe.insert(cell_key(c));
        }
    }
    return out;
}

bool validate_margins(const RegionMap& map, double max_step, double max_sensor_error) {
    if (max_step <= 0.0) {
        throw std::invalid_argument("validate_margins: max_step must be positive");
    }
    return map.dr_width > max_step + max_sensor_error;
}

double min_clearance(const RegionMap& map, std::span<const Vec2> path) {
    if (path.empty()) {
        throw std::invalid_argument("min_clearance: empty path");
    }
    if (map.crs.empty()) return kNoCrClearance;
    double best = std::numeric_limits<double>::infinity();
    for (Vec2 p : path) {
        for (const Region& cr : map.crs) {
            best = std::min(best, dist(p, cr.center) - cr.radius);
        }
    }
    return best;
}

}  // namespace onss
