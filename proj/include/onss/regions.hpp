#pragma once

#include <cstdint>
#include <span>
#include <unordered_set>
#include <vector>

#include "onss/geometry.hpp"

namespace onss {

// The five region types the workspace is partitioned into. Every in-workspace
// point classifies to exactly one of them, with priority
// Critical > Detection > Target > Safe > Unknown.
enum class RegionType { Unknown, Safe, Critical, Detection, Target };

const char* to_string(RegionType t);

// Disc-shaped workspace region. Only critical and target discs are stored;
// detection regions are derived as an annulus of width dr_width around each
// critical disc, safe cells are tracked explicitly and everything else is
// unknown.
struct Region {
    Vec2 center;
    double radius = 0.0;
    RegionType kind = RegionType::Critical;  // Critical or Target
};

struct Cell {
    int x = 0;
    int y = 0;
    bool operator==(const Cell&) const = default;
};

inline std::uint64_t cell_key(Cell c) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.x)) << 32) |
           static_cast<std::uint32_t>(c.y);
}

// Region-typed view of the workspace. Used both for the ground-truth world
// and for the model's partial knowledge. Update operations return new maps;
// a RegionMap is never mutated in place once built.
struct RegionMap {
    Rect workspace;
    std::vector<Region> crs;  // critical discs
    Region tr;                // target disc
    double dr_width = 5.0;    // detection annulus width (mm)
    double safety_margin = 3.5;
    double cell = 1.0;        // quantization grid for safe-cell tracking (mm)
    std::unordered_set<std::uint64_t> known_safe;

    Cell cell_of(Vec2 p) const {
        return {static_cast<int>(std::floor(p.x / cell)),
                static_cast<int>(std::floor(p.y / cell))};
    }
    Vec2 cell_center(Cell c) const {
        return {(c.x + 0.5) * cell, (c.y + 0.5) * cell};
    }
};

// Classifies an in-workspace point. Throws std::domain_error outside the
// workspace. Discs are closed: a point exactly on a critical boundary circle
// is Critical.
RegionType classify(const RegionMap& map, Vec2 p);

// Appends a critical disc discovered online. Safe cells swallowed by the new
// disc or its detection annulus are forgotten.
RegionMap add_discovered_cr(const RegionMap& map, Vec2 est_center, double assumed_radius);

// Promotes unknown cells to safe. Cells classified anything other than
// Unknown are left untouched.
RegionMap mark_safe(const RegionMap& map, std::span<const Cell> cells);

// Margin rule: detection annuli must outsize one observation step plus the
// worst-case sensor error, otherwise a critical disc could be hit before it
// is ever seen. The engine refuses to run when this fails.
bool validate_margins(const RegionMap& map, double max_step, double max_sensor_error);

// Reported by min_clearance when the map has no critical discs.
inline constexpr double kNoCrClearance = 1e9;

// Minimum over the path points of the signed distance to the nearest
// critical disc boundary (negative inside a disc).
double min_clearance(const RegionMap& map, std::span<const Vec2> path);

}  // namespace onss
