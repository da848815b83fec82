#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "onss/kinematics.hpp"
#include "onss/regions.hpp"

namespace onss {

// Soft-requirement weights. All non-negative; the defaults keep
// w_ur > w_rot > w_len (unknown-ground traversal is the costliest proxy,
// rotations hurt more than extra millimeters).
struct CostWeights {
    double rot = 5.0;     // per rotation
    double len = 1.0;     // per mm of path
    double clear = 3.0;   // per mm of clearance deficit below the target
    double ur = 10.0;     // per mm traversed through unknown regions
    double center = 2.0;  // per mm of final distance to the target center
};

struct PlanMetrics {
    std::size_t rotations = 0;
    double length_mm = 0.0;
    double min_clearance_mm = kNoCrClearance;
    double ur_length_mm = 0.0;
    double final_center_dist_mm = 0.0;
};

// A concrete action sequence extracted from a strategy under nominal
// (deviation-free) environment behavior, with the poses it predicts and the
// quantized game states it walks (the last entry is the GOAL sink).
struct Plan {
    std::vector<Action> actions;
    std::vector<NeedlePose> poses;          // size = actions.size() + 1
    std::vector<std::uint32_t> state_path;  // game state ids, same size as poses
    PlanMetrics metrics;
};

// Recomputes the derived metrics from the pose sequence, sampling push arcs
// at sample_ds for clearance and unknown-region bookkeeping.
PlanMetrics compute_plan_metrics(const Plan& plan, const RegionMap& map,
                                 const KinematicsParams& kin, double sample_ds = 0.5);

// Weighted scalarization of the soft requirements.
double plan_cost(const Plan& plan, const CostWeights& w, const RegionMap& map,
                 double clearance_target);

// Argmin of plan_cost; ties keep the earliest plan. Throws on an empty menu.
const Plan& select_plan(std::span<const Plan> plans, const CostWeights& w,
                        const RegionMap& map, double clearance_target);

// Pose at a given arc-length progress along the plan, interpolating exactly
// along the push arcs. Progress is clamped to the plan's total length.
NeedlePose plan_pose_at(const Plan& plan, const KinematicsParams& kin, double progress_mm);

}  // namespace onss
