#pragma once

#include <optional>
#include <span>
#include <vector>

#include "onss/kinematics.hpp"
#include "onss/regions.hpp"
#include "onss/rng.hpp"

namespace onss {

// Measurement and actuation noise of the simulated world. Position error is
// a static per-episode offset plus per-sample jitter; their sum never
// exceeds pos_error_max. deviation_max bounds the uncontrollable heading
// perturbation applied after each push.
struct NoiseModel {
    double pos_error_max = 3.0;
    double static_offset_max = 2.0;
    double jitter_max = 0.3;
    double deviation_max = 0.13;
};

// Force rises linearly with penetration depth into a detection annulus,
// which is what reveals critical discs before contact.
struct ForceModel {
    double baseline = 1.0;
    double dr_gain = 10.0;  // units per mm of annulus penetration
};

struct Observation {
    Vec2 measured_pos;
    double force = 0.0;
    std::uint64_t sample_index = 0;
};

// Ground-truth world: the complete region map (including discs the model has
// never heard of), the true needle pose, and the executed trace.
struct GroundTruth {
    RegionMap true_map;
    NeedlePose pose;
    Trace trace;
    Rng rng;
    NoiseModel noise;
    ForceModel force;
    KinematicsParams kin;
    double sample_spacing = 0.5;  // observation cadence (mm of tip progress)
    Vec2 static_offset;
    std::uint64_t next_sample = 0;
};

GroundTruth make_ground_truth(RegionMap true_map, const NeedlePose& start,
                              const KinematicsParams& kin, std::uint64_t seed,
                              const NoiseModel& noise = {}, const ForceModel& force = {},
                              double sample_spacing = 0.5);

// Depth (mm) by which the point sits inside the nearest detection annulus,
// 0 outside all of them and capped at dr_width inside a critical disc.
double dr_penetration(const RegionMap& map, Vec2 p);

struct StepResult {
    bool rejected = false;  // the step would have left the workspace
    std::vector<Observation> observations;
};

// Executes one push or rotate on the true world. A push draws a heading
// deviation uniformly from [-deviation_max, +deviation_max] and emits one
// observation per sample_spacing of progress; a rotate emits none. Pull must
// go through plant_pullback.
StepResult plant_step(GroundTruth& w, Action a);

// One measurement of the current tip position without motion.
Observation plant_observe(GroundTruth& w);

struct Detection {
    Vec2 est_boundary_point;  // measured position of the triggering sample
    std::size_t obs_index = 0;
};

// First observation whose force exceeds the threshold, if any.
std::optional<Detection> detect_dr(std::span<const Observation> obs, double threshold);

struct PullbackOutcome {
    bool start_re_reached = false;
};

// Retracts the needle along its own recorded trace. The bevel keeps its
// current orientation; position and heading come from the recorded sample.
PullbackOutcome plant_pullback(GroundTruth& w, double len);

}  // namespace onss
