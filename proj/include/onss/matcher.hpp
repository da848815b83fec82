#pragma once

#include <span>

#include "onss/optimizer.hpp"
#include "onss/plant.hpp"

namespace onss {

// Verdict on one observation batch against the active plan. At most one
// result per batch; a force detection outranks a positional deviation.
struct MatchResult {
    enum class Kind { Ok, Deviation, Detection };
    Kind kind = Kind::Ok;

    // Deviation details
    Vec2 observed_pos;
    NeedlePose predicted;
    double distance_mm = 0.0;

    // Detection details
    Vec2 est_boundary_point;
    std::size_t obs_index = 0;
};

// Compares a completed action's observations against the plan. Detection
// fires on the first force sample above force_threshold; otherwise the last
// observation is matched against the plan pose at the same arc-length
// progress and flagged when farther than eps_match. An empty batch is Ok.
// Observations are expected to be already corrected for the static offset.
MatchResult match_batch(std::span<const Observation> obs, const Plan& plan,
                        const KinematicsParams& kin, double progress_mm, double eps_match,
                        double force_threshold);

}  // namespace onss
