#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "onss/geometry.hpp"

namespace onss {

// Needle motion actions. Pull is reserved for engine-driven readjustment and
// is never part of a synthesized plan; apply_action rejects it.
enum class Action { Push, Rotate, Pull };

const char* to_string(Action a);

// Planar bevel-tip needle pose. The bevel sign selects the arc direction:
// pushing bends the tip with curvature bevel/radius, rotating flips the sign.
struct NeedlePose {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;  // heading, normalized to [0, 2*pi)
    int bevel = +1;      // +1 or -1

    Vec2 pos() const { return {x, y}; }
};

struct KinematicsParams {
    double step_len = 2.0;             // arc length of one push (mm)
    double radius = 50.0;              // arc radius of curvature (mm)
    double max_deviation = kTau / 16.0;  // bound on per-push heading deviation (rad)
};

struct GridSpec {
    double cell = 1.0;   // quantization cell (mm)
    int headings = 16;   // discrete heading count
    double heading_quantum() const { return kTau / headings; }
};

struct QuantizedState {
    int cx = 0;
    int cy = 0;
    int heading = 0;
    int bevel = +1;
    bool operator==(const QuantizedState&) const = default;
};

inline std::uint64_t quantized_key(QuantizedState s) {
    return (static_cast<std::uint64_t>(static_cast<std::uint16_t>(s.cx)) << 32) |
           (static_cast<std::uint64_t>(static_cast<std::uint16_t>(s.cy)) << 16) |
           (static_cast<std::uint64_t>(static_cast<std::uint8_t>(s.heading)) << 8) |
           static_cast<std::uint64_t>(s.bevel > 0 ? 1 : 0);
}

// Advances a pose along a circular arc of the given length and signed
// curvature. Heading and position move together; bevel is untouched.
NeedlePose advance_arc(const NeedlePose& p, double arc_len, double curvature);

// One motion action. Push advances step_len along the bevel-directed arc and
// then perturbs the heading by `deviation` (the uncontrollable part); Rotate
// flips the bevel in place. Pull must go through invert_path and throws here.
NeedlePose apply_action(const NeedlePose& p, Action a, const KinematicsParams& k,
                        double deviation = 0.0);

// Maps a pose into the discrete game state space. Throws std::domain_error
// outside the workspace.
QuantizedState quantize(const NeedlePose& p, const GridSpec& grid, const Rect& workspace);

// Executed-path history with cumulative arc length, used for rollback.
struct Trace {
    struct Sample {
        NeedlePose pose;
        double arc_len = 0.0;              // cumulative insertion depth (mm)
        std::optional<Action> action;      // action that produced this sample
    };
    std::vector<Sample> samples;
    double spacing = 0.5;  // max arc length between consecutive samples (mm)

    double total_len() const { return samples.empty() ? 0.0 : samples.back().arc_len; }
    const NeedlePose& tip() const { return samples.back().pose; }
};

struct PullbackResult {
    NeedlePose pose;
    Trace trace;                    // input trace with the pulled-back suffix removed
    bool start_re_reached = false;  // pullback clamped at the insertion pose
};

// Retracts along the recorded trace by pullback_len of arc length. The
// returned pose is always one of the recorded samples (the deepest one at
// least pullback_len behind the tip); no new geometry is invented.
PullbackResult invert_path(const Trace& trace, double pullback_len);

}  // namespace onss
