#include "onss/kinematics.hpp"

#include <cmath>
#include <stdexcept>

namespace onss {

const char* to_string(Action a) {
    switch (a) {
        case Action::Push: return "push";
        case Action::Rotate: return "rotate";
        case Action::Pull: return "pull";
    }
    return "?";
}

NeedlePose advance_arc(const NeedlePose& p, double arc_len, double curvature) {
    NeedlePose out = p;
    if (std::abs(curvature) < 1e-12) {
        out.x += arc_len * std::cos(p.theta);
        out.y += arc_len * std::sin(p.theta);
    } else {
        double theta1 = p.theta + curvature * arc_len;
        out.x += (std::sin(theta1) - std::sin(p.theta)) / curvature;
        out.y -= (std::cos(theta1) - std::cos(p.theta)) / curvature;
        out.theta = normalize_angle(theta1);
    }
    return out;
}

NeedlePose apply_action(const NeedlePose& p, Action a, const KinematicsParams& k,
                        double deviation) {
    if (std::abs(deviation) > k.max_deviation + 1e-12) {
        throw std::invalid_argument("apply_action: deviation exceeds max_deviation");
    }
    switch (a) {
        case Action::Push: {
            if (k.step_len <= 0.0 || k.radius <= 0.0) {
                throw std::invalid_argument("apply_action: step_len and radius must be positive");
            }
            double curvature = std::isinf(k.radius) ? 0.0 : p.bevel / k.radius;
            NeedlePose out = advance_arc(p, k.step_len, curvature);
            out.theta = normalize_angle(out.theta + deviation);
            return out;
        }
        case Action::Rotate: {
            NeedlePose out = p;
            out.bevel = -p.bevel;
            return out;
        }
        case Action::Pull:
            throw std::invalid_argument("apply_action: pull is handled by invert_path");
    }
    throw std::invalid_argument("apply_action: unknown action");
}

QuantizedState quantize(const NeedlePose& p, const GridSpec& grid, const Rect& workspace) {
    if (!workspace.contains(p.pos())) {
        throw std::domain_error("quantize: pose outside workspace");
    }
    double q = grid.heading_quantum();
    int h = static_cast<int>(std::llround(normalize_angle(p.theta) / q)) % grid.headings;
    return {static_cast<int>(std::floor(p.x / grid.cell)),
            static_cast<int>(std::floor(p.y / grid.cell)), h, p.bevel};
}

PullbackResult invert_path(const Trace& trace, double pullback_len) {
    if (trace.samples.empty()) {
        throw std::invalid_argument("invert_path: empty trace");
    }
    if (pullback_len < 0.0) {
        throw std::invalid_argument("invert_path: negative pullback");
    }
    double target = trace.total_len() - pullback_len;
    PullbackResult out;
    if (target <= 0.0) {
        out.trace = trace;
        out.trace.samples.resize(1);
        out.pose = out.trace.samples.front().pose;
        out.start_re_reached = true;
        return out;
    }
    // Deepest recorded sample at least pullback_len behind the tip.
    std::size_t idx = trace.samples.size() - 1;
    while (idx > 0 && trace.samples[idx].arc_len > target + 1e-9) --idx;
    out.trace = trace;
    out.trace.samples.resize(idx + 1);
    out.pose = out.trace.samples.back().pose;
    out.start_re_reached = (idx == 0);
    return out;
}

}  // namespace onss
