#include "onss/plant.hpp"

#include <cmath>
#include <stdexcept>

namespace onss {

GroundTruth make_ground_truth(RegionMap true_map, const NeedlePose& start,
                              const KinematicsParams& kin, std::uint64_t seed,
                              const NoiseModel& noise, const ForceModel& force,
                              double sample_spacing) {
    if (noise.static_offset_max + noise.jitter_max > noise.pos_error_max + 1e-9) {
        throw std::invalid_argument("make_ground_truth: offset + jitter exceed pos_error_max");
    }
    GroundTruth w{std::move(true_map), start, {}, Rng(seed), noise, force, kin,
                  sample_spacing,      {},    0};
    w.trace.spacing = sample_spacing;
    w.trace.samples.push_back({start, 0.0, std::nullopt});
    w.static_offset = w.rng.uniform_disc(noise.static_offset_max);
    return w;
}

double dr_penetration(const RegionMap& map, Vec2 p) {
    double depth = 0.0;
    for (const Region& cr : map.crs) {
        double outer = cr.radius + map.dr_width;
        double d = dist(p, cr.center);
        if (d <= outer) depth = std::max(depth, std::min(outer - d, map.dr_width));
    }
    return depth;
}

namespace {

Observation measure(GroundTruth& w, Vec2 true_pos) {
    Vec2 jitter = w.rng.uniform_disc(w.noise.jitter_max);
    return {true_pos + w.static_offset + jitter,
            w.force.baseline + w.force.dr_gain * dr_penetration(w.true_map, true_pos),
            w.next_sample++};
}

}  // namespace

Observation plant_observe(GroundTruth& w) { return measure(w, w.pose.pos()); }

StepResult plant_step(GroundTruth& w, Action a) {
    StepResult out;
    switch (a) {
        case Action::Rotate:
            w.pose.bevel = -w.pose.bevel;
            if (!w.trace.samples.empty()) {
                // keep the trace tip in sync with the physical bevel
                w.trace.samples.back().pose.bevel = w.pose.bevel;
            }
            return out;
        case Action::Pull:
            throw std::invalid_argument("plant_step: pull goes through plant_pullback");
        case Action::Push:
            break;
    }

    double deviation = w.rng.uniform(-w.noise.deviation_max, w.noise.deviation_max);
    double curvature = std::isinf(w.kin.radius) ? 0.0 : w.pose.bevel / w.kin.radius;
    int n = std::max(1, static_cast<int>(std::ceil(w.kin.step_len / w.sample_spacing)));
    double ds = w.kin.step_len / n;

    // Reject the whole step if any part of the arc leaves the workspace.
    for (int k = 1; k <= n; ++k) {
        if (!w.true_map.workspace.contains(advance_arc(w.pose, ds * k, curvature).pos())) {
            out.rejected = true;
            return out;
        }
    }

    double base_len = w.trace.total_len();
    NeedlePose end = w.pose;
    for (int k = 1; k <= n; ++k) {
        end = advance_arc(w.pose, ds * k, curvature);
        out.observations.push_back(measure(w, end.pos()));
        w.trace.samples.push_back({end, base_len + ds * k, Action::Push});
    }
    // Deviation perturbs the heading once the push completes.
    end.theta = normalize_angle(end.theta + deviation);
    w.pose = end;
    w.trace.samples.back().pose = end;
    return out;
}

std::optional<Detection> detect_dr(std::span<const Observation> obs, double threshold) {
    for (std::size_t i = 0; i < obs.size(); ++i) {
        if (obs[i].force > threshold) return Detection{obs[i].measured_pos, i};
    }
    return std::nullopt;
}

PullbackOutcome plant_pullback(GroundTruth& w, double len) {
    if (len < 0.0) {
        throw std::invalid_argument("plant_pullback: negative length");
    }
    PullbackResult r = invert_path(w.trace, len);
    int bevel = w.pose.bevel;  // pulling does not roll the shaft
    w.pose = r.pose;
    w.pose.bevel = bevel;
    w.trace = std::move(r.trace);
    w.trace.samples.back().pose.bevel = bevel;
    return {r.start_re_reached};
}

}  // namespace onss
