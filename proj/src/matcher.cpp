#include "onss/matcher.hpp"

namespace onss {

MatchResult match_batch(std::span<const Observation> obs, const Plan& plan,
                        const KinematicsParams& kin, double progress_mm, double eps_match,
                        double force_threshold) {
    MatchResult r;
    if (auto det = detect_dr(obs, force_threshold)) {
        r.kind = MatchResult::Kind::Detection;
        r.est_boundary_point = det->est_boundary_point;
        r.obs_index = det->obs_index;
        return r;
    }
    if (obs.empty()) return r;

    NeedlePose predicted = plan_pose_at(plan, kin, progress_mm);
    double d = dist(obs.back().measured_pos, predicted.pos());
    if (d > eps_match) {
        r.kind = MatchResult::Kind::Deviation;
        r.observed_pos = obs.back().measured_pos;
        r.predicted = predicted;
        r.distance_mm = d;
    }
    return r;
}

}  // namespace onss
