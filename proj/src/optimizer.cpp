#include "onss/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace onss {

PlanMetrics compute_plan_metrics(const Plan& plan, const RegionMap& map,
                                 const KinematicsParams& kin, double sample_ds) {
    if (plan.poses.size() != plan.actions.size() + 1) {
        throw std::invalid_argument("compute_plan_metrics: pose/action arity mismatch");
    }
    PlanMetrics m;
    std::vector<Vec2> clearance_points{plan.poses.front().pos()};
    for (std::size_t i = 0; i < plan.actions.size(); ++i) {
        if (plan.actions[i] == Action::Rotate) {
            m.rotations++;
            continue;
        }
        m.length_mm += kin.step_len;
        const NeedlePose& from = plan.poses[i];
        double curvature = std::isinf(kin.radius) ? 0.0 : from.bevel / kin.radius;
        int n = std::max(1, static_cast<int>(std::ceil(kin.step_len / sample_ds)));
        double ds = kin.step_len / n;
        for (int k = 1; k <= n; ++k) {
            NeedlePose p = advance_arc(from, ds * k, curvature);
            clearance_points.push_back(p.pos());
            if (map.workspace.contains(p.pos()) &&
                classify(map, p.pos()) == RegionType::Unknown) {
                m.ur_length_mm += ds;
            }
        }
    }
    m.min_clearance_mm = min_clearance(map, clearance_points);
    m.final_center_dist_mm = dist(plan.poses.back().pos(), map.tr.center);
    return m;
}

double plan_cost(const Plan& plan, const CostWeights& w, const RegionMap& map,
                 double clearance_target) {
    (void)map;
    const PlanMetrics& m = plan.metrics;
    double deficit = std::max(0.0, clearance_target - m.min_clearance_mm);
    return w.rot * static_cast<double>(m.rotations) + w.len * m.length_mm + w.clear * deficit +
           w.ur * m.ur_length_mm + w.center * m.final_center_dist_mm;
}

const Plan& select_plan(std::span<const Plan> plans, const CostWeights& w, const RegionMap& map,
                        double clearance_target) {
    if (plans.empty()) {
        throw std::invalid_argument("select_plan: empty plan list");
    }
    std::size_t best = 0;
    double best_cost = plan_cost(plans[0], w, map, clearance_target);
    for (std::size_t i = 1; i < plans.size(); ++i) {
        double c = plan_cost(plans[i], w, map, clearance_target);
        if (c < best_cost) {  // strict: ties keep the earliest plan
            best = i;
            best_cost = c;
        }
    }
    return plans[best];
}

NeedlePose plan_pose_at(const Plan& plan, const KinematicsParams& kin, double progress_mm) {
    double at = 0.0;
    for (std::size_t i = 0; i < plan.actions.size(); ++i) {
        if (plan.actions[i] != Action::Push) continue;
        if (progress_mm <= at + kin.step_len + 1e-9) {
            double part = std::clamp(progress_mm - at, 0.0, kin.step_len);
            const NeedlePose& from = plan.poses[i];
            double curvature = std::isinf(kin.radius) ? 0.0 : from.bevel / kin.radius;
            return advance_arc(from, part, curvature);
        }
        at += kin.step_len;
    }
    return plan.poses.back();
}

}  // namespace onss
