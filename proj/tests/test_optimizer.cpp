#include <cmath>

#include <stdexcept>

#include "doctest.h"
#include "onss/optimizer.hpp"
#include "onss/rng.hpp"
#include "test_helpers.hpp"

using namespace onss;
using test::basic_map;

namespace {

const KinematicsParams kKin{2.0, 50.0, kTau / 16.0};

// Straight plan along +x from (x0, y) with n pushes, poses included.
Plan straight_plan(double x0, double y, int pushes, int rotations_at_end = 0) {
    Plan p;
    NeedlePose pose{x0, y, 0.0, +1};
    p.poses.push_back(pose);
    KinematicsParams straight{2.0, std::numeric_limits<double>::infinity(), kTau / 16.0};
    for (int i = 0; i < pushes; ++i) {
        pose = apply_action(pose, Action::Push, straight);
        p.actions.push_back(Action::Push);
        p.poses.push_back(pose);
    }
    for (int i = 0; i < rotations_at_end; ++i) {
        pose = apply_action(pose, Action::Rotate, straight);
        p.actions.push_back(Action::Rotate);
        p.poses.push_back(pose);
    }
    return p;
}

}  // namespace

TEST_CASE("plan_cost: single active term and additivity") {
    RegionMap m = basic_map();
    m.tr.center = {30.0, 50.0};
    // mark the corridor safe so the unknown-region term stays silent
    std::vector<Cell> cells;
    for (int x = 18; x <= 32; ++x) {
        for (int y = 48; y <= 53; ++y) cells.push_back({x, y});
    }
    m = mark_safe(m, cells);

    Plan p = straight_plan(20.0, 50.0, 5);  // ends exactly at the target center
    KinematicsParams straight{2.0, std::numeric_limits<double>::infinity(), kTau / 16.0};
    p.metrics = compute_plan_metrics(p, m, straight);
    REQUIRE(p.metrics.length_mm == doctest::Approx(10.0));
    REQUIRE(p.metrics.ur_length_mm == doctest::Approx(0.0));
    REQUIRE(p.metrics.final_center_dist_mm == doctest::Approx(0.0));
    REQUIRE(p.metrics.min_clearance_mm == kNoCrClearance);

    CostWeights w{0.0, 1.0, 0.0, 0.0, 0.0};
    CHECK(plan_cost(p, w, m, 10.0) == doctest::Approx(10.0));

    Plan p2 = straight_plan(20.0, 50.0, 5, 2);
    p2.metrics = compute_plan_metrics(p2, m, straight);
    CostWeights w2{5.0, 0.0, 0.0, 0.0, 0.0};
    CHECK(plan_cost(p2, w2, m, 10.0) == doctest::Approx(10.0));  // 2 rotations at weight 5
    CostWeights w3{5.0, 1.0, 0.0, 0.0, 0.0};
    CHECK(plan_cost(p2, w3, m, 10.0) == doctest::Approx(20.0));  // additive
}

TEST_CASE("plan_cost: clearance deficit term") {
    RegionMap m = test::with_cr(basic_map(), {25.0, 44.0}, 3.0);
    // recompute the metrics by brute force from the poses
    Plan p = straight_plan(20.0, 50.0, 5);
    KinematicsParams straight{2.0, std::numeric_limits<double>::infinity(), kTau / 16.0};
    p.metrics = compute_plan_metrics(p, m, straight);
    double brute = 1e99;
    for (double s = 0.0; s <= 10.0 + 1e-9; s += 0.5) {
        brute = std::min(brute, dist({20.0 + s, 50.0}, {25.0, 44.0}) - 3.0);
    }
    REQUIRE(p.metrics.min_clearance_mm == doctest::Approx(brute));
    REQUIRE(brute == doctest::Approx(3.0));

    CostWeights w{0.0, 0.0, 3.0, 0.0, 0.0};
    // deficit below a 5mm target: (5 - 3) * 3 = 6
    double with_target_5 = plan_cost(p, w, m, 5.0);
    CHECK(with_target_5 == doctest::Approx(6.0));
    // clearance above target costs nothing
    CHECK(plan_cost(p, w, m, 2.0) == doctest::Approx(0.0));
}

TEST_CASE("plan_cost: never negative") {
    Rng rng(5150);
    RegionMap m = test::random_map(rng);
    for (int iter = 0; iter < 50; ++iter) {
        Plan p = straight_plan(rng.uniform(5.0, 40.0), rng.uniform(20.0, 80.0),
                               1 + static_cast<int>(rng.uniform_index(10)));
        KinematicsParams straight{2.0, std::numeric_limits<double>::infinity(), kTau / 16.0};
        p.metrics = compute_plan_metrics(p, m, straight);
        CostWeights w{rng.uniform(0.0, 8.0), rng.uniform(0.0, 8.0), rng.uniform(0.0, 8.0),
                      rng.uniform(0.0, 8.0), rng.uniform(0.0, 8.0)};
        CHECK(plan_cost(p, w, m, rng.uniform(0.0, 15.0)) >= 0.0);
    }
}

TEST_CASE("select_plan: argmin with first-wins ties") {
    RegionMap m = basic_map();
    std::vector<Plan> plans;
    KinematicsParams straight{2.0, std::numeric_limits<double>::infinity(), kTau / 16.0};
    for (int n : {6, 4, 4, 8}) {
        Plan p = straight_plan(10.0, 50.0, n);
        p.metrics = compute_plan_metrics(p, m, straight);
        plans.push_back(std::move(p));
    }
    CostWeights w{0.0, 1.0, 0.0, 0.0, 0.0};
    const Plan& best = select_plan(plans, w, m, 0.0);
    CHECK(&best == &plans[1]);  // same cost as plans[2]; the earlier one wins

    std::vector<Plan> one{plans[0]};
    CHECK(&select_plan(one, w, m, 0.0) == &one[0]);

    CHECK_THROWS_AS(select_plan(std::span<const Plan>{}, w, m, 0.0), std::invalid_argument);
}

TEST_CASE("select_plan: equals the linear-scan argmin on random menus") {
    Rng rng(6006);
    RegionMap m = test::random_map(rng);
    CostWeights w{5.0, 1.0, 3.0, 10.0, 2.0};
    std::vector<Plan> plans;
    KinematicsParams straight{2.0, std::numeric_limits<double>::infinity(), kTau / 16.0};
    for (int i = 0; i < 50; ++i) {
        Plan p = straight_plan(rng.uniform(5.0, 40.0), rng.uniform(20.0, 80.0),
                               1 + static_cast<int>(rng.uniform_index(12)),
                               static_cast<int>(rng.uniform_index(3)));
        p.metrics = compute_plan_metrics(p, m, straight);
        plans.push_back(std::move(p));
    }
    std::size_t brute = 0;
    for (std::size_t i = 1; i < plans.size(); ++i) {
        if (plan_cost(plans[i], w, m, 10.0) < plan_cost(plans[brute], w, m, 10.0)) brute = i;
    }
    CHECK(&select_plan(plans, w, m, 10.0) == &plans[brute]);
}

TEST_CASE("select_plan: invariant under uniform weight scaling") {
    Rng rng(7007);
    RegionMap m = test::random_map(rng);
    KinematicsParams straight{2.0, std::numeric_limits<double>::infinity(), kTau / 16.0};
    for (int iter = 0; iter < 20; ++iter) {
        std::vector<Plan> plans;
        for (int i = 0; i < 12; ++i) {
            Plan p = straight_plan(rng.uniform(5.0, 40.0), rng.uniform(20.0, 80.0),
                                   1 + static_cast<int>(rng.uniform_index(10)));
            p.metrics = compute_plan_metrics(p, m, straight);
            plans.push_back(std::move(p));
        }
        CostWeights w{rng.uniform(0.1, 5.0), rng.uniform(0.1, 5.0), rng.uniform(0.1, 5.0),
                      rng.uniform(0.1, 5.0), rng.uniform(0.1, 5.0)};
        double c = rng.uniform(0.1, 20.0);
        CostWeights scaled{w.rot * c, w.len * c, w.clear * c, w.ur * c, w.center * c};
        CHECK(&select_plan(plans, w, m, 10.0) == &select_plan(plans, scaled, m, 10.0));
    }
}

TEST_CASE("select_plan: more clearance weight never prefers the tight plan") {
    // a plan skimming past a disc (outside its annulus) vs a spacious one;
    // everything marked safe so the unknown-ground term cancels out
    RegionMap m = test::with_cr(basic_map(), {25.0, 40.0}, 3.0);
    KinematicsParams straight{2.0, std::numeric_limits<double>::infinity(), kTau / 16.0};
    m.tr.center = {32.0, 50.0};
    {
        std::vector<Cell> all;
        for (int x = 0; x < 100; ++x) {
            for (int y = 0; y < 100; ++y) all.push_back({x, y});
        }
        m = mark_safe(m, all);
    }
    Plan tight = straight_plan(20.0, 50.0, 6);
    tight.metrics = compute_plan_metrics(tight, m, straight);
    Plan spacious = straight_plan(20.0, 60.0, 6);
    spacious.metrics = compute_plan_metrics(spacious, m, straight);
    REQUIRE(tight.metrics.min_clearance_mm < spacious.metrics.min_clearance_mm);

    std::vector<Plan> menu{tight, spacious};
    bool was_spacious = false;
    for (double wc = 0.0; wc <= 12.0; wc += 0.25) {
        CostWeights w{5.0, 1.0, wc, 10.0, 2.0};
        bool now_spacious = &select_plan(menu, w, m, 10.0) == &menu[1];
        // monotone: once the spacious plan wins it keeps winning
        if (was_spacious) CHECK(now_spacious);
        was_spacious = now_spacious;
    }
    CHECK(was_spacious);  // large weights must end up at the spacious plan
}

TEST_CASE("plan_pose_at: exact arc interpolation") {
    Plan p;
    NeedlePose pose{0.0, 0.0, 0.0, +1};
    p.poses.push_back(pose);
    for (int i = 0; i < 3; ++i) {
        pose = apply_action(pose, Action::Push, kKin);
        p.actions.push_back(Action::Push);
        p.poses.push_back(pose);
    }
    // progress aligned with action boundaries hits the stored poses
    NeedlePose at2 = plan_pose_at(p, kKin, 2.0);
    CHECK(at2.x == doctest::Approx(p.poses[1].x).epsilon(1e-12));
    CHECK(at2.y == doctest::Approx(p.poses[1].y).epsilon(1e-12));
    // halfway along the second push lies on the same circle
    NeedlePose at3 = plan_pose_at(p, kKin, 3.0);
    Vec2 center{0.0, 50.0};
    CHECK(dist(at3.pos(), center) == doctest::Approx(50.0).epsilon(1e-9));
    // beyond the total length clamps to the final pose
    NeedlePose at99 = plan_pose_at(p, kKin, 99.0);
    CHECK(at99.x == p.poses.back().x);
}
