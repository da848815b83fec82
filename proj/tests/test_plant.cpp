#include <cmath>

#include <stdexcept>

#include "doctest.h"
#include "onss/plant.hpp"
#include "test_helpers.hpp"

using namespace onss;
using test::basic_map;
using test::with_cr;

namespace {

const KinematicsParams kKin{2.0, 50.0, kTau / 16.0};
const NoiseModel kQuiet{3.0, 0.0, 0.0, 0.0};  // no offset, no jitter, no deviation

GroundTruth quiet_world(RegionMap m, NeedlePose start, std::uint64_t seed = 7) {
    return make_ground_truth(std::move(m), start, kKin, seed, kQuiet);
}

}  // namespace

TEST_CASE("plant_step: rotate flips the bevel and emits nothing") {
    GroundTruth w = quiet_world(basic_map(), {10.0, 50.0, 0.0, +1});
    StepResult r = plant_step(w, Action::Rotate);
    CHECK(r.observations.empty());
    CHECK(w.pose.bevel == -1);
    CHECK(w.trace.total_len() == 0.0);
    CHECK_THROWS_AS(plant_step(w, Action::Pull), std::invalid_argument);
}

TEST_CASE("plant_step: quiet push far from discs reads baseline force") {
    GroundTruth w = quiet_world(basic_map(), {10.0, 50.0, 0.0, +1});
    StepResult r = plant_step(w, Action::Push);
    REQUIRE(r.observations.size() == 4);  // 2mm push at 0.5mm cadence
    for (const Observation& ob : r.observations) {
        CHECK(ob.force == doctest::Approx(1.0));
    }
    CHECK(w.pose.x == doctest::Approx(apply_action({10.0, 50.0, 0.0, +1}, Action::Push, kKin).x));
    CHECK(w.trace.total_len() == doctest::Approx(2.0));
}

TEST_CASE("plant_step: force equals baseline plus gain times annulus penetration") {
    // straight push from x=10 to x=12 at y=50; disc at (19.5, 50) r=3 puts the
    // annulus boundary at x=11.5, so the final millimeter penetrates it
    RegionMap m = with_cr(basic_map(), {19.5, 50.0}, 3.0);
    KinematicsParams straight{2.0, std::numeric_limits<double>::infinity(), kTau / 16.0};
    GroundTruth w = make_ground_truth(m, {10.0, 50.0, 0.0, +1}, straight, 7, kQuiet);
    StepResult r = plant_step(w, Action::Push);
    REQUIRE(r.observations.size() == 4);
    for (std::size_t k = 0; k < 4; ++k) {
        double x = 10.0 + 0.5 * (k + 1);
        double penetration = std::max(0.0, (3.0 + 5.0) - (19.5 - x));
        CHECK(r.observations[k].force == doctest::Approx(1.0 + 10.0 * penetration));
    }
    CHECK(r.observations[3].force == doctest::Approx(6.0));  // 0.5mm inside
}

TEST_CASE("plant_step: workspace exits are rejected whole") {
    GroundTruth w = quiet_world(basic_map(), {99.0, 50.0, 0.0, +1});
    StepResult r = plant_step(w, Action::Push);
    CHECK(r.rejected);
    CHECK(r.observations.empty());
    CHECK(w.pose.x == doctest::Approx(99.0));  // pose untouched
}

TEST_CASE("dr_penetration: deeper is never cheaper, capped inside the disc") {
    RegionMap m = with_cr(basic_map(), {50.0, 50.0}, 3.0);
    double prev = -1.0;
    for (double d = 9.5; d >= 2.5; d -= 0.25) {  // walk toward the center
        double pen = dr_penetration(m, {50.0 + d, 50.0});
        CHECK(pen >= prev);
        prev = pen;
    }
    CHECK(dr_penetration(m, {50.0, 50.0}) == doctest::Approx(m.dr_width));
    CHECK(dr_penetration(m, {90.0, 90.0}) == 0.0);
}

TEST_CASE("detect_dr: first exceeding sample wins") {
    std::vector<Observation> obs{{{1.0, 1.0}, 1.0, 0}, {{2.0, 1.0}, 1.0, 1},
                                 {{3.0, 1.0}, 12.0, 2}, {{4.0, 1.0}, 13.0, 3}};
    auto det = detect_dr(obs, 5.0);
    REQUIRE(det.has_value());
    CHECK(det->obs_index == 2);
    CHECK(det->est_boundary_point.x == doctest::Approx(3.0));
    CHECK(!detect_dr(obs, 20.0).has_value());
    CHECK(!detect_dr(std::span<const Observation>{}, 1.0).has_value());
}

TEST_CASE("detect_dr: agrees with a linear scan on noisy batches") {
    Rng rng(11);
    for (int iter = 0; iter < 50; ++iter) {
        std::vector<Observation> obs;
        for (std::uint64_t i = 0; i < 1 + rng.uniform_index(20); ++i) {
            obs.push_back({{0.0, 0.0}, rng.uniform(0.0, 10.0), i});
        }
        double thr = rng.uniform(0.0, 10.0);
        std::size_t expect = obs.size();
        for (std::size_t i = 0; i < obs.size(); ++i) {
            if (obs[i].force > thr) {
                expect = i;
                break;
            }
        }
        auto det = detect_dr(obs, thr);
        if (expect == obs.size()) {
            CHECK(!det.has_value());
        } else {
            REQUIRE(det.has_value());
            CHECK(det->obs_index == expect);
        }
    }
}

TEST_CASE("plant_pullback: retraces the inverted insertion path") {
    KinematicsParams straight{2.0, std::numeric_limits<double>::infinity(), kTau / 16.0};
    GroundTruth w = make_ground_truth(basic_map(), {10.0, 50.0, 0.0, +1}, straight, 7, kQuiet);
    for (int i = 0; i < 5; ++i) plant_step(w, Action::Push);  // 10mm inserted
    REQUIRE(w.trace.total_len() == doctest::Approx(10.0));

    SUBCASE("zero pullback is a no-op") {
        PullbackOutcome o = plant_pullback(w, 0.0);
        CHECK(!o.start_re_reached);
        CHECK(w.pose.x == doctest::Approx(20.0));
    }
    SUBCASE("partial pullback lands on the recorded sample") {
        PullbackOutcome o = plant_pullback(w, 4.0);
        CHECK(!o.start_re_reached);
        CHECK(w.pose.x == doctest::Approx(16.0));
        CHECK(w.trace.total_len() == doctest::Approx(6.0));
        // force reads baseline again after leaving (there were no discs here)
        CHECK(plant_observe(w).force == doctest::Approx(1.0));
    }
    SUBCASE("full pullback reports the insertion pose") {
        PullbackOutcome o = plant_pullback(w, 10.0);
        CHECK(o.start_re_reached);
        CHECK(w.pose.x == doctest::Approx(10.0));
    }
    SUBCASE("bevel keeps its current orientation through the pullback") {
        plant_step(w, Action::Rotate);
        REQUIRE(w.pose.bevel == -1);
        plant_pullback(w, 4.0);
        CHECK(w.pose.bevel == -1);
    }
}

TEST_CASE("observations stay within the configured error bound") {
    Rng rng(99);
    NoiseModel noisy{3.0, 2.0, 0.3, 0.05};
    for (int iter = 0; iter < 20; ++iter) {
        GroundTruth w = make_ground_truth(basic_map(), {10.0, 50.0, 0.0, +1}, kKin,
                                          rng.next_u64(), noisy);
        for (int k = 0; k < 10; ++k) {
            StepResult r = plant_step(w, Action::Push);
            std::size_t n = r.observations.size();
            for (std::size_t i = 0; i < n; ++i) {
                Vec2 true_pos =
                    w.trace.samples[w.trace.samples.size() - n + i].pose.pos();
                CHECK(dist(r.observations[i].measured_pos, true_pos) <=
                      noisy.pos_error_max + 1e-9);
            }
        }
    }
}

TEST_CASE("fixed seeds reproduce the observation stream exactly") {
    NoiseModel noisy{3.0, 2.0, 0.3, 0.08};
    for (std::uint64_t seed : {1ULL, 42ULL, 900ULL}) {
        GroundTruth a = make_ground_truth(basic_map(), {10.0, 50.0, 0.0, +1}, kKin, seed, noisy);
        GroundTruth b = make_ground_truth(basic_map(), {10.0, 50.0, 0.0, +1}, kKin, seed, noisy);
        for (int k = 0; k < 8; ++k) {
            StepResult ra = plant_step(a, Action::Push);
            StepResult rb = plant_step(b, Action::Push);
            REQUIRE(ra.observations.size() == rb.observations.size());
            for (std::size_t i = 0; i < ra.observations.size(); ++i) {
                CHECK(ra.observations[i].measured_pos.x == rb.observations[i].measured_pos.x);
                CHECK(ra.observations[i].measured_pos.y == rb.observations[i].measured_pos.y);
                CHECK(ra.observations[i].force == rb.observations[i].force);
            }
        }
    }
}

TEST_CASE("quiet plant follows the model kinematics exactly") {
    GroundTruth w = quiet_world(basic_map(), {10.0, 50.0, 0.4, +1});
    NeedlePose predicted{10.0, 50.0, 0.4, +1};
    for (int k = 0; k < 12; ++k) {
        Action a = (k % 5 == 4) ? Action::Rotate : Action::Push;
        plant_step(w, a);
        predicted = apply_action(predicted, a, kKin);
        CHECK(w.pose.x == predicted.x);
        CHECK(w.pose.y == predicted.y);
        CHECK(w.pose.theta == predicted.theta);
        CHECK(w.pose.bevel == predicted.bevel);
    }
}
