#include <stdexcept>

#include "doctest.h"
#include "onss/regions.hpp"
#include "test_helpers.hpp"

using namespace onss;
using test::basic_map;
using test::with_cr;

namespace {

// Independent point-in-disc predicate with closed boundaries, used as the
// oracle for boundary classification.
bool in_disc(Vec2 p, Vec2 c, double r) {
    double dx = p.x - c.x, dy = p.y - c.y;
    return dx * dx + dy * dy <= r * r;
}

}  // namespace

TEST_CASE("classify: disc membership and priority") {
    RegionMap m = with_cr(basic_map(), {30.0, 30.0}, 4.0);

    CHECK(classify(m, {30.0, 30.0}) == RegionType::Critical);
    // inside the annulus: radius + dr_width/2 from the center
    CHECK(classify(m, {30.0 + 4.0 + 2.5, 30.0}) == RegionType::Detection);
    CHECK(classify(m, m.tr.center) == RegionType::Target);
    CHECK(classify(m, {60.0, 70.0}) == RegionType::Unknown);
    CHECK_THROWS_AS(classify(m, {-1.0, 30.0}), std::domain_error);
}

TEST_CASE("classify: closed boundary goes to the critical disc") {
    RegionMap m = with_cr(basic_map(), {30.0, 30.0}, 4.0);
    Vec2 on_boundary{34.0, 30.0};
    REQUIRE(in_disc(on_boundary, {30.0, 30.0}, 4.0));
    CHECK(classify(m, on_boundary) == RegionType::Critical);
    // just outside the disc the annulus takes over
    Vec2 outside{34.0 + 1e-9, 30.0};
    REQUIRE(!in_disc(outside, {30.0, 30.0}, 4.0));
    CHECK(classify(m, outside) == RegionType::Detection);
}

TEST_CASE("classify: detection has priority over target overlap") {
    RegionMap m = basic_map();
    m.crs.push_back({{m.tr.center.x - m.tr.radius - 6.0, m.tr.center.y}, 2.0,
                     RegionType::Critical});
    // a point inside the target disc but within dr_width of the disc
    Vec2 p{m.tr.center.x - m.tr.radius + 0.5, m.tr.center.y};
    CHECK(classify(m, p) == RegionType::Detection);
}

TEST_CASE("add_discovered_cr: discovery becomes classifiable") {
    RegionMap m = basic_map();
    RegionMap m2 = add_discovered_cr(m, {10.0, 10.0}, 3.0);
    CHECK(classify(m2, {10.0, 10.0}) == RegionType::Critical);
    CHECK(classify(m, {10.0, 10.0}) == RegionType::Unknown);  // original untouched

    // overlapping the target disc keeps the map structurally valid
    RegionMap m3 = add_discovered_cr(m, m.tr.center, 2.0);
    CHECK(classify(m3, m.tr.center) == RegionType::Critical);
}

TEST_CASE("add_discovered_cr: duplicate discs do not change classification") {
    RegionMap once = add_discovered_cr(basic_map(), {40.0, 40.0}, 3.0);
    RegionMap twice = add_discovered_cr(once, {40.0, 40.0}, 3.0);
    for (double x = 0.5; x < 100.0; x += 2.0) {
        for (double y = 0.5; y < 100.0; y += 2.0) {
            CHECK(classify(once, {x, y}) == classify(twice, {x, y}));
        }
    }
}

TEST_CASE("add_discovered_cr: swallows safe cells under the new keep-out") {
    RegionMap m = basic_map();
    std::vector<Cell> cells{m.cell_of({20.0, 20.0}), m.cell_of({60.0, 60.0})};
    m = mark_safe(m, cells);
    REQUIRE(classify(m, {20.5, 20.5}) == RegionType::Safe);
    RegionMap m2 = add_discovered_cr(m, {20.0, 20.0}, 3.0);
    // the safe cell inside the new disc is forgotten, the distant one survives
    CHECK(classify(m2, {20.5, 20.5}) == RegionType::Critical);
    CHECK(classify(m2, {60.5, 60.5}) == RegionType::Safe);
    CHECK(!m2.known_safe.contains(cell_key(m2.cell_of({20.0, 20.0}))));
}

TEST_CASE("mark_safe: promotes unknown only") {
    RegionMap m = with_cr(basic_map(), {30.0, 30.0}, 4.0);
    std::vector<Cell> cells{m.cell_of({10.0, 50.0}), m.cell_of({30.0, 30.0})};
    RegionMap m2 = mark_safe(m, cells);
    CHECK(classify(m2, {10.5, 50.5}) == RegionType::Safe);
    CHECK(classify(m2, {30.0, 30.0}) == RegionType::Critical);  // priority order
}

TEST_CASE("mark_safe: rejects cells outside the workspace") {
    RegionMap m = basic_map(40.0, 40.0);
    std::vector<Cell> cells{{45, 5}};
    CHECK_THROWS_AS(mark_safe(m, cells), std::domain_error);
}

TEST_CASE("mark_safe: marking everything leaves no unknown") {
    RegionMap m = basic_map(40.0, 40.0);
    std::vector<Cell> all;
    for (int x = 0; x < 40; ++x) {
        for (int y = 0; y < 40; ++y) all.push_back({x, y});
    }
    RegionMap m2 = mark_safe(m, all);
    // exhaustive scan: no cell center classifies Unknown anymore
    for (int x = 0; x < 40; ++x) {
        for (int y = 0; y < 40; ++y) {
            CHECK(classify(m2, m2.cell_center({x, y})) != RegionType::Unknown);
        }
    }
}

TEST_CASE("validate_margins") {
    RegionMap m = basic_map();
    m.dr_width = 5.0;
    CHECK(validate_margins(m, 2.0, 1.0));
    m.dr_width = 2.0;
    CHECK(!validate_margins(m, 2.0, 1.0));
    // sensor regime: 33.35um step, 3mm error, 5mm annulus
    m.dr_width = 5.0;
    CHECK(validate_margins(m, 0.03335, 3.0));
}

TEST_CASE("min_clearance") {
    RegionMap empty = basic_map();
    std::vector<Vec2> one{{50.0, 50.0}};
    CHECK(min_clearance(empty, one) == kNoCrClearance);

    RegionMap m = with_cr(basic_map(), {30.0, 30.0}, 3.0);
    std::vector<Vec2> p{{40.0, 30.0}};  // center distance 10, boundary distance 7
    CHECK(min_clearance(m, p) == doctest::Approx(7.0));

    // brute-force minimum over a three-point path at distances {7, 4, 9}
    std::vector<Vec2> path{{40.0, 30.0}, {30.0, 37.0}, {30.0, 18.0}};
    double brute = 1e99;
    for (Vec2 q : path) brute = std::min(brute, dist(q, {30.0, 30.0}) - 3.0);
    REQUIRE(brute == doctest::Approx(4.0));
    CHECK(min_clearance(m, path) == doctest::Approx(brute));

    CHECK_THROWS_AS(min_clearance(m, std::span<const Vec2>{}), std::invalid_argument);
}

TEST_CASE("regions: totality and purity over random maps") {
    Rng rng(2024);
    for (int iter = 0; iter < 200; ++iter) {
        RegionMap m = test::random_map(rng);
        for (int k = 0; k < 50; ++k) {
            Vec2 p{rng.uniform(0.0, 100.0), rng.uniform(0.0, 100.0)};
            RegionType t = classify(m, p);
            CHECK(classify(m, p) == t);  // pure
            // exactly one type: cross-check against the disc predicates
            bool in_cr = false, in_dr = false;
            for (const Region& cr : m.crs) {
                in_cr |= in_disc(p, cr.center, cr.radius);
                in_dr |= !in_cr && in_disc(p, cr.center, cr.radius + m.dr_width);
            }
            if (in_cr) {
                CHECK(t == RegionType::Critical);
            } else if (in_dr) {
                CHECK(t == RegionType::Detection);
            } else if (in_disc(p, m.tr.center, m.tr.radius)) {
                CHECK(t == RegionType::Target);
            } else {
                CHECK((t == RegionType::Safe || t == RegionType::Unknown));
            }
        }
    }
}

TEST_CASE("regions: annulus coverage around every critical disc") {
    Rng rng(77);
    for (int iter = 0; iter < 100; ++iter) {
        RegionMap m = test::random_map(rng);
        if (m.crs.empty()) continue;
        const Region& cr = m.crs[rng.uniform_index(m.crs.size())];
        double d = rng.uniform(1e-6, m.dr_width);
        double ang = rng.uniform(0.0, kTau);
        Vec2 p = cr.center + Vec2{std::cos(ang), std::sin(ang)} * (cr.radius + d);
        if (!m.workspace.contains(p)) continue;
        bool inside_other = false;
        for (const Region& other : m.crs) {
            inside_other |= in_disc(p, other.center, other.radius);
        }
        if (!inside_other) CHECK(classify(m, p) == RegionType::Detection);
    }
}

TEST_CASE("regions: discovery only grows the critical set") {
    Rng rng(99);
    for (int iter = 0; iter < 50; ++iter) {
        RegionMap m = test::random_map(rng);
        RegionMap m2 = add_discovered_cr(m, {rng.uniform(5.0, 95.0), rng.uniform(5.0, 95.0)},
                                         rng.uniform(1.0, 5.0));
        for (int k = 0; k < 100; ++k) {
            Vec2 p{rng.uniform(0.0, 100.0), rng.uniform(0.0, 100.0)};
            if (classify(m, p) == RegionType::Critical) {
                CHECK(classify(m2, p) == RegionType::Critical);
            }
        }
    }
}
