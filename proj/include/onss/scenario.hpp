#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "onss/kinematics.hpp"
#include "onss/optimizer.hpp"
#include "onss/regions.hpp"

namespace onss {

// Experiment parameters, one instance per run. Defaults are the standard
// parametrization; sweeps vary one axis at a time.
struct ScenarioParams {
    int n_crs = 5;
    double cr_size_mm = 3.0;          // true critical disc radius
    double assumed_cr_size_mm = 3.0;  // radius assumed for discs discovered online
    double tr_dist_mm = 30.0;         // target distance along the reference path
    int known_pct = 0;                // share of critical discs known up front
};

// Allowed value sets for each parameter axis.
struct SweepAxes {
    std::vector<int> n_crs{0, 1, 2, 5, 10, 20};
    std::vector<double> cr_size{1, 2, 3, 4, 5, 10};
    std::vector<double> assumed_cr_size{1, 2, 3, 4, 5, 10};
    std::vector<double> tr_dist{10, 20, 30, 40, 50};
    std::vector<int> known_pct{0, 20, 40, 60, 80, 100};
};

struct ScenarioCr {
    Vec2 center;
    double radius = 0.0;
    bool known = false;
};

// A generated world: reference-path-derived target and critical discs plus
// the insertion pose. The model starts from the known discs only; the plant
// simulates all of them.
struct Scenario {
    Rect workspace{0.0, 0.0, 100.0, 100.0};
    std::vector<ScenarioCr> crs;
    Region tr{{50.0, 50.0}, 5.0, RegionType::Target};
    double dr_width = 5.0;
    double safety_margin = 3.5;
    NeedlePose start{6.5, 50.5, 0.0, +1};
    std::optional<CostWeights> weights;  // optional per-scenario override
    std::vector<Vec2> reference_path;    // fine-sampled, for rendering
    ScenarioParams params;
    std::uint64_t seed = 0;

    RegionMap true_map() const;   // every critical disc
    RegionMap model_map() const;  // known critical discs only
};

struct GenerationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GenOptions {
    double tr_radius = 5.0;
    double lateral_margin = 1.0;   // extra clearance between path and keep-out
    double lateral_spread = 4.0;   // random extra lateral offset
    double rotate_prob = 0.12;     // bevel flip probability per reference step
    double inner_margin = 8.0;     // reference path keeps this far from walls
    int max_path_tries = 40;
    int max_place_tries = 60;
    int max_rounds = 25;
    GridSpec grid;
    KinematicsParams kin;
};

// Deterministic scenario generator. Draws a feasible reference path with the
// same kinematics as the needle, places the target on it at tr_dist and the
// critical discs beside it, then validates with the solver that the
// fully-known map is winnable from the insertion pose. Throws
// GenerationError when placement keeps failing.
Scenario generate_scenario(const ScenarioParams& p, std::uint64_t seed,
                           const GenOptions& opts = {});

std::string scenario_to_json(const Scenario& sc);
Scenario scenario_from_json(const std::string& text);
void save_scenario(const Scenario& sc, const std::string& path);
Scenario load_scenario(const std::string& path);

}  // namespace onss
