#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "onss/game.hpp"
#include "onss/matcher.hpp"
#include "onss/plant.hpp"
#include "onss/scenario.hpp"

namespace onss {

struct EngineConfig {
    GridSpec grid{1.0, 16};
    KinematicsParams kin{2.0, 50.0, kTau / 16.0};
    // Uncontrollable heading quanta modeled per push during synthesis. The
    // nominal game (0) plans on deviation-free dynamics and leaves execution
    // noise to the matcher; 1 gives the adversarial {-1,0,+1} game.
    int game_deviation_quanta = 0;
    NoiseModel noise{3.0, 2.0, 0.3, 0.13};
    ForceModel force{1.0, 10.0};
    double sample_spacing = 0.5;   // observation cadence (mm of progress)
    double force_threshold = 6.0;  // baseline + dr_gain * 0.5mm of penetration
    double eps_match = 2.0;        // positional deviation tolerance (mm)
    double pullback_len = 6.0;     // readjustment rollback distance (mm)
    std::size_t max_plans = 32;
    CostWeights weights;
    double clearance_target = 10.0;  // 2 * dr_width
    std::size_t step_budget = 600;
    double wall_timeout_s = 120.0;
    double max_sensor_error = 3.0;  // margin-validation error budget (mm)
    // Report all times as zero and ignore the wall clock so batches are
    // byte-reproducible; episode classification then rests on step_budget.
    bool deterministic_time = false;
};

struct EpisodeResult {
    enum class Outcome { Success, Aborted, Timeout };

    Outcome outcome = Outcome::Aborted;
    std::size_t readjustments = 0;  // number of pullback invocations
    std::vector<double> synthesis_times_s;
    double overall_s = 0.0;
    std::size_t discovered_crs = 0;
    Trace final_trace;  // ground-truth trace as physically left behind

    // diagnostics
    std::vector<Region> discovered;  // model discs added online
    std::size_t steps = 0;
    std::size_t deviation_events = 0;
    std::size_t detection_events = 0;
    NeedlePose final_true_pose;

    // One row per emitted observation, in execution order. Pullbacks truncate
    // final_trace, so safety audits must use these rows: they cover every
    // point the tip ever visited at the sampling resolution.
    struct TraceRow {
        std::uint64_t sample = 0;
        Vec2 true_pos;
        Vec2 measured_pos;
        double force = 0.0;
        Action action = Action::Push;
    };
    std::vector<TraceRow> rows;

    std::vector<std::vector<Vec2>> initial_plans;  // predicted paths, first synthesis
    RegionMap final_model;
};

const char* to_string(EpisodeResult::Outcome o);

// Per-action trail for tests: the quantized state each action was issued
// from and whether the active strategy allowed it there.
struct EpisodeDebug {
    struct ActionRecord {
        QuantizedState state;
        Action action;
        bool allowed = false;
    };
    std::vector<ActionRecord> actions;
    std::vector<std::string> events;
};

// Runs one execute-observe-match-resynthesize-readjust episode. Throws
// std::invalid_argument before any execution when the margin rule or the
// config invariants fail.
EpisodeResult run_episode(const Scenario& sc, const EngineConfig& cfg, std::uint64_t seed,
                          EpisodeDebug* debug = nullptr);

}  // namespace onss
