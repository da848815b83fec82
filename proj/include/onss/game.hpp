#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <unordered_map>
#include <vector>

#include "onss/kinematics.hpp"
#include "onss/optimizer.hpp"
#include "onss/regions.hpp"

namespace onss {

using StateId = std::uint32_t;

// Discrete two-player reachability game over quantized needle states plus the
// GOAL/DEAD sinks. Controllable moves (push, rotate) strictly alternate with
// uncontrollable heading deviations; a push whose swept arc touches a known
// critical disc or its detection annulus leads to DEAD, a push ending inside
// the target disc leads to GOAL.
//
// States are discovered by forward search from the start pose. Each state is
// anchored at the exact continuous pose it was first reached with, so the
// sub-quantum heading progress of pushing is not flattened away by the grid.
// Stored in CSR form: state -> actions -> deduplicated successors.
struct GameGraph {
    GridSpec grid;
    KinematicsParams kin;
    Rect workspace;

    std::vector<QuantizedState> keys;
    std::vector<NeedlePose> anchors;
    std::unordered_map<std::uint64_t, StateId> index;  // quantized_key -> state

    std::vector<std::uint32_t> action_begin;  // per state, size n_states()+1
    std::vector<Action> action_kind;
    std::vector<std::uint32_t> action_owner;
    std::vector<std::uint32_t> succ_begin;    // per action, size action count+1
    std::vector<StateId> succ;
    std::vector<std::int8_t> succ_dev;        // deviation quanta label per successor

    StateId start = 0;
    StateId goal_id = 0;
    StateId dead_id = 0;

    std::size_t n_states() const { return keys.size(); }  // excluding sinks
    std::size_t n_actions() const { return action_kind.size(); }
    std::size_t n_nodes() const { return n_states() + 2; }
    bool is_goal(StateId s) const { return s == goal_id; }
    bool is_dead(StateId s) const { return s == dead_id; }

    // Index of the state with the given key, if discovered.
    std::optional<StateId> find(QuantizedState key) const;
};

struct BuildOptions {
    // Uncontrollable heading quanta the environment may apply per push:
    // 0 gives the nominal single-successor game, 1 gives the {-1,0,+1} game.
    int deviation_quanta = 0;
    double sweep_sample_ds = 0.5;  // arc collision-check sampling interval (mm)
    // Anchor every state at the center of its grid cell instead of the first
    // continuous pose that reached it. Canonical but flattens sub-quantum
    // heading progress; used by tests that need identical state spaces.
    bool cell_center_anchors = false;
};

// Composes the environment map with the needle dynamics into a game rooted at
// start_pose. Requires the start inside the workspace and the target disc
// intersecting it. A start inside the target maps directly to GOAL; a start
// inside a critical disc or its annulus maps to DEAD.
GameGraph build_game(const RegionMap& map, const GridSpec& grid, const KinematicsParams& kin,
                     const NeedlePose& start_pose, const BuildOptions& opts = {});

// Controller-forced reachability fixpoint: W0 = {GOAL},
// W(i+1) = W(i) + {s | some action has all deviation successors in W(i)}.
// rank[s] is the layer at which s entered.
struct Attractor {
    std::vector<std::uint8_t> winning;  // per node, sinks included
    std::vector<std::uint32_t> rank;
    std::size_t layers = 0;
};

Attractor attractor(const GameGraph& g);

// Most-permissive progress strategy on the winning region: an action is
// allowed at s when every deviation successor is winning with strictly
// smaller rank, i.e. it forces the goal closer against every environment
// choice. Every play that follows allowed actions reaches GOAL within
// rank(start) moves.
struct Strategy {
    Attractor attr;

    bool state_winning(StateId s) const { return attr.winning[s] != 0; }
    bool allows(const GameGraph& g, StateId s, std::uint32_t action_index) const;
    std::vector<std::uint32_t> allowed_actions(const GameGraph& g, StateId s) const;
};

// NoStrategy (nullopt) exactly when the start state is not winning.
std::optional<Strategy> solve(const GameGraph& g);

// Independent verifier: exhaustively explores the strategy-closed subgraph
// from the start and accepts only if every path under every deviation choice
// reaches GOAL, without touching DEAD and without cycling.
bool check_winning(const Strategy& st, const GameGraph& g);

// Depth-first enumeration of nominal-deviation plans from the start state to
// GOAL (push tried before rotate), up to max_plans. Predicted poses are
// integrated continuously from start_pose and each plan's swept path is
// re-checked against the map; plans whose continuous sweep clips a critical
// disc or annulus, leaves the workspace, or misses the target are dropped.
// Throws if the start state is not winning.
std::vector<Plan> extract_plans(const GameGraph& g, const Strategy& st, const RegionMap& map,
                                const NeedlePose& start_pose, std::size_t max_plans);

// Structured-text dump of the graph and, when given, the winning region.
void dump_game(std::ostream& os, const GameGraph& g, const Strategy* st = nullptr);

}  // namespace onss
