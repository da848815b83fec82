#include "onss/game.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

namespace onss {

namespace {

// Collision status of one continuous push arc.
enum class SweepResult { Clear, Goal, Dead };

SweepResult sweep_push(const RegionMap& map, const NeedlePose& from, const KinematicsParams& kin,
                       double sample_ds) {
    double curvature = std::isinf(kin.radius) ? 0.0 : from.bevel / kin.radius;
    int n = std::max(1, static_cast<int>(std::ceil(kin.step_len / sample_ds)));
    NeedlePose end = from;
    for (int i = 0; i <= n; ++i) {
        NeedlePose p = advance_arc(from, kin.step_len * i / n, curvature);
        if (!map.workspace.contains(p.pos())) return SweepResult::Dead;
        RegionType t = classify(map, p.pos());
        if (t == RegionType::Critical || t == RegionType::Detection) return SweepResult::Dead;
        if (i == n) end = p;
    }
    return classify(map, end.pos()) == RegionType::Target ? SweepResult::Goal
                                                          : SweepResult::Clear;
}

bool tr_intersects_workspace(const RegionMap& map) {
    Vec2 c = map.tr.center;
    Vec2 nearest{std::clamp(c.x, map.workspace.x0, map.workspace.x1),
                 std::clamp(c.y, map.workspace.y0, map.workspace.y1)};
    return dist(c, nearest) <= map.tr.radius;
}

}  // namespace

std::optional<StateId> GameGraph::find(QuantizedState key) const {
    auto it = index.find(quantized_key(key));
    if (it == index.end()) return std::nullopt;
    return it->second;
}

GameGraph build_game(const RegionMap& map, const GridSpec& grid, const KinematicsParams& kin,
                     const NeedlePose& start_pose, const BuildOptions& opts) {
    if (map.workspace.width() <= 0.0 || map.workspace.height() <= 0.0) {
        throw std::invalid_argument("build_game: empty workspace");
    }
    if (!tr_intersects_workspace(map)) {
        throw std::invalid_argument("build_game: target disc outside workspace");
    }
    if (!map.workspace.contains(start_pose.pos())) {
        throw std::domain_error("build_game: start pose outside workspace");
    }

    GameGraph g;
    g.grid = grid;
    g.kin = kin;
    g.workspace = map.workspace;

    std::deque<StateId> frontier;

    auto intern = [&](const NeedlePose& pose) -> StateId {
        QuantizedState key = quantize(pose, grid, map.workspace);
        auto [it, inserted] = g.index.try_emplace(quantized_key(key),
                                                  static_cast<StateId>(g.keys.size()));
        if (inserted) {
            g.keys.push_back(key);
            NeedlePose anchor = pose;
            if (opts.cell_center_anchors) {
                anchor.x = (key.cx + 0.5) * grid.cell;
                anchor.y = (key.cy + 0.5) * grid.cell;
                anchor.theta = key.heading * grid.heading_quantum();
            }
            g.anchors.push_back(anchor);
            frontier.push_back(it->second);
        }
        return it->second;
    };

    // Sinks are appended after all states are known; collect edges against
    // provisional ids and remap at the end.
    constexpr StateId kGoal = 0xfffffffe;
    constexpr StateId kDead = 0xffffffff;

    RegionType start_type = classify(map, start_pose.pos());
    bool start_goal = start_type == RegionType::Target;
    bool start_dead = start_type == RegionType::Critical || start_type == RegionType::Detection;

    std::vector<std::uint32_t> action_begin{0};
    if (!start_goal && !start_dead) {
        g.start = intern(start_pose);
    }

    std::vector<std::pair<StateId, std::int8_t>> succ_buf;
    while (!frontier.empty()) {
        StateId s = frontier.front();
        frontier.pop_front();
        NeedlePose anchor = g.anchors[s];

        // Push: sweep-checked arc, then the environment picks a deviation.
        {
            succ_buf.clear();
            SweepResult sweep = sweep_push(map, anchor, kin, opts.sweep_sample_ds);
            if (sweep == SweepResult::Dead) {
                succ_buf.emplace_back(kDead, 0);
            } else if (sweep == SweepResult::Goal) {
                succ_buf.emplace_back(kGoal, 0);
            } else {
                double curvature = std::isinf(kin.radius) ? 0.0 : anchor.bevel / kin.radius;
                NeedlePose end = advance_arc(anchor, kin.step_len, curvature);
                // Nominal deviation first so its successor always keeps the 0 label.
                for (int dev : {0, -1, +1}) {
                    if (std::abs(dev) > opts.deviation_quanta) continue;
                    NeedlePose kicked = end;
                    kicked.theta = normalize_angle(end.theta + dev * kin.max_deviation);
                    StateId to = intern(kicked);
                    bool dup = false;
                    for (auto& [prev, _] : succ_buf) dup |= (prev == to);
                    if (!dup) succ_buf.emplace_back(to, static_cast<std::int8_t>(dev));
                }
            }
            g.action_kind.push_back(Action::Push);
            g.action_owner.push_back(s);
            for (auto& [to, dev] : succ_buf) {
                g.succ.push_back(to);
                g.succ_dev.push_back(dev);
            }
            g.succ_begin.push_back(static_cast<std::uint32_t>(g.succ.size()));
        }

        // Rotate: bevel flip in place, no environment move.
        {
            NeedlePose twin = anchor;
            twin.bevel = -anchor.bevel;
            StateId to = intern(twin);
            g.action_kind.push_back(Action::Rotate);
            g.action_owner.push_back(s);
            g.succ.push_back(to);
            g.succ_dev.push_back(0);
            g.succ_begin.push_back(static_cast<std::uint32_t>(g.succ.size()));
        }

        action_begin.push_back(static_cast<std::uint32_t>(g.action_kind.size()));
    }

    // succ_begin currently lacks the leading zero.
    g.succ_begin.insert(g.succ_begin.begin(), 0);
    g.action_begin = std::move(action_begin);

    g.goal_id = static_cast<StateId>(g.n_states());
    g.dead_id = g.goal_id + 1;
    for (StateId& to : g.succ) {
        if (to == kGoal) to = g.goal_id;
        else if (to == kDead) to = g.dead_id;
    }
    if (start_goal) g.start = g.goal_id;
    if (start_dead) g.start = g.dead_id;
    return g;
}

Attractor attractor(const GameGraph& g) {
    std::size_t nodes = g.n_nodes();
    Attractor at;
    at.winning.assign(nodes, 0);
    at.rank.assign(nodes, 0);

    // Predecessor index: for every node, the actions that can land on it.
    std::vector<std::uint32_t> pred_begin(nodes + 1, 0);
    for (StateId to : g.succ) pred_begin[to + 1]++;
    for (std::size_t i = 1; i <= nodes; ++i) pred_begin[i] += pred_begin[i - 1];
    std::vector<std::uint32_t> pred(g.succ.size());
    {
        std::vector<std::uint32_t> fill(pred_begin.begin(), pred_begin.end() - 1);
        for (std::uint32_t a = 0; a < g.n_actions(); ++a) {
            for (std::uint32_t e = g.succ_begin[a]; e < g.succ_begin[a + 1]; ++e) {
                pred[fill[g.succ[e]]++] = a;
            }
        }
    }

    // Remaining not-yet-winning successors per action; an action becomes a
    // witness when the count hits zero.
    std::vector<std::uint32_t> remaining(g.n_actions());
    for (std::uint32_t a = 0; a < g.n_actions(); ++a) {
        remaining[a] = g.succ_begin[a + 1] - g.succ_begin[a];
    }

    at.winning[g.goal_id] = 1;
    std::vector<StateId> layer{g.goal_id};
    std::vector<StateId> next;
    std::uint32_t depth = 0;
    while (!layer.empty()) {
        ++depth;
        next.clear();
        for (StateId w : layer) {
            for (std::uint32_t pi = pred_begin[w]; pi < pred_begin[w + 1]; ++pi) {
                std::uint32_t a = pred[pi];
                if (--remaining[a] == 0) {
                    StateId owner = g.action_owner[a];
                    if (!at.winning[owner]) {
                        at.winning[owner] = 1;
                        at.rank[owner] = depth;
                        next.push_back(owner);
                    }
                }
            }
        }
        layer.swap(next);
        if (!layer.empty()) at.layers = depth;
    }
    return at;
}

bool Strategy::allows(const GameGraph& g, StateId s, std::uint32_t a) const {
    if (s >= g.n_states() || !attr.winning[s] || g.action_owner[a] != s) return false;
    std::uint32_t r = attr.rank[s];
    if (g.succ_begin[a] == g.succ_begin[a + 1]) return false;
    for (std::uint32_t e = g.succ_begin[a]; e < g.succ_begin[a + 1]; ++e) {
        StateId to = g.succ[e];
        if (!attr.winning[to] || attr.rank[to] >= r) return false;
    }
    return true;
}

std::vector<std::uint32_t> Strategy::allowed_actions(const GameGraph& g, StateId s) const {
    std::vector<std::uint32_t> out;
    if (s >= g.n_states()) return out;
    for (std::uint32_t a = g.action_begin[s]; a < g.action_begin[s + 1]; ++a) {
        if (allows(g, s, a)) out.push_back(a);
    }
    return out;
}

std::optional<Strategy> solve(const GameGraph& g) {
    Strategy st{attractor(g)};
    if (!st.attr.winning[g.start]) return std::nullopt;
    return st;
}

bool check_winning(const Strategy& st, const GameGraph& g) {
    if (g.is_goal(g.start)) return true;
    if (g.is_dead(g.start) || !st.state_winning(g.start)) return false;

    // Iterative three-color DFS over the strategy-closed subgraph. A gray
    // revisit is a cycle, i.e. a play that never reaches GOAL.
    enum : std::uint8_t { White, Gray, Black };
    std::vector<std::uint8_t> color(g.n_nodes(), White);
    struct Frame {
        StateId s;
        std::vector<std::uint32_t> actions;
        std::size_t ai = 0;  // action cursor
        std::uint32_t ei = 0;  // successor cursor within current action
    };
    std::vector<Frame> stack;
    auto enter = [&](StateId s) -> bool {
        if (g.is_goal(s) || color[s] == Black) return true;  // already verified
        if (g.is_dead(s) || !st.state_winning(s)) return false;
        if (color[s] == Gray) return false;
        color[s] = Gray;
        Frame f{s, st.allowed_actions(g, s)};
        if (f.actions.empty()) return false;  // deadlock short of the goal
        stack.push_back(std::move(f));
        return true;
    };
    if (!enter(g.start)) return false;
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.ai == f.actions.size()) {
            color[f.s] = Black;
            stack.pop_back();
            continue;
        }
        std::uint32_t a = f.actions[f.ai];
        std::uint32_t base = g.succ_begin[a];
        if (base + f.ei == g.succ_begin[a + 1]) {
            ++f.ai;
            f.ei = 0;
            continue;
        }
        StateId to = g.succ[base + f.ei++];
        if (g.is_goal(to) || color[to] == Black) continue;
        if (!enter(to)) return false;
    }
    return true;
}

namespace {

// Plans re-verify their continuous sweep because predicted poses are
// integrated from the live start pose, not from the quantized anchors the
// graph was checked with.
bool recheck_plan(const Plan& plan, const RegionMap& map, const KinematicsParams& kin,
                  double sample_ds) {
    for (std::size_t i = 0; i < plan.actions.size(); ++i) {
        if (plan.actions[i] != Action::Push) continue;
        const NeedlePose& from = plan.poses[i];
        double curvature = std::isinf(kin.radius) ? 0.0 : from.bevel / kin.radius;
        int n = std::max(1, static_cast<int>(std::ceil(kin.step_len / sample_ds)));
        for (int k = 0; k <= n; ++k) {
            NeedlePose p = advance_arc(from, kin.step_len * k / n, curvature);
            if (!map.workspace.contains(p.pos())) return false;
            RegionType t = classify(map, p.pos());
            if (t == RegionType::Critical || t == RegionType::Detection) return false;
        }
    }
    return classify(map, plan.poses.back().pos()) == RegionType::Target;
}

}  // namespace

std::vector<Plan> extract_plans(const GameGraph& g, const Strategy& st, const RegionMap& map,
                                const NeedlePose& start_pose, std::size_t max_plans) {
    if (!st.state_winning(g.start)) {
        throw std::invalid_argument("extract_plans: start state is not winning");
    }
    std::vector<Plan> plans;
    if (max_plans == 0) return plans;
    if (g.is_goal(g.start)) {
        Plan p;
        p.poses.push_back(start_pose);
        p.state_path.push_back(g.start);
        p.metrics = compute_plan_metrics(p, map, g.kin);
        plans.push_back(std::move(p));
        return plans;
    }

    std::vector<Action> actions;
    std::vector<NeedlePose> poses{start_pose};
    std::vector<StateId> states{g.start};

    // Allowed actions strictly decrease the attractor rank, so recursion
    // depth is bounded by rank(start) and no cycle bookkeeping is needed.
    auto dfs = [&](auto&& self, StateId s) -> void {
        if (plans.size() >= max_plans) return;
        for (std::uint32_t a : st.allowed_actions(g, s)) {
            if (plans.size() >= max_plans) return;
            // Nominal-deviation successor carries the 0 label.
            StateId to = g.dead_id;
            for (std::uint32_t e = g.succ_begin[a]; e < g.succ_begin[a + 1]; ++e) {
                if (g.succ_dev[e] == 0) {
                    to = g.succ[e];
                    break;
                }
            }
            actions.push_back(g.action_kind[a]);
            poses.push_back(apply_action(poses.back(), g.action_kind[a], g.kin));
            states.push_back(to);
            if (g.is_goal(to)) {
                Plan p{actions, poses, states, {}};
                if (recheck_plan(p, map, g.kin, 0.5)) {
                    p.metrics = compute_plan_metrics(p, map, g.kin);
                    plans.push_back(std::move(p));
                }
            } else if (!g.is_dead(to)) {
                self(self, to);
            }
            actions.pop_back();
            poses.pop_back();
            states.pop_back();
        }
    };
    dfs(dfs, g.start);
    return plans;
}

void dump_game(std::ostream& os, const GameGraph& g, const Strategy* st) {
    os << "states " << g.n_states() << " actions " << g.n_actions() << " goal " << g.goal_id
       << " dead " << g.dead_id << " start " << g.start << "\n";
    for (StateId s = 0; s < g.n_states(); ++s) {
        const QuantizedState& k = g.keys[s];
        os << s << " cell (" << k.cx << "," << k.cy << ") h " << k.heading << " b " << k.bevel;
        if (st) {
            os << (st->state_winning(s) ? " win" : " lose");
            if (st->state_winning(s)) os << " rank " << st->attr.rank[s];
        }
        os << "\n";
        for (std::uint32_t a = g.action_begin[s]; a < g.action_begin[s + 1]; ++a) {
            os << "  " << to_string(g.action_kind[a]);
            if (st && st->allows(g, s, a)) os << "*";
            os << " ->";
            for (std::uint32_t e = g.succ_begin[a]; e < g.succ_begin[a + 1]; ++e) {
                StateId to = g.succ[e];
                os << " ";
                if (g.is_goal(to)) os << "GOAL";
                else if (g.is_dead(to)) os << "DEAD";
                else os << to;
                os << "(dev " << static_cast<int>(g.succ_dev[e]) << ")";
            }
            os << "\n";
        }
    }
}

}  // namespace onss
