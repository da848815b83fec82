#include "onss/engine.hpp"

#include <chrono>
#include <cmath>
#include <unordered_set>

namespace onss {

const char* to_string(EpisodeResult::Outcome o) {
    switch (o) {
        case EpisodeResult::Outcome::Success: return "Success";
        case EpisodeResult::Outcome::Aborted: return "Aborted";
        case EpisodeResult::Outcome::Timeout: return "Timeout";
    }
    return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Vec2 clamp_into(const Rect& ws, Vec2 p) {
    const double eps = 1e-6;
    return {std::clamp(p.x, ws.x0 + eps, ws.x1 - eps),
            std::clamp(p.y, ws.y0 + eps, ws.y1 - eps)};
}

}  // namespace

EpisodeResult run_episode(const Scenario& sc, const EngineConfig& cfg, std::uint64_t seed,
                          EpisodeDebug* debug) {
    RegionMap model = sc.model_map();
    if (!validate_margins(model, cfg.sample_spacing, cfg.max_sensor_error)) {
        throw std::invalid_argument("run_episode: detection margins too small for the sensors");
    }
    if (cfg.pullback_len < cfg.kin.step_len) {
        throw std::invalid_argument("run_episode: pullback_len must cover at least one step");
    }
    if (cfg.noise.deviation_max > cfg.kin.max_deviation) {
        throw std::invalid_argument("run_episode: plant deviation exceeds the modeled bound");
    }

    const Clock::time_point t_begin = Clock::now();
    auto elapsed = [&] { return cfg.deterministic_time ? 0.0 : seconds_since(t_begin); };

    EpisodeResult res;
    EngineConfig c = cfg;
    CostWeights weights = sc.weights.value_or(cfg.weights);

    GroundTruth world = make_ground_truth(sc.true_map(), sc.start, c.kin, seed, c.noise, c.force,
                                          c.sample_spacing);

    // The position error is mostly static; one measurement at the known
    // insertion pose calibrates it away, leaving only jitter.
    Vec2 offset_est = plant_observe(world).measured_pos - sc.start.pos();
    auto corrected = [&](Observation o) {
        o.measured_pos = o.measured_pos - offset_est;
        return o;
    };

    NeedlePose model_pose = sc.start;
    Trace model_trace;
    model_trace.spacing = c.sample_spacing;
    model_trace.samples.push_back({model_pose, 0.0, std::nullopt});

    // Synthesis cache: the game depends only on the critical-disc knowledge,
    // not on the start state, so resyntheses after a plain deviation reuse
    // the solved graph when the new start is covered by it.
    std::uint64_t knowledge_version = 0;
    std::uint64_t cache_version = ~0ULL;
    std::optional<GameGraph> graph;
    std::optional<Strategy> strat;

    std::optional<Plan> plan;
    std::size_t plan_idx = 0;
    double plan_progress = 0.0;
    bool first_synth = true;
    std::size_t denied_at_step = static_cast<std::size_t>(-1);

    std::unordered_set<std::uint64_t> visited;  // (quantized pose, knowledge) after readjusts
    auto visited_key = [&](QuantizedState q) {
        return quantized_key(q) ^ (knowledge_version * 0x9e3779b97f4a7c15ULL);
    };

    auto at_insertion = [&] { return model_trace.total_len() < c.sample_spacing * 0.5; };

    auto log = [&](std::string msg) {
        if (debug) debug->events.push_back(std::move(msg));
    };

    // Snaps the model pose onto the observed path tip; the heading comes from
    // a chord over the recent executed path plus an arc correction.
    auto snap_model_to_trace = [&] {
        const auto& samples = model_trace.samples;
        Vec2 tip = samples.back().pose.pos();
        double total = model_trace.total_len();
        Vec2 from = samples.front().pose.pos();
        for (auto it = samples.rbegin(); it != samples.rend(); ++it) {
            if (it->arc_len <= total - 3.0) {
                from = it->pose.pos();
                break;
            }
        }
        Vec2 chord = tip - from;
        double theta = model_pose.theta;
        if (chord.norm() > 0.5) {
            theta = normalize_angle(std::atan2(chord.y, chord.x) +
                                    model_pose.bevel * chord.norm() / (2.0 * c.kin.radius));
        }
        model_pose = {tip.x, tip.y, theta, model_pose.bevel};
    };

    auto synthesize = [&]() -> bool {
        Clock::time_point t0 = Clock::now();
        bool have = false;
        QuantizedState q = quantize(model_pose, c.grid, sc.workspace);

        bool reusable = graph && cache_version == knowledge_version;
        if (reusable) {
            auto s = graph->find(q);
            if (s && strat->state_winning(*s)) {
                graph->start = *s;
            } else {
                reusable = false;
            }
        }
        if (!reusable) {
            graph = build_game(model, c.grid, c.kin, model_pose,
                               {c.game_deviation_quanta, 0.5, false});
            strat = Strategy{attractor(*graph)};
            cache_version = knowledge_version;
        }
        bool confirmation_blocked = graph->is_goal(graph->start) && denied_at_step == res.steps;
        if (strat->state_winning(graph->start) && !confirmation_blocked) {
            std::vector<Plan> plans =
                extract_plans(*graph, *strat, model, model_pose, c.max_plans);
            if (!plans.empty()) {
                if (first_synth) {
                    for (const Plan& p : plans) {
                        std::vector<Vec2> path;
                        for (const NeedlePose& pose : p.poses) path.push_back(pose.pos());
                        res.initial_plans.push_back(std::move(path));
                    }
                }
                plan = select_plan(plans, weights, model, c.clearance_target);
                plan_idx = 0;
                plan_progress = 0.0;
                have = true;
            }
        }
        first_synth = false;
        res.synthesis_times_s.push_back(cfg.deterministic_time ? 0.0 : seconds_since(t0));
        return have;
    };

    // One rollback: both worlds retract along their recorded paths, then the
    // loop-breaker retracts further while the (pose, knowledge) pair is one
    // we already replanned from. Returns false when the episode must abort.
    auto readjust = [&]() -> bool {
        for (;;) {
            res.readjustments++;
            log("pullback");
            plant_pullback(world, c.pullback_len);
            PullbackResult r = invert_path(model_trace, c.pullback_len);
            int bevel = model_pose.bevel;  // pulling does not roll the shaft
            model_trace = std::move(r.trace);
            model_pose = r.pose;
            model_pose.bevel = bevel;
            std::uint64_t key = visited_key(quantize(model_pose, c.grid, sc.workspace));
            if (!visited.contains(key)) {
                visited.insert(key);
                return true;
            }
            if (r.start_re_reached) {
                log("readjust: insertion re-reached with no new knowledge");
                return false;
            }
        }
    };

    auto finish = [&](EpisodeResult::Outcome o) {
        res.outcome = o;
        res.overall_s = elapsed();
        res.discovered_crs = res.discovered.size();
        res.final_trace = world.trace;
        res.final_true_pose = world.pose;
        res.final_model = model;
        return res;
    };

    // Initial synthesis; nothing to roll back to if it already fails.
    if (!synthesize()) {
        log("initial synthesis found no strategy");
        return finish(EpisodeResult::Outcome::Aborted);
    }

    for (;;) {
        // Success: the model believes the target disc is reached and the
        // plant confirms it. A denied confirmation suppresses re-checking
        // until the needle has actually moved again, otherwise a measurement
        // landing just inside the disc could spin the loop in place.
        if (denied_at_step != res.steps &&
            dist(model_pose.pos(), sc.tr.center) <= sc.tr.radius) {
            if (dist(world.pose.pos(), sc.tr.center) <= sc.tr.radius) {
                return finish(EpisodeResult::Outcome::Success);
            }
            // Measurement says otherwise: re-anchor the model and replan.
            Observation ob = corrected(plant_observe(world));
            Vec2 p = clamp_into(sc.workspace, ob.measured_pos);
            model_pose.x = p.x;
            model_pose.y = p.y;
            plan.reset();
            denied_at_step = res.steps;
            log("target confirmation failed; re-anchored");
        }

        if (res.steps >= c.step_budget) return finish(EpisodeResult::Outcome::Timeout);
        if (!cfg.deterministic_time && elapsed() > c.wall_timeout_s) {
            log("wall timeout exceeded");
            return finish(EpisodeResult::Outcome::Timeout);
        }

        if (!plan) {
            if (!synthesize()) {
                if (at_insertion()) {
                    log("no strategy from the insertion pose");
                    return finish(EpisodeResult::Outcome::Aborted);
                }
                if (!readjust()) return finish(EpisodeResult::Outcome::Aborted);
            }
            continue;
        }
        if (plan_idx >= plan->actions.size()) {
            // Plan ran out without entering the target (drift): replan.
            plan.reset();
            continue;
        }

        Action a = plan->actions[plan_idx];

        // Every executed action must be allowed by the active strategy at the
        // game state the model currently occupies, which under nominal
        // execution is the plan's own state path.
        {
            StateId s = plan->state_path[plan_idx];
            bool allowed = false;
            for (std::uint32_t ai : strat->allowed_actions(*graph, s)) {
                allowed |= graph->action_kind[ai] == a;
            }
            if (!allowed) {
                plan.reset();
                log("action no longer allowed at the current state; replanning");
                continue;
            }
            if (debug) debug->actions.push_back({graph->keys[s], a, true});
        }

        NeedlePose before = model_pose;
        StepResult step = plant_step(world, a);
        res.steps++;
        if (step.rejected) {
            log("plant rejected a step at the workspace boundary");
            plan.reset();
            if (!readjust()) return finish(EpisodeResult::Outcome::Aborted);
            continue;
        }

        // Advance the model along the plan's prediction and log the batch.
        model_pose = plan->poses[plan_idx + 1];
        plan_idx++;
        std::vector<Observation> batch;
        batch.reserve(step.observations.size());
        if (!step.observations.empty()) {
            std::size_t n = step.observations.size();
            double ds = c.kin.step_len / static_cast<double>(n);
            double base_len = model_trace.total_len();
            double curvature = std::isinf(c.kin.radius) ? 0.0 : before.bevel / c.kin.radius;
            std::vector<Cell> cells;
            for (std::size_t k = 0; k < n; ++k) {
                const Observation& raw = step.observations[k];
                Observation ob = corrected(raw);
                Vec2 p = clamp_into(sc.workspace, ob.measured_pos);
                cells.push_back(model.cell_of(p));
                double heading = advance_arc(before, ds * (k + 1), curvature).theta;
                model_trace.samples.push_back(
                    {{p.x, p.y, heading, model_pose.bevel}, base_len + ds * (k + 1), a});
                Vec2 true_pos =
                    world.trace.samples[world.trace.samples.size() - n + k].pose.pos();
                res.rows.push_back({raw.sample_index, true_pos, raw.measured_pos, raw.force, a});
                batch.push_back(ob);
            }
            model = mark_safe(model, cells);
            plan_progress += c.kin.step_len;
        }

        MatchResult m = match_batch(batch, *plan, c.kin, plan_progress, c.eps_match,
                                    c.force_threshold);
        switch (m.kind) {
            case MatchResult::Kind::Ok:
                break;
            case MatchResult::Kind::Detection: {
                res.detection_events++;
                // The batch is offset-corrected, so the boundary estimate is too.
                Vec2 est = clamp_into(sc.workspace, m.est_boundary_point);
                model = add_discovered_cr(model, est, sc.params.assumed_cr_size_mm);
                knowledge_version++;
                res.discovered.push_back({est, sc.params.assumed_cr_size_mm,
                                          RegionType::Critical});
                log("force detection; disc assumed and rolled back");
                plan.reset();
                if (!readjust()) return finish(EpisodeResult::Outcome::Aborted);
                break;
            }
            case MatchResult::Kind::Deviation: {
                res.deviation_events++;
                snap_model_to_trace();
                plan.reset();
                break;
            }
        }
    }
}

}  // namespace onss
