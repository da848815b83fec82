// onss: online strategy synthesis for simulated 2D needle steering.
//
// Subcommands: gen (scenario generation), synth (one-shot synthesis),
// run (single episode), batch (parameter sweep), render (trace to SVG).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "onss/engine.hpp"
#include "onss/game.hpp"
#include "onss/harness.hpp"
#include "onss/scenario.hpp"
#include "onss/svg.hpp"

namespace {

std::string out_path(const std::string& name) {
    if (const char* dir = std::getenv("ONSS_OUT_DIR")) {
        std::filesystem::create_directories(dir);
        return (std::filesystem::path(dir) / name).string();
    }
    return name;
}

void add_engine_flags(CLI::App* cmd, onss::EngineConfig& cfg) {
    cmd->add_option("--eps-match", cfg.eps_match, "positional deviation tolerance (mm)");
    cmd->add_option("--force-threshold", cfg.force_threshold, "detection force threshold");
    cmd->add_option("--pullback", cfg.pullback_len, "readjustment pullback length (mm)");
    cmd->add_option("--max-plans", cfg.max_plans, "plan extraction cap");
    cmd->add_option("--step-budget", cfg.step_budget, "action budget per episode");
    cmd->add_option("--timeout", cfg.wall_timeout_s, "wall timeout per episode (s)");
    cmd->add_option("--deviation", cfg.noise.deviation_max,
                    "plant heading deviation bound per push (rad)");
    cmd->add_option("--jitter", cfg.noise.jitter_max, "measurement jitter bound (mm)");
    cmd->add_option("--game-deviations", cfg.game_deviation_quanta,
                    "uncontrollable heading quanta per push in the game (0 or 1)");
    cmd->add_option("--grid-cell", cfg.grid.cell, "quantization cell (mm)");
    cmd->add_option("--headings", cfg.grid.headings, "discrete heading count");
    cmd->add_option("--step-len", cfg.kin.step_len, "push step length (mm)");
    cmd->add_option("--radius", cfg.kin.radius, "needle arc radius (mm)");
    cmd->add_option("--w-rot", cfg.weights.rot, "cost per rotation");
    cmd->add_option("--w-len", cfg.weights.len, "cost per mm of path");
    cmd->add_option("--w-clear", cfg.weights.clear, "cost per mm of clearance deficit");
    cmd->add_option("--w-ur", cfg.weights.ur, "cost per mm through unknown regions");
    cmd->add_option("--w-center", cfg.weights.center, "cost per mm of final center distance");
    cmd->add_option("--clearance-target", cfg.clearance_target, "clearance target (mm)");
    cmd->add_flag("--deterministic-time", cfg.deterministic_time,
                  "report zero times; classification by step budget only");
}

void add_param_flags(CLI::App* cmd, onss::ScenarioParams& p) {
    cmd->add_option("--n-crs", p.n_crs, "number of critical discs");
    cmd->add_option("--cr-size", p.cr_size_mm, "true critical disc radius (mm)");
    cmd->add_option("--assumed-cr-size", p.assumed_cr_size_mm,
                    "radius assumed for discovered discs (mm)");
    cmd->add_option("--tr-dist", p.tr_dist_mm, "target distance along the reference path (mm)");
    cmd->add_option("--known-pct", p.known_pct, "share of discs known up front (%)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"online strategy synthesis for simulated 2D needle steering"};
    app.require_subcommand(1);

    onss::EngineConfig cfg;
    onss::ScenarioParams params;

    // gen
    auto* gen = app.add_subcommand("gen", "generate a scenario file");
    std::uint64_t gen_seed = 1;
    std::string gen_out = "scenario.json";
    add_param_flags(gen, params);
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("-o,--out", gen_out, "output scenario file");

    // synth
    auto* synth = app.add_subcommand("synth", "synthesize once and report the strategy");
    std::string synth_scenario;
    bool synth_dump = false;
    synth->add_option("--scenario", synth_scenario, "scenario file")->required();
    synth->add_flag("--dump", synth_dump, "dump the game graph and winning region");
    add_engine_flags(synth, cfg);

    // run
    auto* run = app.add_subcommand("run", "run one episode");
    std::string run_scenario, run_trace, run_svg;
    std::uint64_t run_seed = 1;
    run->add_option("--scenario", run_scenario, "scenario file")->required();
    run->add_option("--seed", run_seed, "episode seed");
    run->add_option("--trace", run_trace, "write the observation trace CSV here");
    run->add_option("--svg", run_svg, "render the episode to SVG here");
    add_engine_flags(run, cfg);

    // batch
    auto* batch = app.add_subcommand("batch", "run the experiment sweep");
    std::size_t batch_runs = 20;
    std::uint64_t batch_base_seed = 1000;
    std::string batch_out = "episodes.csv";
    std::string batch_axis;
    batch->add_option("--runs", batch_runs, "episodes per parametrization");
    batch->add_option("--base-seed", batch_base_seed, "first episode seed");
    batch->add_option("-o,--out", batch_out, "episodes CSV output");
    batch->add_option("--axis", batch_axis, "restrict the sweep to one axis");
    add_engine_flags(batch, cfg);

    // render
    auto* render = app.add_subcommand("render", "re-run an episode and render it");
    std::string render_scenario, render_out = "trace.svg";
    std::uint64_t render_seed = 1;
    render->add_option("--scenario", render_scenario, "scenario file")->required();
    render->add_option("--seed", render_seed, "episode seed");
    render->add_option("-o,--out", render_out, "SVG output");
    add_engine_flags(render, cfg);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            onss::GenOptions g;
            g.grid = cfg.grid;
            g.kin = cfg.kin;
            onss::Scenario sc = onss::generate_scenario(params, gen_seed, g);
            onss::save_scenario(sc, out_path(gen_out));
            std::cout << "wrote " << out_path(gen_out) << " (" << sc.crs.size()
                      << " critical discs, tr at " << sc.tr.center.x << "," << sc.tr.center.y
                      << ")\n";
            return 0;
        }
        if (*synth) {
            onss::Scenario sc = onss::load_scenario(synth_scenario);
            onss::GameGraph g = onss::build_game(sc.model_map(), cfg.grid, cfg.kin, sc.start,
                                                 {cfg.game_deviation_quanta, 0.5, false});
            auto st = onss::solve(g);
            if (synth_dump) {
                onss::dump_game(std::cout, g, st ? &*st : nullptr);
            }
            if (!st) {
                std::cout << "NoStrategy\n";
                return 1;
            }
            auto plans = onss::extract_plans(g, *st, sc.model_map(), sc.start, cfg.max_plans);
            std::size_t winning = 0;
            for (std::size_t s = 0; s < g.n_states(); ++s) winning += st->state_winning(s);
            std::cout << "strategy: " << g.n_states() << " states, " << winning << " winning, "
                      << plans.size() << " plans\n";
            return 0;
        }
        if (*run) {
            onss::Scenario sc = onss::load_scenario(run_scenario);
            onss::EpisodeResult r = onss::run_episode(sc, cfg, run_seed);
            double synth_avg = 0;
            for (double t : r.synthesis_times_s) synth_avg += t;
            synth_avg /= static_cast<double>(r.synthesis_times_s.size());
            std::cout << "outcome=" << onss::to_string(r.outcome)
                      << " readjustments=" << r.readjustments
                      << " syntheses=" << r.synthesis_times_s.size() << " synth_avg_s="
                      << synth_avg << " discovered=" << r.discovered_crs
                      << " steps=" << r.steps << " overall_s=" << r.overall_s << "\n";
            if (!run_trace.empty()) {
                std::ofstream out(out_path(run_trace));
                onss::write_trace_csv(out, r);
            }
            if (!run_svg.empty()) {
                onss::render_trace_file(out_path(run_svg), sc, r);
            }
            switch (r.outcome) {
                case onss::EpisodeResult::Outcome::Success: return 0;
                case onss::EpisodeResult::Outcome::Aborted: return 1;
                case onss::EpisodeResult::Outcome::Timeout: return 2;
            }
        }
        if (*batch) {
            std::vector<onss::SweepPoint> sweep = onss::default_sweep();
            if (!batch_axis.empty()) {
                std::erase_if(sweep,
                              [&](const onss::SweepPoint& p) { return p.axis != batch_axis; });
            }
            onss::BatchResult res = onss::run_batch(sweep, batch_runs, batch_base_seed, cfg);
            std::ofstream out(out_path(batch_out));
            onss::write_batch_csv(out, res);
            onss::print_metrics(std::cout, res.table);
            std::cout << "wrote " << out_path(batch_out) << "\n";
            return 0;
        }
        if (*render) {
            onss::Scenario sc = onss::load_scenario(render_scenario);
            onss::EpisodeResult r = onss::run_episode(sc, cfg, render_seed);
            onss::render_trace_file(out_path(render_out), sc, r);
            std::cout << "wrote " << out_path(render_out) << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
