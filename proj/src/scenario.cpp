#include "onss/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include "json.hpp"
#include "onss/game.hpp"
#include "onss/rng.hpp"

namespace onss {

RegionMap Scenario::true_map() const {
    RegionMap m;
    m.workspace = workspace;
    m.tr = tr;
    m.dr_width = dr_width;
    m.safety_margin = safety_margin;
    for (const ScenarioCr& cr : crs) {
        m.crs.push_back({cr.center, cr.radius, RegionType::Critical});
    }
    return m;
}

RegionMap Scenario::model_map() const {
    RegionMap m;
    m.workspace = workspace;
    m.tr = tr;
    m.dr_width = dr_width;
    m.safety_margin = safety_margin;
    for (const ScenarioCr& cr : crs) {
        if (cr.known) m.crs.push_back({cr.center, cr.radius, RegionType::Critical});
    }
    return m;
}

namespace {

struct PathSample {
    Vec2 pos;
    double theta = 0.0;
    double arc_len = 0.0;
};

// Random feasible action sequence of the needle kinematics, fine-sampled.
// Fails (empty) when the draw leaves the inner workspace box.
std::vector<PathSample> draw_reference_path(Rng& rng, const NeedlePose& start, double total_len,
                                            const GenOptions& opts, const Rect& ws) {
    Rect inner{std::min(ws.x0 + opts.inner_margin, start.x), ws.y0 + opts.inner_margin,
               ws.x1 - opts.inner_margin, ws.y1 - opts.inner_margin};
    std::vector<PathSample> path{{start.pos(), start.theta, 0.0}};
    NeedlePose pose = start;
    double len = 0.0;
    const double ds = 0.5;
    while (len < total_len) {
        if (rng.chance(opts.rotate_prob)) {
            pose.bevel = -pose.bevel;
            continue;
        }
        double curvature = std::isinf(opts.kin.radius) ? 0.0 : pose.bevel / opts.kin.radius;
        int n = std::max(1, static_cast<int>(std::ceil(opts.kin.step_len / ds)));
        for (int k = 1; k <= n; ++k) {
            NeedlePose p = advance_arc(pose, opts.kin.step_len * k / n, curvature);
            if (!inner.contains(p.pos())) return {};
            path.push_back({p.pos(), p.theta, len + opts.kin.step_len * k / n});
        }
        pose = advance_arc(pose, opts.kin.step_len, curvature);
        len += opts.kin.step_len;
    }
    return path;
}

const PathSample& sample_at(const std::vector<PathSample>& path, double arc_len) {
    for (const PathSample& s : path) {
        if (s.arc_len + 1e-9 >= arc_len) return s;
    }
    return path.back();
}

}  // namespace

Scenario generate_scenario(const ScenarioParams& p, std::uint64_t seed, const GenOptions& opts) {
    Rng rng(seed ^ 0x5ce9a6d04cdbb9e1ULL);
    Scenario sc;
    sc.params = p;
    sc.seed = seed;
    sc.tr.radius = opts.tr_radius;

    for (int round = 0; round < opts.max_rounds; ++round) {
        // Reference path, retried until it stays inside the workspace.
        std::vector<PathSample> path;
        for (int t = 0; t < opts.max_path_tries && path.empty(); ++t) {
            path = draw_reference_path(rng, sc.start, p.tr_dist_mm + 6.0, opts, sc.workspace);
        }
        if (path.empty()) {
            // Straight fallback always fits the default workspace.
            Rng straight(seed);
            GenOptions st = opts;
            st.rotate_prob = 0.0;
            path = draw_reference_path(straight, sc.start, p.tr_dist_mm + 6.0, st, sc.workspace);
            if (path.empty()) throw GenerationError("generate_scenario: no reference path fits");
        }

        sc.tr.center = sample_at(path, p.tr_dist_mm).pos;

        // Critical discs flank the path: far enough that the reference path
        // clears disc + annulus + margin, near enough to matter.
        sc.crs.clear();
        bool placed_all = true;
        for (int i = 0; i < p.n_crs && placed_all; ++i) {
            bool placed = false;
            for (int t = 0; t < opts.max_place_tries && !placed; ++t) {
                const PathSample& at =
                    sample_at(path, rng.uniform(4.0, std::max(5.0, p.tr_dist_mm - 2.0)));
                double side = rng.chance(0.5) ? 1.0 : -1.0;
                double off = p.cr_size_mm + sc.dr_width + opts.lateral_margin +
                             rng.uniform(0.0, opts.lateral_spread);
                Vec2 normal = Vec2{std::cos(at.theta), std::sin(at.theta)}.perp() * side;
                Vec2 center = at.pos + normal * off;
                if (!sc.workspace.contains(center)) continue;
                if (dist(center, sc.tr.center) <=
                    p.cr_size_mm + sc.dr_width + sc.tr.radius + 0.5) {
                    continue;  // target disc must stay disjoint from disc + annulus
                }
                if (dist(center, sc.start.pos()) <= p.cr_size_mm + sc.dr_width + 1.0) {
                    continue;  // never bury the insertion pose
                }
                sc.crs.push_back({center, p.cr_size_mm, false});
                placed = true;
            }
            placed_all = placed;
        }
        if (!placed_all) continue;

        // Known flags: a deterministic random subset of the requested share.
        std::size_t n_known = static_cast<std::size_t>(
            std::llround(p.known_pct / 100.0 * static_cast<double>(sc.crs.size())));
        std::vector<std::size_t> order(sc.crs.size());
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[rng.uniform_index(i)]);
        }
        for (std::size_t i = 0; i < n_known && i < order.size(); ++i) {
            sc.crs[order[i]].known = true;
        }

        // A safe motion plan must exist on the fully-known map.
        GameGraph g = build_game(sc.true_map(), opts.grid, opts.kin, sc.start);
        if (!solve(g)) continue;

        sc.reference_path.clear();
        for (const PathSample& s : path) sc.reference_path.push_back(s.pos);
        return sc;
    }
    throw GenerationError("generate_scenario: no solvable placement found");
}

// --- serialization ---------------------------------------------------------

std::string scenario_to_json(const Scenario& sc) {
    nlohmann::json j;
    j["workspace"] = {{"x0", sc.workspace.x0},
                      {"y0", sc.workspace.y0},
                      {"x1", sc.workspace.x1},
                      {"y1", sc.workspace.y1}};
    j["crs"] = nlohmann::json::array();
    for (const ScenarioCr& cr : sc.crs) {
        j["crs"].push_back(
            {{"x", cr.center.x}, {"y", cr.center.y}, {"r", cr.radius}, {"known", cr.known}});
    }
    j["tr"] = {{"x", sc.tr.center.x}, {"y", sc.tr.center.y}, {"r", sc.tr.radius}};
    j["dr_width"] = sc.dr_width;
    j["safety_margin"] = sc.safety_margin;
    j["start"] = {{"x", sc.start.x},
                  {"y", sc.start.y},
                  {"theta", sc.start.theta},
                  {"bevel", sc.start.bevel}};
    if (sc.weights) {
        j["weights"] = {{"rot", sc.weights->rot},
                        {"len", sc.weights->len},
                        {"clear", sc.weights->clear},
                        {"ur", sc.weights->ur},
                        {"center", sc.weights->center}};
    }
    j["meta"] = {{"seed", sc.seed},
                 {"n_crs", sc.params.n_crs},
                 {"cr_size_mm", sc.params.cr_size_mm},
                 {"assumed_cr_size_mm", sc.params.assumed_cr_size_mm},
                 {"tr_dist_mm", sc.params.tr_dist_mm},
                 {"known_pct", sc.params.known_pct}};
    if (!sc.reference_path.empty()) {
        auto& rp = j["reference_path"] = nlohmann::json::array();
        for (Vec2 v : sc.reference_path) rp.push_back({v.x, v.y});
    }
    return j.dump(2);
}

Scenario scenario_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    Scenario sc;
    const auto& w = j.at("workspace");
    sc.workspace = {w.at("x0"), w.at("y0"), w.at("x1"), w.at("y1")};
    sc.crs.clear();
    for (const auto& cr : j.at("crs")) {
        sc.crs.push_back({{cr.at("x"), cr.at("y")}, cr.at("r"), cr.value("known", false)});
    }
    const auto& tr = j.at("tr");
    sc.tr = {{tr.at("x"), tr.at("y")}, tr.at("r"), RegionType::Target};
    sc.dr_width = j.at("dr_width");
    sc.safety_margin = j.value("safety_margin", sc.safety_margin);
    if (j.contains("start")) {
        const auto& s = j["start"];
        sc.start = {s.at("x"), s.at("y"), s.at("theta"), s.at("bevel")};
    }
    if (j.contains("weights")) {
        const auto& cw = j["weights"];
        sc.weights = CostWeights{cw.at("rot"), cw.at("len"), cw.at("clear"), cw.at("ur"),
                                 cw.at("center")};
    }
    if (j.contains("meta")) {
        const auto& m = j["meta"];
        sc.seed = m.value("seed", 0ULL);
        sc.params.n_crs = m.value("n_crs", sc.params.n_crs);
        sc.params.cr_size_mm = m.value("cr_size_mm", sc.params.cr_size_mm);
        sc.params.assumed_cr_size_mm = m.value("assumed_cr_size_mm", sc.params.assumed_cr_size_mm);
        sc.params.tr_dist_mm = m.value("tr_dist_mm", sc.params.tr_dist_mm);
        sc.params.known_pct = m.value("known_pct", sc.params.known_pct);
    }
    if (j.contains("reference_path")) {
        for (const auto& v : j["reference_path"]) {
            sc.reference_path.push_back({v.at(0), v.at(1)});
        }
    }
    return sc;
}

void save_scenario(const Scenario& sc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << scenario_to_json(sc) << "\n";
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return scenario_from_json(text);
}

}  // namespace onss
