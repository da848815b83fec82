#include "onss/svg.hpp"

#include <fstream>
#include <ostream>

namespace onss {

namespace {

void circle(std::ostream& os, Vec2 c, double r, const char* fill, const char* stroke,
            double stroke_w, const char* dash = nullptr) {
    os << "  <circle cx=\"" << c.x << "\" cy=\"" << c.y << "\" r=\"" << r << "\" fill=\"" << fill
       << "\" stroke=\"" << stroke << "\" stroke-width=\"" << stroke_w << "\"";
    if (dash) os << " stroke-dasharray=\"" << dash << "\"";
    os << "/>\n";
}

template <typename Points>
void polyline(std::ostream& os, const Points& pts, const char* stroke, double w,
              double opacity = 1.0) {
    if (pts.empty()) return;
    os << "  <polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << w
       << "\" stroke-opacity=\"" << opacity << "\" points=\"";
    for (const auto& p : pts) os << p.x << "," << p.y << " ";
    os << "\"/>\n";
}

}  // namespace

void render_trace(std::ostream& os, const Scenario& sc, const EpisodeResult& result,
                  const RenderOptions& opts) {
    const Rect& ws = sc.workspace;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << ws.width() * opts.scale
       << "\" height=\"" << ws.height() * opts.scale << "\" viewBox=\"" << ws.x0 << " " << ws.y0
       << " " << ws.width() << " " << ws.height() << "\">\n";
    os << "  <rect x=\"" << ws.x0 << "\" y=\"" << ws.y0 << "\" width=\"" << ws.width()
       << "\" height=\"" << ws.height() << "\" fill=\"white\" stroke=\"black\" "
          "stroke-width=\"0.4\"/>\n";

    // Target disc.
    circle(os, sc.tr.center, sc.tr.radius, "#8ce99a", "#2b8a3e", 0.3);

    // True critical discs: blue when known a priori, red otherwise, each with
    // its detection annulus.
    for (const ScenarioCr& cr : sc.crs) {
        const char* fill = cr.known ? "#74c0fc" : "#ff8787";
        const char* stroke = cr.known ? "#1864ab" : "#c92a2a";
        circle(os, cr.center, cr.radius + sc.dr_width, "none", stroke, 0.2, "1,1");
        circle(os, cr.center, cr.radius, fill, stroke, 0.3);
    }
    // Discs discovered online (model estimates): blue, dashed outline.
    for (const Region& cr : result.discovered) {
        circle(os, cr.center, cr.radius + sc.dr_width, "none", "#1864ab", 0.2, "1,1");
        circle(os, cr.center, cr.radius, "#a5d8ff", "#1864ab", 0.3, "0.8,0.8");
    }

    if (opts.show_reference_path && !sc.reference_path.empty()) {
        polyline(os, sc.reference_path, "#adb5bd", 0.25, 0.8);
    }
    if (opts.show_initial_plans) {
        for (const auto& path : result.initial_plans) {
            polyline(os, path, "#868e96", 0.25, 0.6);
        }
    }

    // Executed trace (true positions, in execution order including rollbacks).
    std::vector<Vec2> executed;
    executed.reserve(result.rows.size() + 1);
    executed.push_back(sc.start.pos());
    for (const auto& row : result.rows) executed.push_back(row.true_pos);
    polyline(os, executed, "black", 0.45);

    os << "</svg>\n";
}

void render_trace_file(const std::string& path, const Scenario& sc, const EpisodeResult& result,
                       const RenderOptions& opts) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    render_trace(out, sc, result, opts);
}

}  // namespace onss
