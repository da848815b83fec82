#pragma once

#include <iosfwd>
#include <string>

#include "onss/engine.hpp"
#include "onss/scenario.hpp"

namespace onss {

struct RenderOptions {
    bool show_initial_plans = true;
    bool show_reference_path = false;
    double scale = 6.0;  // px per mm
};

// Draws the workspace, the target disc, critical discs with their detection
// annuli (blue when known up front or discovered online, red when never
// identified), the executed trace and optionally the initially synthesized
// plans.
void render_trace(std::ostream& os, const Scenario& sc, const EpisodeResult& result,
                  const RenderOptions& opts = {});

void render_trace_file(const std::string& path, const Scenario& sc, const EpisodeResult& result,
                       const RenderOptions& opts = {});

}  // namespace onss
