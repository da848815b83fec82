#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "onss/engine.hpp"
#include "onss/scenario.hpp"

namespace onss {

// One point of the experiment sweep: the varied axis, its value, and the
// full parameter set (defaults everywhere else).
struct SweepPoint {
    std::string axis;
    double value = 0.0;
    ScenarioParams params;
};

// One-at-a-time sweep over the five parameter axes. Every (axis, value) pair
// is its own parametrization, defaults included, so the standard axes yield
// 6+6+6+5+6 = 29 points.
std::vector<SweepPoint> default_sweep(const SweepAxes& axes = {});

struct EpisodeRecord {
    SweepPoint point;
    std::uint64_t seed = 0;
    bool generated = false;  // scenario generation can fail and is excluded
    EpisodeResult result;
};

// Aggregates in the shape of the published result table.
struct MetricsRow {
    std::string axis;
    double value = 0.0;
    std::size_t episodes = 0;
    std::size_t generation_failures = 0;
    double success_rate_pct = 0.0;
    double readj_min = 0.0, readj_avg = 0.0, readj_max = 0.0;
    double synth_min = 0.0, synth_avg = 0.0, synth_max = 0.0;  // seconds
    double overall_min = 0.0, overall_avg = 0.0, overall_max = 0.0;  // seconds
};

struct MetricsTable {
    std::vector<MetricsRow> rows;
    MetricsRow total;  // all episodes pooled
};

struct BatchResult {
    std::vector<EpisodeRecord> episodes;
    MetricsTable table;
};

// Runs runs_per_point episodes per sweep point; episode seeds are
// base_seed + global run index. Generation failures are counted per row and
// excluded from the rates. An optional sink observes each finished episode
// together with its scenario (used for trace audits).
using EpisodeSink = void (*)(const EpisodeRecord&, const Scenario&, void*);
BatchResult run_batch(const std::vector<SweepPoint>& sweep, std::size_t runs_per_point,
                      std::uint64_t base_seed, const EngineConfig& cfg,
                      const GenOptions& gen = {}, EpisodeSink sink = nullptr,
                      void* sink_ctx = nullptr);

MetricsTable aggregate(const std::vector<EpisodeRecord>& episodes);

// CSV with one row per episode followed by a commented aggregate section.
void write_batch_csv(std::ostream& os, const BatchResult& batch);
void print_metrics(std::ostream& os, const MetricsTable& table);

// Per-observation trace export for one episode.
void write_trace_csv(std::ostream& os, const EpisodeResult& result);

// True if no observed sample of the episode lies inside any true critical
// disc. The zero-tolerance safety audit runs this over whole batches.
bool trace_avoids_true_crs(const EpisodeResult& result, const Scenario& sc);

}  // namespace onss
