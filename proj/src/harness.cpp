#include "onss/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace onss {

std::vector<SweepPoint> default_sweep(const SweepAxes& axes) {
    std::vector<SweepPoint> out;
    ScenarioParams def;
    for (int v : axes.n_crs) {
        ScenarioParams p = def;
        p.n_crs = v;
        out.push_back({"n_crs", static_cast<double>(v), p});
    }
    for (double v : axes.cr_size) {
        ScenarioParams p = def;
        p.cr_size_mm = v;
        out.push_back({"cr_size_mm", v, p});
    }
    for (double v : axes.assumed_cr_size) {
        ScenarioParams p = def;
        p.assumed_cr_size_mm = v;
        out.push_back({"assumed_cr_size_mm", v, p});
    }
    for (double v : axes.tr_dist) {
        ScenarioParams p = def;
        p.tr_dist_mm = v;
        out.push_back({"tr_dist_mm", v, p});
    }
    for (int v : axes.known_pct) {
        ScenarioParams p = def;
        p.known_pct = v;
        out.push_back({"known_pct", static_cast<double>(v), p});
    }
    return out;
}

BatchResult run_batch(const std::vector<SweepPoint>& sweep, std::size_t runs_per_point,
                      std::uint64_t base_seed, const EngineConfig& cfg, const GenOptions& gen,
                      EpisodeSink sink, void* sink_ctx) {
    if (runs_per_point == 0) {
        throw std::invalid_argument("run_batch: runs_per_point must be positive");
    }
    BatchResult out;
    std::uint64_t run_index = 0;
    for (const SweepPoint& point : sweep) {
        for (std::size_t r = 0; r < runs_per_point; ++r, ++run_index) {
            EpisodeRecord rec;
            rec.point = point;
            rec.seed = base_seed + run_index;
            GenOptions g = gen;
            g.grid = cfg.grid;
            g.kin = cfg.kin;
            try {
                Scenario sc = generate_scenario(point.params, rec.seed, g);
                rec.generated = true;
                rec.result = run_episode(sc, cfg, rec.seed);
                if (sink) sink(rec, sc, sink_ctx);
            } catch (const GenerationError&) {
                rec.generated = false;
            }
            out.episodes.push_back(std::move(rec));
        }
    }
    out.table = aggregate(out.episodes);
    return out;
}

namespace {

struct Acc {
    std::size_t n = 0;
    std::size_t success = 0;
    std::size_t gen_failures = 0;
    double readj_min = std::numeric_limits<double>::infinity(), readj_max = 0, readj_sum = 0;
    double synth_min = std::numeric_limits<double>::infinity(), synth_max = 0, synth_sum = 0;
    std::size_t synth_n = 0;
    double over_min = std::numeric_limits<double>::infinity(), over_max = 0, over_sum = 0;

    void add(const EpisodeRecord& rec) {
        if (!rec.generated) {
            gen_failures++;
            return;
        }
        const EpisodeResult& e = rec.result;
        n++;
        if (e.outcome == EpisodeResult::Outcome::Success) success++;
        double readj = static_cast<double>(e.readjustments);
        readj_min = std::min(readj_min, readj);
        readj_max = std::max(readj_max, readj);
        readj_sum += readj;
        for (double t : e.synthesis_times_s) {
            synth_min = std::min(synth_min, t);
            synth_max = std::max(synth_max, t);
            synth_sum += t;
            synth_n++;
        }
        over_min = std::min(over_min, e.overall_s);
        over_max = std::max(over_max, e.overall_s);
        over_sum += e.overall_s;
    }

    void fill(MetricsRow& row) const {
        row.episodes = n;
        row.generation_failures = gen_failures;
        if (n == 0) return;
        row.success_rate_pct = 100.0 * static_cast<double>(success) / static_cast<double>(n);
        row.readj_min = readj_min;
        row.readj_avg = readj_sum / static_cast<double>(n);
        row.readj_max = readj_max;
        if (synth_n > 0) {
            row.synth_min = synth_min;
            row.synth_avg = synth_sum / static_cast<double>(synth_n);
            row.synth_max = synth_max;
        }
        row.overall_min = over_min;
        row.overall_avg = over_sum / static_cast<double>(n);
        row.overall_max = over_max;
    }
};

}  // namespace

MetricsTable aggregate(const std::vector<EpisodeRecord>& episodes) {
    MetricsTable table;
    Acc total;
    std::vector<Acc> accs;
    // rows keyed by (axis, value) in first-seen order
    for (const EpisodeRecord& rec : episodes) {
        total.add(rec);
        std::size_t i = 0;
        for (; i < table.rows.size(); ++i) {
            if (table.rows[i].axis == rec.point.axis && table.rows[i].value == rec.point.value) {
                break;
            }
        }
        if (i == table.rows.size()) {
            table.rows.push_back({rec.point.axis, rec.point.value});
            accs.emplace_back();
        }
        accs[i].add(rec);
    }
    for (std::size_t i = 0; i < table.rows.size(); ++i) accs[i].fill(table.rows[i]);
    total.fill(table.total);
    table.total.axis = "all";
    return table;
}

namespace {

std::string fmt(double v, int prec = 3) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

}  // namespace

void write_batch_csv(std::ostream& os, const BatchResult& batch) {
    os << "param_axis,param_value,seed,outcome,readjustments,n_synth,synth_min,synth_avg,"
          "synth_max,overall_s\n";
    for (const EpisodeRecord& rec : batch.episodes) {
        os << rec.point.axis << "," << fmt(rec.point.value, 1) << "," << rec.seed << ",";
        if (!rec.generated) {
            os << "GenerationError,,,,,,\n";
            continue;
        }
        const EpisodeResult& e = rec.result;
        double mn = std::numeric_limits<double>::infinity(), mx = 0, sum = 0;
        for (double t : e.synthesis_times_s) {
            mn = std::min(mn, t);
            mx = std::max(mx, t);
            sum += t;
        }
        double avg = e.synthesis_times_s.empty()
                         ? 0.0
                         : sum / static_cast<double>(e.synthesis_times_s.size());
        if (e.synthesis_times_s.empty()) mn = 0.0;
        os << to_string(e.outcome) << "," << e.readjustments << "," << e.synthesis_times_s.size()
           << "," << fmt(mn) << "," << fmt(avg) << "," << fmt(mx) << "," << fmt(e.overall_s)
           << "\n";
    }
    os << "# aggregates\n";
    os << "# axis,value,episodes,gen_failures,success_rate_pct,readj_min,readj_avg,readj_max,"
          "synth_min,synth_avg,synth_max,overall_min,overall_avg,overall_max\n";
    auto agg_row = [&](const MetricsRow& r, const std::string& axis, const std::string& value) {
        os << "# " << axis << "," << value << "," << r.episodes << "," << r.generation_failures
           << "," << fmt(r.success_rate_pct, 2) << "," << fmt(r.readj_min, 2) << ","
           << fmt(r.readj_avg, 2) << "," << fmt(r.readj_max, 2) << "," << fmt(r.synth_min) << ","
           << fmt(r.synth_avg) << "," << fmt(r.synth_max) << "," << fmt(r.overall_min) << ","
           << fmt(r.overall_avg) << "," << fmt(r.overall_max) << "\n";
    };
    for (const MetricsRow& r : batch.table.rows) agg_row(r, r.axis, fmt(r.value, 1));
    agg_row(batch.table.total, "all", "");
}

void print_metrics(std::ostream& os, const MetricsTable& table) {
    os << "axis               value   runs  success%   readjust (min,avg,max)   "
          "synthesis s (min,avg,max)   overall s (min,avg,max)\n";
    auto line = [&](const MetricsRow& r) {
        char buf[256];
        std::snprintf(buf, sizeof buf,
                      "%-18s %6.1f %6zu   %6.2f   (%.2f, %.2f, %.2f)      (%.3f, %.3f, %.3f)"
                      "      (%.2f, %.2f, %.2f)\n",
                      r.axis.c_str(), r.value, r.episodes, r.success_rate_pct, r.readj_min,
                      r.readj_avg, r.readj_max, r.synth_min, r.synth_avg, r.synth_max,
                      r.overall_min, r.overall_avg, r.overall_max);
        os << buf;
    };
    for (const MetricsRow& r : table.rows) line(r);
    line(table.total);
}

void write_trace_csv(std::ostream& os, const EpisodeResult& result) {
    os << "t_index,true_x,true_y,meas_x,meas_y,force,action\n";
    for (const EpisodeResult::TraceRow& r : result.rows) {
        os << r.sample << "," << fmt(r.true_pos.x) << "," << fmt(r.true_pos.y) << ","
           << fmt(r.measured_pos.x) << "," << fmt(r.measured_pos.y) << "," << fmt(r.force) << ","
           << to_string(r.action) << "\n";
    }
}

bool trace_avoids_true_crs(const EpisodeResult& result, const Scenario& sc) {
    RegionMap truth = sc.true_map();
    for (const EpisodeResult::TraceRow& row : result.rows) {
        for (const Region& cr : truth.crs) {
            if (dist(row.true_pos, cr.center) <= cr.radius) return false;
        }
    }
    for (const Trace::Sample& s : result.final_trace.samples) {
        for (const Region& cr : truth.crs) {
            if (dist(s.pose.pos(), cr.center) <= cr.radius) return false;
        }
    }
    return true;
}

}  // namespace onss
