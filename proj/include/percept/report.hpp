#pragma once

// EvalReport assembly, comparison against published reference values, and
// deterministic SVG rendering (score bars with CI whiskers, cross-matrix
// heatmap, ranking ladder).

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "percept/crossgen.hpp"
#include "percept/dataset.hpp"
#include "percept/metrics.hpp"
#include "percept/reference_scores.hpp"
#include "percept/stats.hpp"

namespace percept {

inline constexpr const char* kHarnessVersion = "1.0.0";

struct RunTrace {
    std::string predictions;  // path as given in the report input
    std::string predictions_sha256;
    std::string config_hash;
    std::uint64_t seed = 0;
    double mlae = 0;
};

struct ModelTaskScore {
    std::string model;
    TaskScore score;
    std::string dataset;  // dataset directory
    std::vector<RunTrace> runs;
};

struct DatasetRef {
    std::string path;
    std::string manifest_sha256;
    std::string task;
    std::string variant;
};

struct TaskStats {
    std::string task;
    std::vector<std::string> groups;
    std::optional<AnovaResult> anova;
    std::optional<TukeyResult> tukey;
    std::string note;  // why a test was skipped
};

struct ReferenceRow {
    std::string task;
    double harness = 0;
    double reference = 0;
    double delta = 0;  // harness - reference
    std::optional<double> weakest_published;
    bool worse_than_weakest = false;
};

struct ReferenceComparison {
    std::string model;
    std::string source;
    std::vector<ReferenceRow> rows;
};

struct EvalReport {
    std::string version = kHarnessVersion;
    std::vector<DatasetRef> datasets;
    std::vector<ModelTaskScore> scores;
    std::vector<TaskStats> stats;
    std::map<std::string, std::vector<RankEntry>> rankings;  // model -> ladder
    std::vector<ReferenceComparison> references;
    std::optional<CrossMatrix> crossgen;
    std::vector<std::string> artifacts;
    std::vector<std::string> findings;
};

// ---------------------------------------------------------------------------
// Reference comparison

/// Treats a set of harness scores as a reference column.
inline ReferenceScores reference_from_scores(const std::string& source, const std::vector<TaskScore>& scores) {
    ReferenceScores r;
    r.source = source;
    for (const auto& s : scores) r.tasks[s.task] = {s.mean, s.std};
    return r;
}

/// Per-task delta = harness mean - reference mean over the shared tasks. A
/// task is flagged when the harness is worse than every model published in
/// the reference's table.
inline ReferenceComparison compare_to_reference(const std::vector<TaskScore>& scores, const ReferenceScores& ref,
                                                const std::string& model = {}) {
    ReferenceComparison out{model, ref.source, {}};
    for (const auto& s : scores) {
        const auto it = ref.tasks.find(s.task);
        if (it == ref.tasks.end()) continue;
        ReferenceRow row{s.task, s.mean, it->second.mean, s.mean - it->second.mean, std::nullopt, false};
        if (ref.table) row.weakest_published = weakest_published(*ref.table, s.task);
        if (row.weakest_published) row.worse_than_weakest = s.mean > *row.weakest_published;
        out.rows.push_back(row);
    }
    if (out.rows.empty()) {
        std::string have;
        for (const auto& s : scores) have += (have.empty() ? "" : ", ") + s.task;
        throw ReferenceError("no task overlap between the report (" + have + ") and reference '" + ref.source + "'");
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json to_json(const TaskScore& s) {
    nlohmann::json j = {{"task", s.task}, {"mean", s.mean}, {"n_runs", s.n_runs}, {"runs", s.runs},
                        {"dataset_checksum", s.dataset_checksum}};
    j["std"] = s.std ? nlohmann::json(*s.std) : nlohmann::json(nullptr);
    j["ci95"] = s.ci95 ? nlohmann::json{{"lo", s.ci95->lo}, {"hi", s.ci95->hi}} : nlohmann::json(nullptr);
    return j;
}

inline nlohmann::json to_json(const AnovaResult& a) {
    return {{"f", a.f}, {"df_between", a.df_between}, {"df_within", a.df_within}, {"p", a.p},
            {"ss_between", a.ss_between}, {"ss_within", a.ss_within}};
}

inline nlohmann::json to_json(const TukeyResult& t) {
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& e : t.entries)
        pairs.push_back({{"a", e.a}, {"b", e.b}, {"difference", e.difference}, {"q", e.q}, {"p", e.p},
                         {"significant", e.significant}});
    return {{"alpha", t.alpha}, {"groups", t.groups}, {"df_within", t.df_within}, {"ms_within", t.ms_within},
            {"pairs", pairs}};
}

inline nlohmann::json to_json(const RankEntry& r) {
    return {{"task", r.task}, {"score", r.score}, {"rank", r.rank}, {"tied", r.tied}};
}

inline nlohmann::json to_json(const ReferenceComparison& c) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : c.rows) {
        nlohmann::json j = {{"task", r.task}, {"harness", r.harness}, {"reference", r.reference}, {"delta", r.delta},
                            {"worse_than_weakest", r.worse_than_weakest}};
        j["weakest_published"] = r.weakest_published ? nlohmann::json(*r.weakest_published) : nlohmann::json(nullptr);
        rows.push_back(j);
    }
    return {{"model", c.model}, {"source", c.source}, {"rows", rows}};
}

inline nlohmann::json to_json(const EvalReport& r) {
    nlohmann::json datasets = nlohmann::json::array();
    for (const auto& d : r.datasets)
        datasets.push_back({{"path", d.path}, {"manifest_sha256", d.manifest_sha256}, {"task", d.task}, {"variant", d.variant}});
    nlohmann::json scores = nlohmann::json::array();
    for (const auto& s : r.scores) {
        nlohmann::json runs = nlohmann::json::array();
        for (const auto& t : s.runs)
            runs.push_back({{"predictions", t.predictions}, {"predictions_sha256", t.predictions_sha256},
                            {"config_hash", t.config_hash}, {"seed", t.seed}, {"mlae", t.mlae}});
        auto j = to_json(s.score);
        j["model"] = s.model;
        j["dataset"] = s.dataset;
        j["trace"] = runs;
        scores.push_back(j);
    }
    nlohmann::json stats = nlohmann::json::array();
    for (const auto& s : r.stats) {
        nlohmann::json j = {{"task", s.task}, {"groups", s.groups}};
        j["anova"] = s.anova ? to_json(*s.anova) : nlohmann::json(nullptr);
        j["tukey"] = s.tukey ? to_json(*s.tukey) : nlohmann::json(nullptr);
        if (!s.note.empty()) j["note"] = s.note;
        stats.push_back(j);
    }
    nlohmann::json rankings = nlohmann::json::object();
    for (const auto& [model, ladder] : r.rankings) {
        nlohmann::json l = nlohmann::json::array();
        for (const auto& e : ladder) l.push_back(to_json(e));
        rankings[model] = l;
    }
    nlohmann::json refs = nlohmann::json::array();
    for (const auto& c : r.references) refs.push_back(to_json(c));
    return {{"harness_version", r.version},
            {"datasets", datasets},
            {"scores", scores},
            {"stats", stats},
            {"rankings", rankings},
            {"references", refs},
            {"crossgen", r.crossgen ? to_json(*r.crossgen) : nlohmann::json(nullptr)},
            {"artifacts", r.artifacts},
            {"findings", r.findings}};
}

// ---------------------------------------------------------------------------
// Assembly from a report input file
//
// {
//   "runs": [{"model": "mlp", "task": "length", "dataset": "d/",
//             "predictions": ["p1.csv", "p2.csv"]}],
//   "crossgen": "matrix.json",            (optional)
//   "reference": ["Table 3 Swin"],        (optional)
//   "midmean": false                      (optional)
// }
//
// Relative paths resolve against `base_dir`.

struct ReportInputRun {
    std::string model;
    std::string task;  // defaults to the dataset's task
    std::filesystem::path dataset;
    std::vector<std::filesystem::path> predictions;
};

namespace detail {

inline std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

}  // namespace detail

inline void add_statistics(EvalReport& report) {
    std::map<std::string, std::vector<GroupSample>> by_task;
    for (const auto& s : report.scores)
        if (s.score.runs.size() >= 2) by_task[s.score.task].push_back({s.model, s.score.runs});
    for (auto& [task, groups] : by_task) {
        TaskStats ts;
        ts.task = task;
        for (const auto& g : groups) ts.groups.push_back(g.name);
        if (groups.size() < 2) continue;
        try {
            ts.anova = anova_oneway(groups);
            ts.tukey = tukey_hsd(groups);
        } catch (const Error& e) {
            ts.note = e.kind() + ": " + e.what();
        }
        report.stats.push_back(ts);
    }
}

inline void add_rankings(EvalReport& report) {
    std::map<std::string, std::map<std::string, double>> per_model;
    for (const auto& s : report.scores) per_model[s.model][s.score.task] = s.score.mean;
    for (const auto& [model, scores] : per_model)
        if (scores.size() >= 2) report.rankings[model] = rank_tasks(scores);
}

inline EvalReport build_report(const nlohmann::json& input, const std::filesystem::path& base_dir) {
    EvalReport report;
    const bool use_midmean = input.value("midmean", false);
    std::set<std::string> seen_datasets;
    try {
        for (const auto& rj : input.at("runs")) {
            const auto ds = open_dataset(detail::resolve(base_dir, rj.at("dataset").get<std::string>()));
            const std::string model = rj.value("model", "model");
            const std::string task = rj.value("task", task_name(ds.manifest.task));
            if (seen_datasets.insert(ds.dir.string()).second)
                report.datasets.push_back({ds.dir.string(), ds.manifest_sha256, task_name(ds.manifest.task),
                                           std::string(variant_name(ds.manifest.variant))});
            std::vector<PredictionSet> sets;
            ModelTaskScore mts{model, {}, ds.dir.string(), {}};
            for (const auto& pj : rj.at("predictions")) {
                const auto path = detail::resolve(base_dir, pj.get<std::string>());
                sets.push_back(read_prediction_set(path));
                mts.runs.push_back({path.string(), sha256_file(path), sets.back().config_hash, sets.back().seed, 0.0});
            }
            if (sets.empty()) throw EmptyInputError("run '" + model + "' on " + task + " lists no prediction files");
            const auto truths = load_truths(ds, sets.front().split);
            mts.score = aggregate_task_report(task, sets, truths, {use_midmean});
            for (std::size_t i = 0; i < sets.size(); ++i) mts.runs[i].mlae = mts.score.runs[i];
            report.scores.push_back(std::move(mts));
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed report input: ") + e.what());
    }

    add_statistics(report);
    add_rankings(report);

    if (input.contains("reference")) {
        for (const auto& src : input.at("reference")) {
            const auto ref = reference_scores(src.get<std::string>());
            std::map<std::string, std::vector<TaskScore>> per_model;
            for (const auto& s : report.scores) per_model[s.model].push_back(s.score);
            for (const auto& [model, scores] : per_model) {
                try {
                    report.references.push_back(compare_to_reference(scores, ref, model));
                } catch (const ReferenceError& e) {
                    report.findings.push_back(e.what());
                }
            }
        }
    }
    if (input.contains("crossgen") && !input.at("crossgen").is_null()) {
        const auto path = detail::resolve(base_dir, input.at("crossgen").get<std::string>());
        try {
            report.crossgen = cross_matrix_from_json(nlohmann::json::parse(read_text_file(path)));
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(path.string() + ": " + e.what());
        }
        for (const auto& f : report.crossgen->findings) report.findings.push_back("crossgen: " + f);
    }
    return report;
}

// ---------------------------------------------------------------------------
// SVG

namespace svg {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    std::string s = buf;
    return s == "-0.00" ? "0.00" : s;
}

inline std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

inline std::string header(double w, double h) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) + "\" height=\"" + num(h) +
           "\" viewBox=\"0 0 " + num(w) + " " + num(h) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
}

/// Sequential ramp: every channel decreases as t goes from 0 to 1, so
/// darker always means a higher value.
inline std::string ramp(double t) {
    t = std::clamp(t, 0.0, 1.0);
    const int r = static_cast<int>(std::lround(255 - t * (255 - 127)));
    const int g = static_cast<int>(std::lround(245 - t * (245 - 39)));
    const int b = static_cast<int>(std::lround(235 - t * (235 - 4)));
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

}  // namespace svg

/// Horizontal bars of mean MLAE per (model, task), with a CI whisker where
/// the score has one.
inline std::string render_score_bars(const std::vector<ModelTaskScore>& scores) {
    constexpr double left = 220, width = 420, row = 22, top = 30;
    double lo = -3.0, hi = 0.0;
    for (const auto& s : scores) {
        hi = std::max(hi, s.score.ci95 ? s.score.ci95->hi : s.score.mean);
        lo = std::min(lo, s.score.ci95 ? s.score.ci95->lo : s.score.mean);
    }
    hi = std::ceil(hi + 0.5);
    lo = std::floor(lo);
    const auto x = [&](double v) { return left + (v - lo) / (hi - lo) * width; };
    const double height = top + row * static_cast<double>(scores.size()) + 40;

    std::string out = svg::header(left + width + 40, height);
    out += "<text x=\"" + svg::num(left) + "\" y=\"18\">MLAE (lower is better), whiskers: 95% CI over runs</text>\n";
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const auto& s = scores[i];
        const double y = top + row * static_cast<double>(i);
        out += "<text x=\"" + svg::num(left - 6) + "\" y=\"" + svg::num(y + 14) + "\" text-anchor=\"end\">" +
               svg::escape(s.model + " / " + s.score.task) + "</text>\n";
        out += "<rect class=\"bar\" x=\"" + svg::num(x(lo)) + "\" y=\"" + svg::num(y + 3) + "\" width=\"" +
               svg::num(x(s.score.mean) - x(lo)) + "\" height=\"" + svg::num(row - 6) + "\" fill=\"#4c78a8\" data-value=\"" +
               format_double(s.score.mean) + "\"/>\n";
        if (s.score.ci95)
            out += "<line class=\"whisker\" x1=\"" + svg::num(x(s.score.ci95->lo)) + "\" x2=\"" +
                   svg::num(x(s.score.ci95->hi)) + "\" y1=\"" + svg::num(y + row / 2) + "\" y2=\"" +
                   svg::num(y + row / 2) + "\" stroke=\"#000\" stroke-width=\"1.5\"/>\n";
    }
    const double axis_y = top + row * static_cast<double>(scores.size()) + 6;
    out += "<line class=\"axis\" x1=\"" + svg::num(x(lo)) + "\" x2=\"" + svg::num(x(hi)) + "\" y1=\"" + svg::num(axis_y) +
           "\" y2=\"" + svg::num(axis_y) + "\" stroke=\"#666\"/>\n";
    for (double t = lo; t <= hi + 1e-9; t += 1.0)
        out += "<text x=\"" + svg::num(x(t)) + "\" y=\"" + svg::num(axis_y + 16) + "\" text-anchor=\"middle\">" +
               svg::num(t) + "</text>\n";
    out += "</svg>\n";
    return out;
}

/// Rows are training variants, columns testing variants; darker is worse.
inline std::string render_heatmap(const CrossMatrix& m) {
    constexpr double cell = 70, left = 100, top = 60;
    double lo = 0, hi = 0;
    bool any = false;
    for (const auto& row : m.cells)
        for (const auto& c : row)
            if (c.mlae) {
                lo = any ? std::min(lo, *c.mlae) : *c.mlae;
                hi = any ? std::max(hi, *c.mlae) : *c.mlae;
                any = true;
            }
    const auto k = static_cast<double>(m.variants.size());
    std::string out = svg::header(left + cell * k + 20, top + cell * k + 20);
    out += "<text x=\"" + svg::num(left) + "\" y=\"18\">" + svg::escape(task_name(m.task) + " / " + m.model) +
           ": train (rows) vs test (columns) MLAE</text>\n";
    for (std::size_t i = 0; i < m.variants.size(); ++i) {
        const std::string name = svg::escape(std::string(variant_name(m.variants[i])));
        out += "<text x=\"" + svg::num(left + cell * (static_cast<double>(i) + 0.5)) + "\" y=\"" + svg::num(top - 8) +
               "\" text-anchor=\"middle\">" + name + "</text>\n";
        out += "<text x=\"" + svg::num(left - 8) + "\" y=\"" + svg::num(top + cell * (static_cast<double>(i) + 0.5) + 4) +
               "\" text-anchor=\"end\">" + name + "</text>\n";
    }
    for (std::size_t r = 0; r < m.cells.size(); ++r)
        for (std::size_t c = 0; c < m.cells[r].size(); ++c) {
            const auto& cellv = m.cells[r][c];
            const double x = left + cell * static_cast<double>(c);
            const double y = top + cell * static_cast<double>(r);
            if (cellv.mlae) {
                const double t = hi > lo ? (*cellv.mlae - lo) / (hi - lo) : 0.5;
                out += "<rect class=\"cell\" x=\"" + svg::num(x) + "\" y=\"" + svg::num(y) + "\" width=\"" + svg::num(cell) +
                       "\" height=\"" + svg::num(cell) + "\" fill=\"" + svg::ramp(t) + "\" data-value=\"" +
                       format_double(*cellv.mlae) + "\"/>\n";
                out += "<text x=\"" + svg::num(x + cell / 2) + "\" y=\"" + svg::num(y + cell / 2 + 4) +
                       "\" text-anchor=\"middle\" fill=\"" + (t > 0.5 ? "#fff" : "#000") + "\">" + svg::num(*cellv.mlae) +
                       "</text>\n";
            } else {
                out += "<rect class=\"cell failed\" x=\"" + svg::num(x) + "\" y=\"" + svg::num(y) + "\" width=\"" +
                       svg::num(cell) + "\" height=\"" + svg::num(cell) + "\" fill=\"#cccccc\"/>\n";
                out += "<text x=\"" + svg::num(x + cell / 2) + "\" y=\"" + svg::num(y + cell / 2 + 4) +
                       "\" text-anchor=\"middle\">failed</text>\n";
            }
        }
    out += "</svg>\n";
    return out;
}

/// One column per model listing tasks from rank 1 (top) down; lines join the
/// same task across neighbouring columns.
inline std::string render_ranking_ladder(const std::map<std::string, std::vector<RankEntry>>& rankings) {
    constexpr double col = 170, row = 24, left = 20, top = 40;
    std::size_t depth = 0;
    for (const auto& [model, ladder] : rankings) depth = std::max(depth, ladder.size());
    std::string out = svg::header(left + col * static_cast<double>(std::max<std::size_t>(rankings.size(), 1)) + 20,
                                  top + row * static_cast<double>(depth) + 20);
    std::size_t ci = 0;
    std::map<std::string, std::pair<double, double>> prev;
    for (const auto& [model, ladder] : rankings) {
        const double x = left + col * static_cast<double>(ci);
        out += "<text x=\"" + svg::num(x) + "\" y=\"20\" font-weight=\"bold\">" + svg::escape(model) + "</text>\n";
        std::map<std::string, std::pair<double, double>> here;
        for (const auto& e : ladder) {
            const double y = top + row * static_cast<double>(e.rank - 1);
            here[e.task] = {x, y};
            const auto p = prev.find(e.task);
            if (p != prev.end())
                out += "<line class=\"link\" x1=\"" + svg::num(p->second.first + col - 40) + "\" y1=\"" +
                       svg::num(p->second.second - 4) + "\" x2=\"" + svg::num(x - 4) + "\" y2=\"" + svg::num(y - 4) +
                       "\" stroke=\"#999\"/>\n";
            out += "<text class=\"rank\" x=\"" + svg::num(x) + "\" y=\"" + svg::num(y) + "\">" + std::to_string(e.rank) +
                   ". " + svg::escape(e.task) + (e.tied ? " (tied)" : "") + "</text>\n";
        }
        prev = std::move(here);
        ++ci;
    }
    out += "</svg>\n";
    return out;
}

/// Writes report.json plus the SVGs that have content into `out_dir`.
inline void write_report(EvalReport& report, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    report.artifacts.clear();
    if (!report.scores.empty()) {
        write_text_file(out_dir / "scores.svg", render_score_bars(report.scores));
        report.artifacts.push_back("scores.svg");
    }
    if (report.crossgen) {
        write_text_file(out_dir / "crossgen.svg", render_heatmap(*report.crossgen));
        report.artifacts.push_back("crossgen.svg");
    }
    if (!report.rankings.empty()) {
        write_text_file(out_dir / "ranking.svg", render_ranking_ladder(report.rankings));
        report.artifacts.push_back("ranking.svg");
    }
    write_text_file(out_dir / "report.json", to_json(report).dump(2) + "\n");
}

}  // namespace percept
