#pragma once

// Scoring. A PredictionSet is the interchange file between any model and the
// evaluator: CSV rows `example_id,dim,value` (values in normalized label
// space) plus a `<csv>.json` sidecar carrying provenance.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "percept/dataset.hpp"
#include "percept/errors.hpp"
#include "percept/sha256.hpp"

namespace percept {

inline constexpr double kMlaeOffset = 0.125;

struct PredictionEntry {
    std::string id;
    std::vector<double> values;
};

struct PredictionSet {
    std::string dataset_checksum;  // SHA-256 of the dataset's manifest.json
    Split split = Split::Test;
    std::string model;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::size_t label_dim = 1;
    std::vector<PredictionEntry> entries;
};

/// Ground truth of one dataset split, in index order.
struct TruthSet {
    std::string dataset_checksum;
    Split split = Split::Test;
    std::size_t label_dim = 1;
    std::vector<std::string> ids;
    std::vector<std::vector<double>> labels;
};

inline TruthSet load_truths(const Dataset& ds, Split split) {
    TruthSet t;
    t.dataset_checksum = ds.manifest_sha256;
    t.split = split;
    t.label_dim = ds.manifest.label_dim;
    SplitReader reader(ds, split);
    ExampleRecord rec;
    while (reader.next(rec)) {
        t.ids.push_back(rec.id());
        t.labels.emplace_back(rec.labels.begin(), rec.labels.end());
    }
    return t;
}

// ---------------------------------------------------------------------------
// File format

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline nlohmann::json sidecar_json(const PredictionSet& ps) {
    return {{"format", "percept-predictions/1"},
            {"dataset_checksum", ps.dataset_checksum},
            {"split", std::string(split_name(ps.split))},
            {"model", ps.model},
            {"seed", ps.seed},
            {"config_hash", ps.config_hash},
            {"label_dim", ps.label_dim}};
}

inline std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
    return std::filesystem::path(csv.string() + ".json");
}

/// Writes the CSV and its sidecar. Rows follow entry order, dims ascending.
inline void write_prediction_set(const std::filesystem::path& csv, const PredictionSet& ps) {
    std::string out = "example_id,dim,value\n";
    for (const auto& e : ps.entries)
        for (std::size_t d = 0; d < e.values.size(); ++d)
            out += e.id + "," + std::to_string(d) + "," + format_double(e.values[d]) + "\n";
    write_text_file(csv, out);
    write_text_file(sidecar_path(csv), sidecar_json(ps).dump(2) + "\n");
}

inline PredictionSet read_prediction_set(const std::filesystem::path& csv) {
    PredictionSet ps;
    const auto side = sidecar_path(csv);
    if (std::filesystem::exists(side)) {
        try {
            const auto j = nlohmann::json::parse(read_text_file(side));
            ps.dataset_checksum = j.value("dataset_checksum", "");
            ps.split = parse_split(j.value("split", "test"));
            ps.model = j.value("model", "");
            ps.seed = j.value("seed", std::uint64_t{0});
            ps.config_hash = j.value("config_hash", "");
            ps.label_dim = j.value("label_dim", std::size_t{1});
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(side.string() + ": " + e.what());
        }
    }

    std::istringstream in(read_text_file(csv));
    std::string line;
    if (!std::getline(in, line) || line != "example_id,dim,value")
        throw FormatError(csv.string() + ": expected header 'example_id,dim,value'");
    std::unordered_map<std::string, std::size_t> slot;
    std::vector<std::vector<std::optional<double>>> values;
    std::size_t max_dim = 0;
    for (std::size_t lineno = 2; std::getline(in, line); ++lineno) {
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw FormatError(csv.string() + ":" + std::to_string(lineno) + ": malformed row");
        const std::string id = line.substr(0, c1);
        std::size_t dim;
        double v;
        try {
            std::size_t used = 0;
            dim = std::stoul(line.substr(c1 + 1, c2 - c1 - 1), &used);
            const std::string vs = line.substr(c2 + 1);
            v = std::stod(vs, &used);
            if (used != vs.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw FormatError(csv.string() + ":" + std::to_string(lineno) + ": malformed row");
        }
        if (dim > 64) throw FormatError(csv.string() + ":" + std::to_string(lineno) + ": dim out of range");
        auto [it, fresh] = slot.emplace(id, values.size());
        if (fresh) {
            values.emplace_back();
            ps.entries.push_back({id, {}});
        }
        auto& row = values[it->second];
        if (row.size() <= dim) row.resize(dim + 1);
        if (row[dim]) throw FormatError(csv.string() + ": duplicate row for " + id + " dim " + std::to_string(dim));
        row[dim] = v;
        max_dim = std::max(max_dim, dim + 1);
    }
    if (!std::filesystem::exists(side)) ps.label_dim = max_dim ? max_dim : 1;
    for (std::size_t i = 0; i < values.size(); ++i) {
        auto& e = ps.entries[i];
        if (values[i].size() != ps.label_dim)
            throw ShapeError(csv.string() + ": " + e.id + " has " + std::to_string(values[i].size()) +
                             " dims, expected " + std::to_string(ps.label_dim));
        for (std::size_t d = 0; d < values[i].size(); ++d) {
            if (!values[i][d]) throw ShapeError(csv.string() + ": " + e.id + " is missing dim " + std::to_string(d));
            e.values.push_back(*values[i][d]);
        }
    }
    return ps;
}

// ---------------------------------------------------------------------------
// MLAE

/// log2(|pred% - true%| + 0.125) for one judgment.
inline double mlae_term(double pred, double truth) { return std::log2(std::abs(100.0 * pred - 100.0 * truth) + kMlaeOffset); }

/// Mean of the central half of the values (interquartile mean), trimming
/// floor(n/4) from each end.
inline double midmean(std::vector<double> values) {
    if (values.empty()) throw EmptyInputError("midmean of an empty set");
    std::sort(values.begin(), values.end());
    const std::size_t cut = values.size() / 4;
    const auto first = values.begin() + static_cast<std::ptrdiff_t>(cut);
    const auto last = values.end() - static_cast<std::ptrdiff_t>(cut);
    return std::accumulate(first, last, 0.0) / static_cast<double>(last - first);
}

struct MlaeOptions {
    bool midmean = false;
};

/// Per-judgment terms in truth order (example index, then dimension).
inline std::vector<double> mlae_terms(const PredictionSet& ps, const TruthSet& truths) {
    if (truths.ids.empty()) throw EmptyInputError("truth split is empty");
    if (ps.entries.empty()) throw EmptyInputError("prediction set is empty");
    if (!ps.dataset_checksum.empty() && !truths.dataset_checksum.empty() &&
        ps.dataset_checksum != truths.dataset_checksum)
        throw MixedDatasetError("predictions reference dataset " + ps.dataset_checksum + " but truths come from " +
                                truths.dataset_checksum);

    std::unordered_map<std::string_view, const PredictionEntry*> by_id;
    for (const auto& e : ps.entries) by_id.emplace(e.id, &e);

    std::vector<std::string> missing, extra;
    std::unordered_map<std::string_view, bool> known;
    for (const auto& id : truths.ids) {
        known.emplace(id, true);
        if (!by_id.count(id)) missing.push_back(id);
    }
    for (const auto& e : ps.entries)
        if (!known.count(e.id)) extra.push_back(e.id);
    if (!missing.empty() || !extra.empty()) {
        auto list = [](const std::vector<std::string>& ids) {
            std::string s;
            for (std::size_t i = 0; i < ids.size() && i < 10; ++i) s += (i ? ", " : "") + ids[i];
            if (ids.size() > 10) s += ", ... (" + std::to_string(ids.size()) + " total)";
            return s;
        };
        std::string msg = "prediction/truth pairing incomplete";
        if (!missing.empty()) msg += "; missing ids: " + list(missing);
        if (!extra.empty()) msg += "; unknown ids: " + list(extra);
        throw PairingError(msg);
    }

    std::vector<double> terms;
    terms.reserve(truths.ids.size() * truths.label_dim);
    for (std::size_t i = 0; i < truths.ids.size(); ++i) {
        const auto& pred = by_id.at(truths.ids[i])->values;
        const auto& truth = truths.labels[i];
        if (pred.size() != truth.size())
            throw ShapeError(truths.ids[i] + ": prediction has " + std::to_string(pred.size()) +
                             " dims, label_dim is " + std::to_string(truth.size()));
        for (std::size_t d = 0; d < truth.size(); ++d) terms.push_back(mlae_term(pred[d], truth[d]));
    }
    return terms;
}

inline double mlae(const PredictionSet& ps, const TruthSet& truths, const MlaeOptions& opt = {}) {
    const auto terms = mlae_terms(ps, truths);
    if (opt.midmean) return midmean(terms);
    return std::accumulate(terms.begin(), terms.end(), 0.0) / static_cast<double>(terms.size());
}

/// MLAE of a predictor that always outputs the per-dimension mean of
/// `reference` labels (typically the training labels).
inline double constant_mean_mlae(const std::vector<std::vector<double>>& reference, const TruthSet& truths) {
    if (reference.empty()) throw EmptyInputError("no reference labels for the constant predictor");
    std::vector<double> mean(reference.front().size(), 0.0);
    for (const auto& r : reference)
        for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += r[d];
    for (auto& m : mean) m /= static_cast<double>(reference.size());
    double sum = 0;
    std::size_t n = 0;
    for (const auto& t : truths.labels)
        for (std::size_t d = 0; d < t.size(); ++d, ++n) sum += mlae_term(mean[d], t[d]);
    if (n == 0) throw EmptyInputError("truth split is empty");
    return sum / static_cast<double>(n);
}

// ---------------------------------------------------------------------------
// Confidence intervals, aggregation, ranking

struct Interval {
    double lo = 0;
    double hi = 0;
};

inline double mean_of(const std::vector<double>& v) {
    if (v.empty()) throw EmptyInputError("mean of an empty set");
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// Sample standard deviation (n-1 denominator).
inline double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) throw InsufficientRunsError("sample standard deviation needs at least 2 values");
    const double m = mean_of(v);
    double ss = 0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

/// mean +/- 1.96 * sample std.
inline Interval ci95(const std::vector<double>& values) {
    if (values.size() < 2)
        throw InsufficientRunsError("a confidence interval needs at least 2 runs, got " + std::to_string(values.size()));
    const double m = mean_of(values);
    const double half = 1.96 * sample_std(values);
    return {m - half, m + half};
}

struct TaskScore {
    std::string task;
    std::vector<double> runs;
    double mean = 0;
    std::optional<double> std;     // absent with a single run
    std::optional<Interval> ci95;  // absent with a single run
    std::size_t n_runs = 0;
    std::string dataset_checksum;
};

inline TaskScore score_from_runs(std::string task, std::vector<double> runs, std::string dataset_checksum = {}) {
    TaskScore s;
    s.task = std::move(task);
    s.mean = mean_of(runs);
    s.n_runs = runs.size();
    if (runs.size() >= 2) {
        s.std = sample_std(runs);
        s.ci95 = ci95(runs);
    }
    s.runs = std::move(runs);
    s.dataset_checksum = std::move(dataset_checksum);
    return s;
}

/// Scores every run against the same truth split; runs must all reference
/// one dataset and split.
inline TaskScore aggregate_task_report(const std::string& task, const std::vector<PredictionSet>& runs,
                                       const TruthSet& truths, const MlaeOptions& opt = {}) {
    if (runs.empty()) throw EmptyInputError(task + ": no runs to aggregate");
    for (const auto& r : runs) {
        if (r.dataset_checksum != runs.front().dataset_checksum)
            throw MixedDatasetError(task + ": runs reference different datasets (" + runs.front().dataset_checksum +
                                    " vs " + r.dataset_checksum + ")");
        if (r.split != runs.front().split) throw MixedDatasetError(task + ": runs score different splits");
    }
    std::vector<double> values;
    for (const auto& r : runs) values.push_back(mlae(r, truths, opt));
    return score_from_runs(task, std::move(values), runs.front().dataset_checksum);
}

struct RankEntry {
    std::string task;
    double score = 0;
    std::size_t rank = 0;  // 1 = lowest error
    bool tied = false;
};

/// Ascending by score; equal scores are ordered by task name and flagged.
inline std::vector<RankEntry> rank_tasks(const std::map<std::string, double>& scores) {
    std::vector<RankEntry> out;
    for (const auto& [task, score] : scores) out.push_back({task, score, 0, false});
    std::stable_sort(out.begin(), out.end(), [](const RankEntry& a, const RankEntry& b) { return a.score < b.score; });
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i].rank = i + 1;
        if ((i > 0 && out[i - 1].score == out[i].score) || (i + 1 < out.size() && out[i + 1].score == out[i].score))
            out[i].tied = true;
    }
    return out;
}

}  // namespace percept
