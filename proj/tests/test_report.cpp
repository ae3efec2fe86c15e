#include <gtest/gtest.h>

#include <percept/report.hpp>

#include <regex>

#include "temp_dir.hpp"

using namespace percept;

namespace {

std::size_t count_of(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

// Truth shifted by `offset` percentage points on every label.
PredictionSet shifted(const Dataset& ds, const TruthSet& t, double offset, std::uint64_t seed, const std::string& model) {
    PredictionSet ps;
    ps.dataset_checksum = ds.manifest_sha256;
    ps.split = Split::Test;
    ps.model = model;
    ps.seed = seed;
    ps.config_hash = "cfg-" + model;
    ps.label_dim = t.label_dim;
    for (std::size_t i = 0; i < t.ids.size(); ++i) {
        PredictionEntry e{t.ids[i], t.labels[i]};
        for (auto& v : e.values) v += offset / 100.0;
        ps.entries.push_back(e);
    }
    return ps;
}

struct Fixture {
    probe::TempDir tmp;
    nlohmann::json input = {{"runs", nlohmann::json::array()}};

    // Two models on two tasks, two runs each. Model "good" is 1 point off on
    // length and 4 on angle; "poor" is 8 and 16 points off.
    Fixture() {
        const std::pair<TaskKind, const char*> tasks[] = {{TaskKind::Length, "length"}, {TaskKind::Angle, "angle"}};
        for (const auto& [kind, name] : tasks) {
            const auto dir = tmp.path / name;
            build_dataset({{kind, 0}, Variant::Base, 60, 3, dir, false, 1});
            const auto ds = open_dataset(dir);
            const auto truth = load_truths(ds, Split::Test);
            const double base = kind == TaskKind::Length ? 1.0 : 4.0;
            for (const auto& [model, scale] : {std::pair{"good", 1.0}, std::pair{"poor", 8.0}}) {
                nlohmann::json preds = nlohmann::json::array();
                for (std::uint64_t seed : {1, 2}) {
                    // The second run is slightly worse so the std is nonzero.
                    const double off = base * scale * (seed == 1 ? 1.0 : 1.5);
                    const auto file = std::string(name) + "-" + model + "-" + std::to_string(seed) + ".csv";
                    write_prediction_set(tmp.path / file, shifted(ds, truth, off, seed, model));
                    preds.push_back(file);
                }
                input["runs"].push_back({{"model", model}, {"dataset", name}, {"predictions", preds}});
            }
        }
    }
};

}  // namespace

TEST(ReportTest, ScoresCarryTraceability) {
    Fixture f;
    const auto r = build_report(f.input, f.tmp.path);
    ASSERT_EQ(r.scores.size(), 4u);
    EXPECT_EQ(r.datasets.size(), 2u);
    for (const auto& s : r.scores) {
        EXPECT_EQ(s.score.n_runs, 2u);
        ASSERT_TRUE(s.score.ci95.has_value());
        EXPECT_EQ(s.score.dataset_checksum, open_dataset(s.dataset).manifest_sha256);
        for (const auto& t : s.runs) {
            EXPECT_EQ(t.predictions_sha256, sha256_file(t.predictions));
            EXPECT_EQ(t.config_hash, "cfg-" + s.model);
        }
    }
    // Offset of 1 point: log2(1 + 0.125); offset of 1.5: log2(1.625).
    EXPECT_NEAR(r.scores[0].score.runs[0], std::log2(1.125), 1e-9);
    EXPECT_NEAR(r.scores[0].score.runs[1], std::log2(1.625), 1e-9);

    const auto j = to_json(r);
    EXPECT_EQ(j["harness_version"], kHarnessVersion);
    EXPECT_EQ(j["scores"][0]["trace"].size(), 2u);
    EXPECT_TRUE(j["crossgen"].is_null());
}

TEST(ReportTest, StatisticsAndRankings) {
    Fixture f;
    const auto r = build_report(f.input, f.tmp.path);
    ASSERT_EQ(r.stats.size(), 2u);
    for (const auto& s : r.stats) {
        ASSERT_TRUE(s.anova.has_value());
        ASSERT_TRUE(s.tukey.has_value());
        EXPECT_LT(s.tukey->entry("good", "poor").difference, 0.0);
    }
    ASSERT_EQ(r.rankings.size(), 2u);
    EXPECT_EQ(r.rankings.at("good").front().task, "length");
    EXPECT_EQ(r.rankings.at("poor").front().task, "length");
}

TEST(ReportTest, ReferenceComparison) {
    const auto swin = reference_scores("Table 3 Swin");
    const std::vector<TaskScore> scores = {score_from_runs("length", {-1.0, -1.2}), score_from_runs("angle", {5.0, 5.2}),
                                           score_from_runs("unlisted", {0.0, 0.0})};
    const auto c = compare_to_reference(scores, swin, "mlp");
    ASSERT_EQ(c.rows.size(), 2u);
    for (const auto& row : c.rows) {
        EXPECT_DOUBLE_EQ(row.delta, row.harness - row.reference);
        ASSERT_TRUE(row.weakest_published.has_value());
        EXPECT_EQ(row.worse_than_weakest, row.harness > *row.weakest_published);
    }
    const auto& length = c.rows[0].task == "length" ? c.rows[0] : c.rows[1];
    EXPECT_DOUBLE_EQ(length.reference, -1.38);
    EXPECT_NEAR(length.delta, -1.1 + 1.38, 1e-12);

    EXPECT_THROW(compare_to_reference({score_from_runs("unlisted", {1.0})}, swin), ReferenceError);
}

TEST(ReportTest, SelfComparisonGivesZeroDeltas) {
    const std::vector<TaskScore> scores = {score_from_runs("length", {0.3, 0.5}), score_from_runs("area", {2.0})};
    const auto c = compare_to_reference(scores, reference_from_scores("self", scores));
    ASSERT_EQ(c.rows.size(), 2u);
    for (const auto& row : c.rows) {
        EXPECT_EQ(row.delta, 0.0);
        EXPECT_FALSE(row.worse_than_weakest);
    }
}

TEST(ReportTest, ReferenceInInputProducesComparisons) {
    Fixture f;
    f.input["reference"] = {"Table 3 Swin"};
    const auto r = build_report(f.input, f.tmp.path);
    ASSERT_EQ(r.references.size(), 2u);
    EXPECT_EQ(r.references[0].rows.size(), 2u);
    f.input["reference"] = {"Table 404 Nobody"};
    EXPECT_THROW(build_report(f.input, f.tmp.path), ReferenceError);
}

TEST(ReportTest, MixedDatasetRunsRejected) {
    Fixture f;
    f.input["runs"][0]["predictions"].push_back("angle-good-1.csv");
    EXPECT_THROW(build_report(f.input, f.tmp.path), MixedDatasetError);
}

TEST(ReportTest, MalformedInputIsFormatError) {
    probe::TempDir tmp;
    EXPECT_THROW(build_report(nlohmann::json::object(), tmp.path), FormatError);
}

TEST(SvgTest, BarChartHasOneBarAndWhiskerPerScore) {
    std::vector<ModelTaskScore> scores = {{"m", score_from_runs("length", {0.1, 0.4}), "", {}},
                                          {"m", score_from_runs("angle", {2.0, 2.5}), "", {}}};
    const auto svg = render_score_bars(scores);
    EXPECT_EQ(count_of(svg, "class=\"bar\""), 2u);
    EXPECT_EQ(count_of(svg, "class=\"whisker\""), 2u);
    EXPECT_EQ(svg, render_score_bars(scores));
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);

    scores.push_back({"m", score_from_runs("area", {1.0}), "", {}});
    const auto single = render_score_bars(scores);
    EXPECT_EQ(count_of(single, "class=\"bar\""), 3u);
    EXPECT_EQ(count_of(single, "class=\"whisker\""), 2u);
}

TEST(SvgTest, HeatmapColourIsMonotoneInValue) {
    CrossMatrix m;
    m.task = {TaskKind::Length, 0};
    m.model = "mlp";
    m.variants = {Variant::Base, Variant::Pos, Variant::Size, Variant::PosSize};
    m.cells.assign(4, std::vector<CrossCell>(4));
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) {
            m.cells[r][c].train = m.variants[r];
            m.cells[r][c].test = m.variants[c];
            m.cells[r][c].mlae = 0.37 * static_cast<double>((r * 7 + c * 3) % 16) - 1.0;
        }
    m.cells[3][0].mlae.reset();
    m.cells[3][0].failed = true;

    const auto svg = render_heatmap(m);
    EXPECT_EQ(count_of(svg, "class=\"cell\""), 15u);
    EXPECT_EQ(count_of(svg, "class=\"cell failed\""), 1u);

    const std::regex cell_re("fill=\"#([0-9a-f]{2})([0-9a-f]{2})([0-9a-f]{2})\" data-value=\"([^\"]+)\"");
    std::vector<std::pair<double, int>> pairs;  // value, channel sum
    for (std::sregex_iterator it(svg.begin(), svg.end(), cell_re), end; it != end; ++it) {
        const int sum = std::stoi((*it)[1], nullptr, 16) + std::stoi((*it)[2], nullptr, 16) + std::stoi((*it)[3], nullptr, 16);
        pairs.emplace_back(std::stod((*it)[4]), sum);
    }
    ASSERT_EQ(pairs.size(), 15u);
    std::sort(pairs.begin(), pairs.end());
    for (std::size_t i = 1; i < pairs.size(); ++i) EXPECT_LE(pairs[i].second, pairs[i - 1].second);
    EXPECT_LT(pairs.back().second, pairs.front().second);
}

TEST(SvgTest, RankingLadderListsEveryTask) {
    std::map<std::string, std::vector<RankEntry>> rankings;
    rankings["a"] = rank_tasks({{"length", 0.1}, {"angle", 2.0}, {"area", 2.0}});
    rankings["b"] = rank_tasks({{"length", 1.0}, {"angle", 0.5}, {"area", 3.0}});
    const auto svg = render_ranking_ladder(rankings);
    EXPECT_EQ(count_of(svg, "class=\"rank\""), 6u);
    EXPECT_EQ(count_of(svg, "class=\"link\""), 3u);
    EXPECT_NE(svg.find("(tied)"), std::string::npos);
}

TEST(ReportTest, WriteReportEmitsArtifacts) {
    Fixture f;
    auto r = build_report(f.input, f.tmp.path);
    write_report(r, f.tmp.path / "out");
    for (const char* name : {"report.json", "scores.svg", "ranking.svg"})
        EXPECT_TRUE(std::filesystem::exists(f.tmp.path / "out" / name)) << name;
    const auto j = nlohmann::json::parse(read_text_file(f.tmp.path / "out" / "report.json"));
    EXPECT_EQ(j["artifacts"].size(), 2u);
}
