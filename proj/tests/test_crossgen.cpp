#include <gtest/gtest.h>

#include <percept/crossgen.hpp>

#include <cstdlib>

#include "temp_dir.hpp"

using namespace percept;

namespace {

CrossgenOptions small_options(const std::filesystem::path& dir) {
    CrossgenOptions opt;
    opt.task = {TaskKind::Length, 0};
    opt.total_count = 60;
    opt.data_seed = 21;
    opt.seeds = {1, 2};
    opt.train.hidden = {8};
    opt.train.max_epochs = 2;
    opt.work_dir = dir;
    return opt;
}

struct EnvGuard {
    std::string name;
    explicit EnvGuard(std::string n, const std::string& value) : name(std::move(n)) {
        setenv(name.c_str(), value.c_str(), 1);
    }
    ~EnvGuard() { unsetenv(name.c_str()); }
};

}  // namespace

TEST(Parameterizations, CanonicalOrder) {
    const auto v = enumerate_parameterizations({TaskKind::Length, 0});
    ASSERT_EQ(v.size(), 4u);
    EXPECT_EQ(v[0], Variant::Base);
    EXPECT_EQ(v[1], Variant::Pos);
    EXPECT_EQ(v[2], Variant::Size);
    EXPECT_EQ(v[3], Variant::PosSize);
    EXPECT_EQ(v, enumerate_parameterizations({TaskKind::Length, 0}));
    for (auto id : all_task_ids())
        for (auto variant : enumerate_parameterizations(id)) {
            EXPECT_EQ(parse_variant(variant_name(variant)), variant);
            EXPECT_NO_THROW(example_params(id, variant, 1, Split::Train));
        }
}

TEST(CrossMatrixTest, CompletesAndDiagonalMatchesStandalone) {
    probe::TempDir tmp;
    const auto opt = small_options(tmp.path);
    const auto m = run_cross_matrix(opt);
    ASSERT_EQ(m.cells.size(), 4u);
    EXPECT_EQ(m.completed(), 16u);
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) {
            const auto& cell = m.at(r, c);
            EXPECT_EQ(cell.train, m.variants[r]);
            EXPECT_EQ(cell.test, m.variants[c]);
            EXPECT_EQ(cell.runs.size(), 2u);
            ASSERT_TRUE(cell.mlae.has_value());
            EXPECT_EQ(*cell.mlae, (cell.runs[0].mlae + cell.runs[1].mlae) / 2);
        }
    for (std::size_t v = 0; v < 4; ++v) EXPECT_EQ(*m.at(v, v).mlae, standalone_evaluation(opt, m.variants[v]));

    // Same seeds in a fresh work directory give the same matrix.
    probe::TempDir again;
    const auto m2 = run_cross_matrix(small_options(again.path));
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) EXPECT_EQ(*m.at(r, c).mlae, *m2.at(r, c).mlae);
}

TEST(CrossMatrixTest, SerializationRoundTrip) {
    probe::TempDir tmp;
    auto opt = small_options(tmp.path);
    opt.seeds = {4};
    const auto m = run_cross_matrix(opt);
    write_cross_matrix(tmp.path / "matrix", m);
    const auto back = cross_matrix_from_json(nlohmann::json::parse(read_text_file(tmp.path / "matrix.json")));
    EXPECT_EQ(to_json(back), to_json(m));
    const auto csv = read_text_file(tmp.path / "matrix.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "train\\test,base,+pos,+size,+pos+size");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}

TEST(CrossMatrixTest, FailedTrainingMarksCellsWithoutAborting) {
    probe::TempDir tmp;
    auto opt = small_options(tmp.path);
    opt.train.learning_rate = 1e3;
    opt.train.momentum = 0.99;
    opt.train.max_epochs = 30;
    opt.train.patience = 30;
    const auto m = run_cross_matrix(opt);
    ASSERT_EQ(m.cells.size(), 4u);
    for (const auto& row : m.cells)
        for (const auto& cell : row) {
            EXPECT_TRUE(cell.failed);
            EXPECT_NE(cell.cause.find("divergence"), std::string::npos) << cell.cause;
        }
    EXPECT_NE(cross_matrix_csv(m).find("failed"), std::string::npos);
}

TEST(CrossMatrixTest, ExternalTrainerPopulatesMatrix) {
    probe::TempDir tmp;
    EnvGuard env(kVitTrainerEnv, std::string("python3 ") + PERCEPT_FAKE_TRAINER);
    auto opt = small_options(tmp.path);
    opt.model = "vit:vvit";
    const auto m = run_cross_matrix(opt);
    EXPECT_EQ(m.completed(), 16u);
    // A constant 0.5 predictor scores the same on every column built from the
    // same parameter subsets.
    for (std::size_t r = 0; r < 4; ++r) EXPECT_EQ(*m.at(r, 1).mlae, *m.at(0, 1).mlae);

    opt.model = "vit:fail";
    opt.work_dir = tmp.path / "fail";
    const auto failed = run_cross_matrix(opt);
    EXPECT_EQ(failed.completed(), 0u);
    EXPECT_NE(failed.at(0, 0).cause.find("status 3"), std::string::npos);
}

TEST(CrossMatrixTest, MissingTrainerCommandIsReported) {
    probe::TempDir tmp;
    unsetenv(kVitTrainerEnv);
    auto opt = small_options(tmp.path);
    opt.model = "vit:swin";
    const auto m = run_cross_matrix(opt);
    EXPECT_EQ(m.completed(), 0u);
    EXPECT_NE(m.at(2, 3).cause.find(kVitTrainerEnv), std::string::npos);
}
