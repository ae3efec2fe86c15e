#pragma once

// Cross-parameterization matrix: train on one variant, score on every
// variant's test split. Rows are training variants, columns testing variants.

#include <spawn.h>
#include <sys/wait.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "percept/dataset.hpp"
#include "percept/metrics.hpp"
#include "percept/mlp.hpp"
#include "percept/parallel.hpp"

extern char** environ;

namespace percept {

inline std::vector<Variant> enumerate_parameterizations(TaskId task) {
    detail::validate_task(task);
    return {kAllVariants.begin(), kAllVariants.end()};
}

/// Directory-safe variant name: base, pos, size, pos-size.
inline std::string variant_slug(Variant v) {
    switch (v) {
        case Variant::Base: return "base";
        case Variant::Pos: return "pos";
        case Variant::Size: return "size";
        case Variant::PosSize: return "pos-size";
    }
    return "base";
}

struct CrossgenOptions {
    TaskId task{TaskKind::Length, 0};
    std::size_t total_count = 3000;
    std::uint64_t data_seed = 1;
    std::vector<std::uint64_t> seeds{1, 2};
    TrainConfig train;
    std::string model = "mlp";  // or "vit:<arch>"
    std::filesystem::path work_dir;
    unsigned threads = 1;
};

inline std::uint64_t variant_data_seed(std::uint64_t base, Variant v) {
    return mix64(base + kGoldenGamma * (static_cast<std::uint64_t>(v) + 1));
}

inline std::filesystem::path variant_dataset_dir(const CrossgenOptions& opt, Variant v) {
    return opt.work_dir / "data" / variant_slug(v);
}

/// Opens the variant's dataset under the work directory, building it first
/// when absent.
inline Dataset ensure_variant_dataset(const CrossgenOptions& opt, Variant v) {
    const auto dir = variant_dataset_dir(opt, v);
    if (!std::filesystem::exists(dir / kManifestFile))
        build_dataset({opt.task, v, opt.total_count, variant_data_seed(opt.data_seed, v), dir, false, opt.threads});
    return open_dataset(dir);
}

struct CrossRun {
    std::uint64_t seed = 0;
    double mlae = 0;
    std::string predictions;         // path relative to the work directory
    std::string predictions_sha256;
};

struct CrossCell {
    Variant train = Variant::Base;
    Variant test = Variant::Base;
    std::vector<CrossRun> runs;
    std::optional<double> mlae;  // mean over runs; absent when failed
    bool failed = false;
    std::string cause;
};

struct CrossMatrix {
    TaskId task{TaskKind::Length, 0};
    std::string model;
    std::vector<Variant> variants;
    std::vector<std::uint64_t> seeds;
    std::string config_hash;
    std::map<std::string, std::string> dataset_checksums;  // variant name -> manifest sha256
    std::vector<std::vector<CrossCell>> cells;             // [train][test]
    std::vector<std::string> findings;

    const CrossCell& at(std::size_t row, std::size_t col) const { return cells.at(row).at(col); }
    std::size_t completed() const {
        std::size_t n = 0;
        for (const auto& row : cells)
            for (const auto& c : row) n += !c.failed;
        return n;
    }
};

// ---------------------------------------------------------------------------
// External trainer (ViT path)

inline constexpr const char* kVitTrainerEnv = "PERCEPT_VIT_TRAINER";

namespace detail {

inline std::vector<std::string> split_words(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

/// Runs argv to completion; returns the exit status or throws IoError when
/// the process cannot be started.
inline int run_process(const std::vector<std::string>& args) {
    std::vector<char*> argv;
    for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    pid_t pid;
    const int rc = posix_spawnp(&pid, argv[0], nullptr, nullptr, argv.data(), environ);
    if (rc != 0) throw IoError("cannot start '" + args[0] + "': " + std::strerror(rc));
    int status = 0;
    while (waitpid(pid, &status, 0) < 0)
        if (errno != EINTR) throw IoError("waitpid failed for '" + args[0] + "'");
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    return 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
}

}  // namespace detail

/// Invokes the external trainer:
///   <cmd> train --arch A --dataset DIR --seed S --out RUN --predict NAME=DIR ...
/// and reads back RUN/<NAME>.csv for each requested split.
inline std::map<std::string, PredictionSet> run_external_trainer(const std::string& arch, const Dataset& train_ds,
                                                                 std::uint64_t seed,
                                                                 const std::filesystem::path& run_dir,
                                                                 const std::map<std::string, std::filesystem::path>& predict) {
    const char* cmd = std::getenv(kVitTrainerEnv);
    if (!cmd || !*cmd) throw ConfigError(std::string(kVitTrainerEnv) + " is not set; cannot run model vit:" + arch);
    auto args = detail::split_words(cmd);
    for (std::string a : {"train", "--arch"}) args.push_back(a);
    args.push_back(arch);
    args.insert(args.end(), {"--dataset", train_ds.dir.string(), "--seed", std::to_string(seed), "--out", run_dir.string()});
    for (const auto& [name, dir] : predict) args.insert(args.end(), {"--predict", name + "=" + dir.string()});
    std::filesystem::create_directories(run_dir);
    const int status = detail::run_process(args);
    if (status != 0) throw Error("trainer", "external trainer exited with status " + std::to_string(status));
    std::map<std::string, PredictionSet> out;
    for (const auto& [name, dir] : predict) out[name] = read_prediction_set(run_dir / (name + ".csv"));
    return out;
}

// ---------------------------------------------------------------------------
// Matrix

namespace detail {

inline bool is_external_model(const std::string& model) { return model.rfind("vit:", 0) == 0; }

/// Trains one model for (row variant, seed) and returns predictions for the
/// test split of every column dataset.
inline std::vector<PredictionSet> train_and_predict(const CrossgenOptions& opt, const std::vector<Dataset>& data,
                                                    std::size_t row, std::uint64_t seed) {
    const auto run_dir = opt.work_dir / "runs" / variant_slug(data[row].manifest.variant) / std::to_string(seed);
    std::vector<PredictionSet> out;
    if (is_external_model(opt.model)) {
        std::map<std::string, std::filesystem::path> predict;
        for (const auto& ds : data) predict[variant_slug(ds.manifest.variant)] = ds.dir;
        auto sets = run_external_trainer(opt.model.substr(4), data[row], seed, run_dir, predict);
        for (const auto& ds : data) out.push_back(std::move(sets.at(variant_slug(ds.manifest.variant))));
        return out;
    }
    if (opt.model != "mlp") throw ConfigError("unknown model '" + opt.model + "' (expected mlp or vit:<arch>)");
    TrainConfig cfg = opt.train;
    cfg.seed = seed;
    const auto trained = train(data[row], cfg);
    std::filesystem::create_directories(run_dir);
    for (const auto& ds : data)
        out.push_back(write_predictions(trained.model, ds, Split::Test,
                                        run_dir / (variant_slug(ds.manifest.variant) + ".csv"),
                                        {"mlp", seed, config_hash(cfg)}));
    return out;
}

}  // namespace detail

inline CrossMatrix run_cross_matrix(const CrossgenOptions& opt) {
    if (opt.seeds.empty()) throw ConfigError("crossgen needs at least one seed");
    if (opt.work_dir.empty()) throw ConfigError("crossgen needs a work directory");
    CrossMatrix m;
    m.task = opt.task;
    m.model = opt.model;
    m.variants = enumerate_parameterizations(opt.task);
    m.seeds = opt.seeds;
    m.config_hash = detail::is_external_model(opt.model) ? "" : config_hash(opt.train);

    std::vector<Dataset> data;
    std::vector<TruthSet> truths;
    for (auto v : m.variants) {
        data.push_back(ensure_variant_dataset(opt, v));
        truths.push_back(load_truths(data.back(), Split::Test));
        m.dataset_checksums[std::string(variant_name(v))] = data.back().manifest_sha256;
    }
    const std::size_t k = m.variants.size();
    m.cells.assign(k, std::vector<CrossCell>(k));
    for (std::size_t r = 0; r < k; ++r)
        for (std::size_t c = 0; c < k; ++c) {
            m.cells[r][c].train = m.variants[r];
            m.cells[r][c].test = m.variants[c];
        }

    // Each row owns its cells, so rows can run on separate workers.
    parallel_for(k, opt.threads, [&](std::size_t r) {
        for (auto seed : opt.seeds) {
            std::vector<PredictionSet> preds;
            try {
                preds = detail::train_and_predict(opt, data, r, seed);
            } catch (const Error& e) {
                for (auto& cell : m.cells[r]) {
                    cell.failed = true;
                    cell.cause += (cell.cause.empty() ? "" : "; ") + ("seed " + std::to_string(seed) + ": " + e.kind() + ": " + e.what());
                }
                continue;
            }
            for (std::size_t c = 0; c < k; ++c) {
                auto& cell = m.cells[r][c];
                try {
                    const auto rel = std::filesystem::path("runs") / variant_slug(m.variants[r]) / std::to_string(seed) /
                                     (variant_slug(m.variants[c]) + ".csv");
                    const auto path = opt.work_dir / rel;
                    CrossRun run{seed, mlae(preds[c], truths[c]), rel.string(),
                                 std::filesystem::exists(path) ? sha256_file(path) : ""};
                    cell.runs.push_back(run);
                } catch (const Error& e) {
                    cell.failed = true;
                    cell.cause += (cell.cause.empty() ? "" : "; ") + ("seed " + std::to_string(seed) + ": " + e.kind() + ": " + e.what());
                }
            }
        }
    });

    for (std::size_t r = 0; r < k; ++r) {
        for (auto& cell : m.cells[r]) {
            if (cell.failed || cell.runs.empty()) {
                cell.failed = true;
                if (cell.cause.empty()) cell.cause = "no runs completed";
                continue;
            }
            double sum = 0;
            for (const auto& run : cell.runs) sum += run.mlae;
            cell.mlae = sum / static_cast<double>(cell.runs.size());
        }
        // Expected pattern: off-diagonal scores are no better than the diagonal.
        const auto& diag = m.cells[r][r];
        if (!diag.mlae) continue;
        double row_sum = 0;
        std::size_t row_n = 0;
        for (const auto& cell : m.cells[r])
            if (cell.mlae) row_sum += *cell.mlae, ++row_n;
        const double row_mean = row_sum / static_cast<double>(row_n);
        if (row_mean < *diag.mlae)
            m.findings.push_back("row " + std::string(variant_name(m.variants[r])) + ": mean " + format_double(row_mean) +
                                 " is below its diagonal " + format_double(*diag.mlae));
    }
    return m;
}

/// Trains on `v` with the matrix's seeds and scores v's own test split by
/// reading the written prediction files back.
inline double standalone_evaluation(const CrossgenOptions& opt, Variant v) {
    const auto ds = ensure_variant_dataset(opt, v);
    const auto truths = load_truths(ds, Split::Test);
    double sum = 0;
    for (auto seed : opt.seeds) {
        TrainConfig cfg = opt.train;
        cfg.seed = seed;
        const auto trained = train(ds, cfg);
        const auto path = opt.work_dir / "standalone" / variant_slug(v) / (std::to_string(seed) + ".csv");
        std::filesystem::create_directories(path.parent_path());
        write_predictions(trained.model, ds, Split::Test, path, {"mlp", seed, config_hash(cfg)});
        sum += mlae(read_prediction_set(path), truths);
    }
    return sum / static_cast<double>(opt.seeds.size());
}

// ---------------------------------------------------------------------------
// Serialization

inline std::string cross_matrix_csv(const CrossMatrix& m) {
    std::string out = "train\\test";
    for (auto v : m.variants) out += "," + std::string(variant_name(v));
    out += "\n";
    for (std::size_t r = 0; r < m.cells.size(); ++r) {
        out += std::string(variant_name(m.variants[r]));
        for (const auto& cell : m.cells[r]) out += "," + (cell.mlae ? format_double(*cell.mlae) : std::string("failed"));
        out += "\n";
    }
    return out;
}

inline nlohmann::json to_json(const CrossMatrix& m) {
    nlohmann::json variants = nlohmann::json::array();
    for (auto v : m.variants) variants.push_back(std::string(variant_name(v)));
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& row : m.cells)
        for (const auto& c : row) {
            nlohmann::json runs = nlohmann::json::array();
            for (const auto& r : c.runs)
                runs.push_back({{"seed", r.seed}, {"mlae", r.mlae}, {"predictions", r.predictions},
                                {"predictions_sha256", r.predictions_sha256}});
            nlohmann::json cell = {{"train", std::string(variant_name(c.train))},
                                   {"test", std::string(variant_name(c.test))},
                                   {"mlae", c.mlae ? nlohmann::json(*c.mlae) : nlohmann::json(nullptr)},
                                   {"failed", c.failed},
                                   {"runs", runs}};
            if (c.failed) cell["cause"] = c.cause;
            cells.push_back(cell);
        }
    return {{"task", task_name(m.task)},         {"model", m.model},
            {"variants", variants},              {"seeds", m.seeds},
            {"config_hash", m.config_hash},      {"datasets", m.dataset_checksums},
            {"cells", cells},                    {"findings", m.findings}};
}

inline CrossMatrix cross_matrix_from_json(const nlohmann::json& j) {
    try {
        CrossMatrix m;
        m.task = parse_task(j.at("task").get<std::string>());
        m.model = j.value("model", "");
        for (const auto& v : j.at("variants")) m.variants.push_back(parse_variant(v.get<std::string>()));
        m.seeds = j.value("seeds", std::vector<std::uint64_t>{});
        m.config_hash = j.value("config_hash", "");
        m.dataset_checksums = j.value("datasets", std::map<std::string, std::string>{});
        m.findings = j.value("findings", std::vector<std::string>{});
        const std::size_t k = m.variants.size();
        m.cells.assign(k, std::vector<CrossCell>(k));
        const auto& cells = j.at("cells");
        if (cells.size() != k * k) throw FormatError("cross matrix has " + std::to_string(cells.size()) + " cells, expected " + std::to_string(k * k));
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const auto& cj = cells[i];
            auto& c = m.cells[i / k][i % k];
            c.train = parse_variant(cj.at("train").get<std::string>());
            c.test = parse_variant(cj.at("test").get<std::string>());
            if (!cj.at("mlae").is_null()) c.mlae = cj.at("mlae").get<double>();
            c.failed = cj.value("failed", false);
            c.cause = cj.value("cause", "");
            for (const auto& r : cj.value("runs", nlohmann::json::array()))
                c.runs.push_back({r.at("seed").get<std::uint64_t>(), r.at("mlae").get<double>(),
                                  r.value("predictions", ""), r.value("predictions_sha256", "")});
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed cross matrix JSON: ") + e.what());
    } catch (const Error& e) {
        throw FormatError(std::string("malformed cross matrix JSON: ") + e.what());
    }
}

/// Writes `<stem>.csv` and `<stem>.json`.
inline void write_cross_matrix(const std::filesystem::path& stem, const CrossMatrix& m) {
    write_text_file(std::filesystem::path(stem.string() + ".csv"), cross_matrix_csv(m));
    write_text_file(std::filesystem::path(stem.string() + ".json"), to_json(m).dump(2) + "\n");
}

}  // namespace percept
