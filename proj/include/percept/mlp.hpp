#pragma once

// Baseline regressors: a multilayer perceptron (a linear model when there are
// no hidden layers) trained with mini-batch SGD + momentum on MSE.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "percept/dataset.hpp"
#include "percept/errors.hpp"
#include "percept/metrics.hpp"
#include "percept/rng.hpp"
#include "percept/sha256.hpp"

namespace percept {

template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using RowVector = Eigen::Matrix<T, 1, Eigen::Dynamic>;

/// Layer l maps dims[l] -> dims[l+1]: H = X * weights[l] + biases[l].
/// ReLU on hidden layers, identity on the output.
template <typename T>
struct Mlp {
    std::vector<std::size_t> dims;
    std::vector<Matrix<T>> weights;
    std::vector<RowVector<T>> biases;

    std::size_t layers() const { return weights.size(); }
    std::size_t input_dim() const { return dims.front(); }
    std::size_t output_dim() const { return dims.back(); }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (std::size_t l = 0; l < layers(); ++l) n += static_cast<std::size_t>(weights[l].size() + biases[l].size());
        return n;
    }

    template <typename U>
    Mlp<U> cast() const {
        Mlp<U> out;
        out.dims = dims;
        for (std::size_t l = 0; l < layers(); ++l) {
            out.weights.push_back(weights[l].template cast<U>());
            out.biases.push_back(biases[l].template cast<U>());
        }
        return out;
    }
};

inline std::vector<std::size_t> mlp_dims(std::size_t input, const std::vector<std::size_t>& hidden, std::size_t output) {
    std::vector<std::size_t> dims{input};
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(output);
    return dims;
}

namespace detail {

inline void check_dims(const std::vector<std::size_t>& dims) {
    if (dims.size() < 2) throw ConfigError("a model needs at least an input and an output dimension");
    for (std::size_t i = 0; i < dims.size(); ++i)
        if (dims[i] == 0) throw ConfigError("layer " + std::to_string(i) + " has zero size");
}

}  // namespace detail

template <typename T = float>
Mlp<T> zero_model(const std::vector<std::size_t>& dims) {
    detail::check_dims(dims);
    Mlp<T> m;
    m.dims = dims;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        m.weights.push_back(Matrix<T>::Zero(static_cast<Eigen::Index>(dims[l]), static_cast<Eigen::Index>(dims[l + 1])));
        m.biases.push_back(RowVector<T>::Zero(static_cast<Eigen::Index>(dims[l + 1])));
    }
    return m;
}

/// Xavier uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
/// Values are drawn in double and rounded, so float and double models from
/// the same seed agree to float precision.
template <typename T = float>
Mlp<T> init_model(const std::vector<std::size_t>& dims, std::uint64_t seed) {
    auto m = zero_model<T>(dims);
    Rng rng(derive_seed(seed, Stream::Parameters));
    for (std::size_t l = 0; l < m.layers(); ++l) {
        const double limit = std::sqrt(6.0 / static_cast<double>(dims[l] + dims[l + 1]));
        auto& w = m.weights[l];
        for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = static_cast<T>((2.0 * rng.uniform01() - 1.0) * limit);
    }
    return m;
}

template <typename T>
std::string parameter_checksum(const Mlp<T>& m) {
    Sha256 h;
    for (std::size_t l = 0; l < m.layers(); ++l) {
        h.update(m.weights[l].data(), sizeof(T) * static_cast<std::size_t>(m.weights[l].size()));
        h.update(m.biases[l].data(), sizeof(T) * static_cast<std::size_t>(m.biases[l].size()));
    }
    return h.hex();
}

template <typename T>
bool all_finite(const Mlp<T>& m) {
    for (std::size_t l = 0; l < m.layers(); ++l)
        if (!m.weights[l].allFinite() || !m.biases[l].allFinite()) return false;
    return true;
}

/// Pre-activations of every layer for one batch; the last entry is the output.
template <typename T>
struct Activations {
    std::vector<Matrix<T>> pre;
};

template <typename T, typename Derived>
Matrix<T> forward(const Mlp<T>& m, const Eigen::MatrixBase<Derived>& x, Activations<T>* keep = nullptr) {
    if (static_cast<std::size_t>(x.cols()) != m.input_dim())
        throw ShapeError("model expects " + std::to_string(m.input_dim()) + " inputs, batch has " +
                         std::to_string(x.cols()));
    Matrix<T> a = x;
    if (keep) keep->pre.clear();
    for (std::size_t l = 0; l < m.layers(); ++l) {
        Matrix<T> z = a * m.weights[l];
        z.rowwise() += m.biases[l];
        if (keep) keep->pre.push_back(z);
        a = (l + 1 < m.layers()) ? Matrix<T>(z.cwiseMax(T(0))) : std::move(z);
    }
    return a;
}

/// Forward pass over images; one row of predictions per image.
template <typename T>
Matrix<T> forward_predict(const Mlp<T>& m, const std::vector<FloatImage>& images) {
    if (images.empty()) return Matrix<T>(0, static_cast<Eigen::Index>(m.output_dim()));
    Matrix<T> x(static_cast<Eigen::Index>(images.size()), static_cast<Eigen::Index>(m.input_dim()));
    for (std::size_t i = 0; i < images.size(); ++i) {
        if (images[i].values.size() != m.input_dim())
            throw ShapeError("image " + std::to_string(i) + " has " + std::to_string(images[i].values.size()) +
                             " pixels, model expects " + std::to_string(m.input_dim()));
        for (std::size_t j = 0; j < m.input_dim(); ++j)
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = static_cast<T>(images[i].values[j]);
    }
    return forward(m, x);
}

template <typename T>
struct Gradients {
    std::vector<Matrix<T>> weights;
    std::vector<RowVector<T>> biases;
};

/// MSE over every (row, output) of the batch and its gradient.
template <typename T, typename DX, typename DY>
T loss_and_gradients(const Mlp<T>& m, const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y, Gradients<T>& g) {
    Activations<T> act;
    const Matrix<T> out = forward(m, x, &act);
    if (out.rows() != y.rows() || out.cols() != y.cols())
        throw ShapeError("targets are " + std::to_string(y.rows()) + "x" + std::to_string(y.cols()) + ", outputs are " +
                         std::to_string(out.rows()) + "x" + std::to_string(out.cols()));
    const Matrix<T> diff = out - y;
    const T count = static_cast<T>(diff.size());
    const T loss = diff.squaredNorm() / count;

    g.weights.resize(m.layers());
    g.biases.resize(m.layers());
    Matrix<T> delta = diff * (T(2) / count);
    for (std::size_t l = m.layers(); l-- > 0;) {
        if (l == 0) g.weights[0].noalias() = x.transpose() * delta;
        else g.weights[l].noalias() = act.pre[l - 1].cwiseMax(T(0)).transpose() * delta;
        g.biases[l] = delta.colwise().sum();
        if (l > 0) {
            Matrix<T> back = delta * m.weights[l].transpose();
            delta = back.cwiseProduct((act.pre[l - 1].array() > T(0)).template cast<T>().matrix());
        }
    }
    return loss;
}

template <typename T, typename DX, typename DY>
T mse(const Mlp<T>& m, const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y) {
    return (forward(m, x) - y).squaredNorm() / static_cast<T>(y.size());
}

// ---------------------------------------------------------------------------
// Training

struct TrainConfig {
    std::size_t batch_size = 32;
    double learning_rate = 1e-4;
    double momentum = 0.9;
    double weight_decay = 1e-6;
    std::size_t max_epochs = 50;
    std::size_t patience = 5;
    std::uint64_t seed = 0;
    std::vector<std::size_t> hidden{256, 128};

    void validate() const {
        if (batch_size == 0) throw ConfigError("batch_size must be positive");
        if (!(learning_rate >= 0) || !std::isfinite(learning_rate)) throw ConfigError("learning_rate must be >= 0");
        if (!(momentum >= 0 && momentum < 1)) throw ConfigError("momentum must lie in [0, 1)");
        if (!(weight_decay >= 0) || !std::isfinite(weight_decay)) throw ConfigError("weight_decay must be >= 0");
        if (max_epochs == 0) throw ConfigError("max_epochs must be positive");
        if (patience == 0) throw ConfigError("patience must be positive");
        for (auto h : hidden)
            if (h == 0) throw ConfigError("hidden layer sizes must be positive");
    }
};

inline nlohmann::json to_json(const TrainConfig& c) {
    return {{"batch_size", c.batch_size}, {"learning_rate", c.learning_rate}, {"momentum", c.momentum},
            {"weight_decay", c.weight_decay}, {"max_epochs", c.max_epochs},  {"patience", c.patience},
            {"seed", c.seed},             {"hidden", c.hidden}};
}

inline std::string config_hash(const TrainConfig& c) { return sha256_hex(to_json(c).dump()); }

struct EpochStats {
    std::size_t epoch = 0;  // 1-based
    double train_mse = 0;
    double val_mse = 0;
};

struct TrainReport {
    std::vector<EpochStats> epochs;
    std::size_t best_epoch = 0;
    double best_val_mse = 0;
    bool stopped_early = false;
    std::string parameter_checksum;
    double wall_clock_seconds = 0;
};

inline nlohmann::json to_json(const TrainReport& r) {
    nlohmann::json epochs = nlohmann::json::array();
    for (const auto& e : r.epochs) epochs.push_back({{"epoch", e.epoch}, {"train_mse", e.train_mse}, {"val_mse", e.val_mse}});
    return {{"epochs", epochs},
            {"best_epoch", r.best_epoch},
            {"best_val_mse", r.best_val_mse},
            {"stopped_early", r.stopped_early},
            {"parameter_checksum", r.parameter_checksum},
            {"wall_clock_seconds", r.wall_clock_seconds}};
}

template <typename T>
struct TrainResult {
    Mlp<T> model;
    TrainReport report;
};

/// Borrowed row-major views of a training split.
template <typename T>
struct DataView {
    Eigen::Map<const Matrix<T>> x;
    Eigen::Map<const Matrix<T>> y;
};

inline DataView<float> view_of(const SplitArrays& a) {
    return {Eigen::Map<const Matrix<float>>(a.images.data(), static_cast<Eigen::Index>(a.rows),
                                            static_cast<Eigen::Index>(a.cols)),
            Eigen::Map<const Matrix<float>>(a.labels.data(), static_cast<Eigen::Index>(a.rows),
                                            static_cast<Eigen::Index>(a.label_dim))};
}

/// Mini-batch SGD with the momentum update
///   v <- m v + g;   theta <- theta - lr (v + wd theta)
/// Batches follow a per-epoch seeded shuffle; the model with the lowest
/// validation MSE is returned.
template <typename T>
TrainResult<T> train(Mlp<T> model, const DataView<T>& train_data, const DataView<T>& val_data, const TrainConfig& cfg) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    const auto n = static_cast<std::size_t>(train_data.x.rows());
    if (n == 0) throw EmptyInputError("training split is empty");
    if (val_data.x.rows() == 0) throw EmptyInputError("validation split is empty");

    Gradients<T> grad;
    Gradients<T> velocity;
    for (std::size_t l = 0; l < model.layers(); ++l) {
        velocity.weights.push_back(Matrix<T>::Zero(model.weights[l].rows(), model.weights[l].cols()));
        velocity.biases.push_back(RowVector<T>::Zero(model.biases[l].cols()));
    }
    const T lr = static_cast<T>(cfg.learning_rate);
    const T mom = static_cast<T>(cfg.momentum);
    const T wd = static_cast<T>(cfg.weight_decay);

    TrainResult<T> result{model, {}};
    result.report.best_val_mse = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> order(n);
    Matrix<T> xb, yb;
    std::size_t since_best = 0;

    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng shuffle(derive_seed(mix64(cfg.seed + kGoldenGamma * epoch), Stream::Shuffle));
        for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[shuffle.index(i)]);

        double loss_sum = 0;
        for (std::size_t b0 = 0, batch = 1; b0 < n; b0 += cfg.batch_size, ++batch) {
            const std::size_t bs = std::min(cfg.batch_size, n - b0);
            xb.resize(static_cast<Eigen::Index>(bs), train_data.x.cols());
            yb.resize(static_cast<Eigen::Index>(bs), train_data.y.cols());
            for (std::size_t r = 0; r < bs; ++r) {
                const auto src = static_cast<Eigen::Index>(order[b0 + r]);
                xb.row(static_cast<Eigen::Index>(r)) = train_data.x.row(src);
                yb.row(static_cast<Eigen::Index>(r)) = train_data.y.row(src);
            }
            const T loss = loss_and_gradients(model, xb, yb, grad);
            if (!std::isfinite(static_cast<double>(loss)))
                throw DivergenceError("non-finite training loss at epoch " + std::to_string(epoch) + ", batch " +
                                      std::to_string(batch));
            loss_sum += static_cast<double>(loss) * static_cast<double>(bs);
            for (std::size_t l = 0; l < model.layers(); ++l) {
                velocity.weights[l] = mom * velocity.weights[l] + grad.weights[l];
                velocity.biases[l] = mom * velocity.biases[l] + grad.biases[l];
                model.weights[l] -= lr * (velocity.weights[l] + wd * model.weights[l]);
                model.biases[l] -= lr * (velocity.biases[l] + wd * model.biases[l]);
            }
        }

        EpochStats s{epoch, loss_sum / static_cast<double>(n), 0.0};
        s.val_mse = static_cast<double>(mse(model, val_data.x, val_data.y));
        if (!std::isfinite(s.val_mse) || !std::isfinite(s.train_mse))
            throw DivergenceError("non-finite loss at end of epoch " + std::to_string(epoch));
        result.report.epochs.push_back(s);
        if (s.val_mse < result.report.best_val_mse) {
            result.report.best_val_mse = s.val_mse;
            result.report.best_epoch = epoch;
            result.model = model;
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            result.report.stopped_early = true;
            break;
        }
    }
    result.report.parameter_checksum = parameter_checksum(result.model);
    result.report.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

/// Trains on the dataset's train split with early stopping on its val split.
inline TrainResult<float> train(const Dataset& ds, const TrainConfig& cfg) {
    cfg.validate();
    const auto tr = load_split_arrays(ds, Split::Train);
    const auto va = load_split_arrays(ds, Split::Val);
    auto model = init_model<float>(mlp_dims(tr.cols, cfg.hidden, tr.label_dim), cfg.seed);
    return train(std::move(model), view_of(tr), view_of(va), cfg);
}

// ---------------------------------------------------------------------------
// Gradient check

struct GradientCheckResult {
    double max_relative_error = 0;
    std::size_t checked = 0;
    std::size_t skipped = 0;  // perturbation crossed a ReLU kink
};

namespace detail {

template <typename T>
T& parameter_ref(Mlp<T>& m, std::size_t layer, bool bias, std::size_t index) {
    return bias ? m.biases[layer].data()[index] : m.weights[layer].data()[index];
}

template <typename T>
std::vector<bool> relu_pattern(const Activations<T>& act) {
    std::vector<bool> out;
    for (std::size_t l = 0; l + 1 < act.pre.size(); ++l)
        for (Eigen::Index i = 0; i < act.pre[l].size(); ++i) out.push_back(act.pre[l].data()[i] > T(0));
    return out;
}

}  // namespace detail

/// Compares backpropagated gradients of the single-example MSE with central
/// differences on at least `samples` parameters drawn across every weight
/// matrix and bias vector. Parameters whose perturbation flips a ReLU are
/// replaced by fresh draws.
inline GradientCheckResult gradient_check(const Mlp<double>& model, const std::vector<double>& input,
                                          const std::vector<double>& target, double epsilon = 1e-4,
                                          std::size_t samples = 100, std::uint64_t seed = 0) {
    if (!(epsilon >= 1e-6 && epsilon <= 1e-3)) throw ConfigError("epsilon must lie in [1e-6, 1e-3]");
    if (input.size() != model.input_dim() || target.size() != model.output_dim())
        throw ShapeError("gradient_check example does not match the model shape");
    const Eigen::Map<const Matrix<double>> x(input.data(), 1, static_cast<Eigen::Index>(input.size()));
    const Eigen::Map<const Matrix<double>> y(target.data(), 1, static_cast<Eigen::Index>(target.size()));

    Gradients<double> g;
    loss_and_gradients(model, x, y, g);
    Activations<double> base_act;
    forward(model, x, &base_act);
    const auto base_pattern = detail::relu_pattern(base_act);

    Mlp<double> probe = model;
    Rng rng(derive_seed(seed, Stream::Parameters));
    GradientCheckResult r;
    const std::size_t slots = 2 * model.layers();  // weights and biases of every layer
    const std::size_t per_slot = (samples + slots - 1) / slots;
    for (std::size_t slot = 0; slot < slots; ++slot) {
        const std::size_t layer = slot / 2;
        const bool bias = slot % 2 == 1;
        const std::size_t size = static_cast<std::size_t>(bias ? model.biases[layer].size() : model.weights[layer].size());
        std::size_t done = 0;
        for (std::size_t attempt = 0; done < per_slot && attempt < 20 * per_slot; ++attempt) {
            const std::size_t idx = rng.index(size);
            double& p = detail::parameter_ref(probe, layer, bias, idx);
            const double saved = p;
            Activations<double> act_plus, act_minus;
            p = saved + epsilon;
            const double lp = (forward(probe, x, &act_plus) - y).squaredNorm() / static_cast<double>(y.size());
            p = saved - epsilon;
            const double lm = (forward(probe, x, &act_minus) - y).squaredNorm() / static_cast<double>(y.size());
            p = saved;
            if (detail::relu_pattern(act_plus) != base_pattern || detail::relu_pattern(act_minus) != base_pattern) {
                ++r.skipped;
                continue;
            }
            const double numeric = (lp - lm) / (2 * epsilon);
            const double analytic = bias ? g.biases[layer].data()[idx] : g.weights[layer].data()[idx];
            const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-12});
            r.max_relative_error = std::max(r.max_relative_error, std::abs(analytic - numeric) / denom);
            ++r.checked;
            ++done;
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Checkpoints and predictions

inline constexpr char kCheckpointMagic[4] = {'P', 'B', 'M', '1'};

/// Layout (little-endian): "PBM1", u32 layer-dimension count, u32 dims...,
/// then for each layer its row-major f32 weights followed by its f32 biases.
/// A `<path>.json` sidecar echoes the training config and checksum.
inline void save_checkpoint(const std::filesystem::path& path, const Mlp<float>& m, const TrainConfig& cfg) {
    std::string buf(kCheckpointMagic, 4);
    detail::append_u32(buf, static_cast<std::uint32_t>(m.dims.size()));
    for (auto d : m.dims) detail::append_u32(buf, static_cast<std::uint32_t>(d));
    for (std::size_t l = 0; l < m.layers(); ++l) {
        detail::append_floats(buf, m.weights[l].data(), static_cast<std::size_t>(m.weights[l].size()));
        detail::append_floats(buf, m.biases[l].data(), static_cast<std::size_t>(m.biases[l].size()));
    }
    write_text_file(path, buf);
    const nlohmann::json echo = {{"format", "PBM1"},
                                 {"dims", m.dims},
                                 {"config", to_json(cfg)},
                                 {"config_hash", config_hash(cfg)},
                                 {"parameter_checksum", parameter_checksum(m)}};
    write_text_file(std::filesystem::path(path.string() + ".json"), echo.dump(2) + "\n");
}

inline Mlp<float> load_checkpoint(const std::filesystem::path& path) {
    const std::string buf = read_text_file(path);
    const auto* p = reinterpret_cast<const unsigned char*>(buf.data());
    if (buf.size() < 8 || buf.compare(0, 4, std::string(kCheckpointMagic, 4)) != 0)
        throw FormatError(path.string() + ": not a PBM1 checkpoint");
    const std::size_t count = detail::read_u32(p + 4);
    if (count < 2 || count > 64 || buf.size() < 8 + 4 * count) throw FormatError(path.string() + ": bad layer table");
    std::vector<std::size_t> dims;
    for (std::size_t i = 0; i < count; ++i) dims.push_back(detail::read_u32(p + 8 + 4 * i));
    auto m = zero_model<float>(dims);
    std::size_t offset = 8 + 4 * count;
    const std::size_t need = offset + 4 * m.parameter_count();
    if (buf.size() != need)
        throw FormatError(path.string() + ": expected " + std::to_string(need) + " bytes, found " + std::to_string(buf.size()));
    for (std::size_t l = 0; l < m.layers(); ++l) {
        const auto nw = static_cast<std::size_t>(m.weights[l].size());
        detail::read_floats(buf.data() + offset, m.weights[l].data(), nw);
        offset += 4 * nw;
        const auto nb = static_cast<std::size_t>(m.biases[l].size());
        detail::read_floats(buf.data() + offset, m.biases[l].data(), nb);
        offset += 4 * nb;
    }
    return m;
}

struct PredictionMeta {
    std::string model = "mlp";
    std::uint64_t seed = 0;
    std::string config_hash;
};

/// Predictions for every example of a split, in index order.
inline PredictionSet predict_split(const Mlp<float>& m, const Dataset& ds, Split split, const PredictionMeta& meta) {
    const auto arrays = load_split_arrays(ds, split);
    if (arrays.cols != m.input_dim())
        throw ShapeError("dataset images have " + std::to_string(arrays.cols) + " pixels, model expects " +
                         std::to_string(m.input_dim()));
    if (arrays.label_dim != m.output_dim())
        throw ShapeError("dataset label_dim is " + std::to_string(arrays.label_dim) + ", model outputs " +
                         std::to_string(m.output_dim()));
    PredictionSet ps;
    ps.dataset_checksum = ds.manifest_sha256;
    ps.split = split;
    ps.model = meta.model;
    ps.seed = meta.seed;
    ps.config_hash = meta.config_hash;
    ps.label_dim = arrays.label_dim;
    const auto view = view_of(arrays);
    constexpr Eigen::Index chunk = 256;
    for (Eigen::Index r0 = 0; r0 < view.x.rows(); r0 += chunk) {
        const Eigen::Index rows = std::min(chunk, view.x.rows() - r0);
        const Matrix<float> out = forward(m, view.x.middleRows(r0, rows));
        for (Eigen::Index r = 0; r < rows; ++r) {
            PredictionEntry e{arrays.id(static_cast<std::size_t>(r0 + r)), {}};
            for (Eigen::Index d = 0; d < out.cols(); ++d) e.values.push_back(static_cast<double>(out(r, d)));
            ps.entries.push_back(std::move(e));
        }
    }
    return ps;
}

inline PredictionSet write_predictions(const Mlp<float>& m, const Dataset& ds, Split split,
                                       const std::filesystem::path& csv, const PredictionMeta& meta) {
    auto ps = predict_split(m, ds, split, meta);
    write_prediction_set(csv, ps);
    return ps;
}

}  // namespace percept
