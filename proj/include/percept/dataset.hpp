#pragma once

// Dataset build / read / verify.
//
// On-disk layout of a dataset directory:
//   manifest.json            metadata, partition description, file checksums
//   <split>.pbt              "PBT1" tensors: u32 count, height, width,
//                            label_dim, then per record the image floats
//                            (row-major) followed by the label floats; all
//                            little-endian
//   <split>.params.csv       index,seed,p0[,p1...] generation record used by
//                            verification
//
// Every example is generated from its own seed (see example_seed), so
// generation fans out over workers and the files come out byte-identical
// regardless of worker count.

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "percept/errors.hpp"
#include "percept/image.hpp"
#include "percept/parallel.hpp"
#include "percept/rng.hpp"
#include "percept/sha256.hpp"
#include "percept/stimuli.hpp"
#include "percept/tasks.hpp"

namespace percept {

namespace fs = std::filesystem;

inline constexpr int kDatasetFormatVersion = 1;
inline constexpr char kTensorMagic[4] = {'P', 'B', 'T', '1'};
inline constexpr std::size_t kTensorHeaderBytes = 20;
inline constexpr const char* kManifestFile = "manifest.json";

struct SplitCounts {
    std::size_t train = 0, val = 0, test = 0;

    std::size_t operator[](Split s) const noexcept {
        return s == Split::Train ? train : s == Split::Val ? val : test;
    }
    std::size_t total() const noexcept { return train + val + test; }
    friend bool operator==(const SplitCounts&, const SplitCounts&) = default;
};

/// 0.6 : 0.2 : 0.2 with val and test rounded to nearest and the remainder
/// in train, so every split is within 1/total of its proportion.
inline SplitCounts split_counts(std::size_t total) {
    if (total < 5) throw ConfigError("total_count must be at least 5, got " + std::to_string(total));
    const std::size_t val = (2 * total + 5) / 10;
    return {total - 2 * val, val, val};
}

inline std::uint64_t split_seed(std::uint64_t base_seed, Split s) noexcept {
    return mix64(base_seed + kGoldenGamma * (static_cast<std::uint64_t>(s) + 1));
}

/// Per-example seed: mix64(mix64(base + G*(split_id+1)) + G*(index+1)).
inline std::uint64_t example_seed(std::uint64_t base_seed, Split s, std::size_t index) noexcept {
    return mix64(split_seed(base_seed, s) + kGoldenGamma * (static_cast<std::uint64_t>(index) + 1));
}

inline std::string example_id(Split s, std::size_t index) {
    return std::string(split_name(s)) + ":" + std::to_string(index);
}

struct SplitFiles {
    std::string tensors;
    std::string tensors_sha256;
    std::string params;
    std::string params_sha256;
    std::size_t count = 0;
};

struct DatasetManifest {
    int format_version = kDatasetFormatVersion;
    TaskId task;
    Variant variant = Variant::Base;
    std::size_t total_count = 0;
    SplitCounts counts;
    std::size_t label_dim = 1;
    std::uint64_t base_seed = 0;
    int height = kCanvasSize;
    int width = kCanvasSize;
    bool unique_params = false;
    std::string partition_scheme;
    std::array<std::size_t, 3> cardinality{};
    std::array<SplitFiles, 3> files;

    const SplitFiles& split_files(Split s) const { return files[static_cast<std::size_t>(s)]; }
    SplitFiles& split_files(Split s) { return files[static_cast<std::size_t>(s)]; }
};

inline nlohmann::json to_json(const DatasetManifest& m) {
    using nlohmann::json;
    json j;
    j["format_version"] = m.format_version;
    j["task"] = task_name(m.task);
    j["variant"] = std::string(variant_name(m.variant));
    j["total_count"] = m.total_count;
    j["split_counts"] = {{"train", m.counts.train}, {"val", m.counts.val}, {"test", m.counts.test}};
    j["label_dim"] = m.label_dim;
    j["base_seed"] = m.base_seed;
    j["image"] = {{"height", m.height}, {"width", m.width}, {"dtype", "float32"}, {"byte_order", "little"}};
    j["unique_params"] = m.unique_params;
    j["partition"] = {
        {"scheme", m.partition_scheme},
        {"buckets", {{"train", {0, 1, 2}}, {"val", {3}}, {"test", {4}}}},
        {"cardinality", {{"train", m.cardinality[0]}, {"val", m.cardinality[1]}, {"test", m.cardinality[2]}}},
    };
    j["seed_derivation"] =
        "example_seed = mix64(mix64(base_seed + G*(split_id+1)) + G*(index+1)), G = 0x9E3779B97F4A7C15, "
        "split_id train=0 val=1 test=2, mix64 = splitmix64 finalizer";
    json files = json::object();
    for (auto s : kAllSplits) {
        const auto& f = m.split_files(s);
        files[std::string(split_name(s))] = {{"tensors", f.tensors},
                                             {"tensors_sha256", f.tensors_sha256},
                                             {"params", f.params},
                                             {"params_sha256", f.params_sha256},
                                             {"count", f.count}};
    }
    j["files"] = files;
    return j;
}

inline DatasetManifest manifest_from_json(const nlohmann::json& j) {
    try {
        DatasetManifest m;
        m.format_version = j.at("format_version").get<int>();
        if (m.format_version != kDatasetFormatVersion)
            throw FormatError("unsupported dataset format_version " + std::to_string(m.format_version));
        m.task = parse_task(j.at("task").get<std::string>());
        m.variant = parse_variant(j.at("variant").get<std::string>());
        m.total_count = j.at("total_count").get<std::size_t>();
        const auto& sc = j.at("split_counts");
        m.counts = {sc.at("train").get<std::size_t>(), sc.at("val").get<std::size_t>(), sc.at("test").get<std::size_t>()};
        m.label_dim = j.at("label_dim").get<std::size_t>();
        m.base_seed = j.at("base_seed").get<std::uint64_t>();
        m.height = j.at("image").at("height").get<int>();
        m.width = j.at("image").at("width").get<int>();
        m.unique_params = j.value("unique_params", false);
        m.partition_scheme = j.at("partition").at("scheme").get<std::string>();
        const auto& card = j.at("partition").at("cardinality");
        m.cardinality = {card.at("train").get<std::size_t>(), card.at("val").get<std::size_t>(),
                         card.at("test").get<std::size_t>()};
        for (auto s : kAllSplits) {
            const auto& f = j.at("files").at(std::string(split_name(s)));
            m.split_files(s) = {f.at("tensors").get<std::string>(), f.at("tensors_sha256").get<std::string>(),
                                f.at("params").get<std::string>(), f.at("params_sha256").get<std::string>(),
                                f.at("count").get<std::size_t>()};
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed manifest: ") + e.what());
    }
}

inline std::string manifest_text(const DatasetManifest& m) { return to_json(m).dump(2) + "\n"; }

/// A dataset directory with its parsed manifest and the manifest checksum
/// that prediction files refer to.
struct Dataset {
    fs::path dir;
    DatasetManifest manifest;
    std::string manifest_sha256;

    fs::path path_of(const std::string& name) const { return dir / name; }
};

inline std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
}

inline Dataset open_dataset(const fs::path& dir) {
    const fs::path mpath = dir / kManifestFile;
    if (!fs::exists(mpath)) throw IoError("no manifest at " + mpath.string());
    const std::string text = read_text_file(mpath);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(mpath.string() + ": " + e.what());
    }
    return {dir, manifest_from_json(j), sha256_hex(text)};
}

// ---------------------------------------------------------------------------
// Example generation

struct GeneratedExample {
    std::uint64_t seed = 0;
    ParamTuple params;
    FloatImage image;
    std::vector<double> labels;
};

/// Parameters of example `index` when sampled independently per example.
inline ParamTuple example_params(TaskId task, Variant variant, std::uint64_t seed, Split split) {
    Rng rng(derive_seed(seed, Stream::Parameters));
    return sample_parameters(task, variant, split, rng);
}

/// All parameters of a split in unique-tuple mode, drawn from one stream
/// seeded by the split seed.
inline std::vector<ParamTuple> unique_split_params(TaskId task, Variant variant, std::uint64_t base_seed, Split split,
                                                   std::size_t count) {
    Rng rng(derive_seed(split_seed(base_seed, split), Stream::Parameters));
    return sample_unique_parameters(task, variant, split, count, rng);
}

inline GeneratedExample render_example(TaskId task, Variant variant, std::uint64_t seed, ParamTuple params) {
    GeneratedExample ex;
    ex.seed = seed;
    Stimulus stim = generate({task, std::move(params), variant, seed});
    Rng noise(derive_seed(seed, Stream::Noise));
    ex.image = normalize_and_noise(stim.canvas, noise);
    ex.params = std::move(stim.spec.params);
    ex.labels = std::move(stim.labels);
    return ex;
}

namespace detail {

inline void append_u32(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void append_floats(std::string& buf, const float* data, std::size_t n) {
    const std::size_t at = buf.size();
    buf.resize(at + 4 * n);
    if constexpr (std::endian::native == std::endian::little) {
        std::memcpy(buf.data() + at, data, 4 * n);
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const auto u = std::bit_cast<std::uint32_t>(data[i]);
            for (int b = 0; b < 4; ++b) buf[at + 4 * i + static_cast<std::size_t>(b)] = static_cast<char>((u >> (8 * b)) & 0xFF);
        }
    }
}

inline std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
           static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

inline void read_floats(const char* src, float* dst, std::size_t n) {
    if constexpr (std::endian::native == std::endian::little) {
        std::memcpy(dst, src, 4 * n);
    } else {
        for (std::size_t i = 0; i < n; ++i)
            dst[i] = std::bit_cast<float>(read_u32(reinterpret_cast<const unsigned char*>(src + 4 * i)));
    }
}

/// Writes to a file while hashing exactly the bytes written.
class HashingWriter {
public:
    explicit HashingWriter(fs::path path) : path_(std::move(path)), out_(path_, std::ios::binary | std::ios::trunc) {
        if (!out_) throw IoError("cannot write " + path_.string());
    }
    void write(const std::string& bytes) {
        out_.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out_) throw IoError("write failed: " + path_.string());
        hash_.update(bytes);
    }
    std::string finish() {
        out_.close();
        if (!out_) throw IoError("close failed: " + path_.string());
        return hash_.hex();
    }

private:
    fs::path path_;
    std::ofstream out_;
    Sha256 hash_;
};

inline std::string params_header(std::size_t arity) {
    std::string h = "index,seed";
    for (std::size_t i = 0; i < arity; ++i) h += ",p" + std::to_string(i);
    return h + "\n";
}

inline std::string params_row(std::size_t index, std::uint64_t seed, const ParamTuple& p) {
    std::string row = std::to_string(index) + "," + std::to_string(seed);
    for (int v : p) row += "," + std::to_string(v);
    return row + "\n";
}

}  // namespace detail

struct BuildOptions {
    TaskId task;
    Variant variant = Variant::Base;
    std::size_t total_count = 0;
    std::uint64_t base_seed = 0;
    fs::path out_dir;
    bool unique_params = false;
    unsigned threads = 0;  // 0: worker_count()
};

/// Generates all three splits and writes tensors, params and manifest.
/// Identical options give byte-identical files.
inline DatasetManifest build_dataset(const BuildOptions& opt) {
    detail::validate_task(opt.task);
    DatasetManifest m;
    m.task = opt.task;
    m.variant = opt.variant;
    m.total_count = opt.total_count;
    m.counts = split_counts(opt.total_count);
    m.label_dim = label_dim(opt.task);
    m.base_seed = opt.base_seed;
    m.unique_params = opt.unique_params;
    m.partition_scheme = partition_scheme(opt.task.kind);
    m.cardinality = subset_cardinality(opt.task);

    std::error_code ec;
    fs::create_directories(opt.out_dir, ec);
    if (ec) throw IoError("cannot create " + opt.out_dir.string() + ": " + ec.message());

    const unsigned threads = opt.threads ? opt.threads : worker_count();
    constexpr std::size_t kBlock = 256;
    const std::size_t pixels = static_cast<std::size_t>(m.height) * static_cast<std::size_t>(m.width);

    for (auto split : kAllSplits) {
        const std::size_t n = m.counts[split];
        std::vector<ParamTuple> fixed;
        if (opt.unique_params) fixed = unique_split_params(opt.task, opt.variant, opt.base_seed, split, n);

        auto& files = m.split_files(split);
        files.count = n;
        files.tensors = std::string(split_name(split)) + ".pbt";
        files.params = std::string(split_name(split)) + ".params.csv";
        detail::HashingWriter tensors(opt.out_dir / files.tensors);
        detail::HashingWriter params(opt.out_dir / files.params);

        std::string header(kTensorMagic, 4);
        detail::append_u32(header, static_cast<std::uint32_t>(n));
        detail::append_u32(header, static_cast<std::uint32_t>(m.height));
        detail::append_u32(header, static_cast<std::uint32_t>(m.width));
        detail::append_u32(header, static_cast<std::uint32_t>(m.label_dim));
        tensors.write(header);
        params.write(detail::params_header(param_arity(opt.task.kind)));

        std::vector<GeneratedExample> block;
        std::string tbuf, pbuf;
        for (std::size_t start = 0; start < n; start += kBlock) {
            const std::size_t len = std::min(kBlock, n - start);
            block.assign(len, {});
            parallel_for(len, threads, [&](std::size_t i) {
                const std::size_t index = start + i;
                const std::uint64_t seed = example_seed(opt.base_seed, split, index);
                ParamTuple p = opt.unique_params ? fixed[index] : example_params(opt.task, opt.variant, seed, split);
                block[i] = render_example(opt.task, opt.variant, seed, std::move(p));
            });
            tbuf.clear();
            pbuf.clear();
            tbuf.reserve(len * 4 * (pixels + m.label_dim));
            for (std::size_t i = 0; i < len; ++i) {
                const auto& ex = block[i];
                detail::append_floats(tbuf, ex.image.values.data(), ex.image.values.size());
                std::vector<float> lab(ex.labels.begin(), ex.labels.end());
                detail::append_floats(tbuf, lab.data(), lab.size());
                pbuf += detail::params_row(start + i, ex.seed, ex.params);
            }
            tensors.write(tbuf);
            params.write(pbuf);
        }
        files.tensors_sha256 = tensors.finish();
        files.params_sha256 = params.finish();
    }
    write_text_file(opt.out_dir / kManifestFile, manifest_text(m));
    return m;
}

// ---------------------------------------------------------------------------
// Reading

struct ExampleRecord {
    Split split = Split::Train;
    std::size_t index = 0;
    FloatImage image;
    std::vector<float> labels;

    std::string id() const { return example_id(split, index); }
};

/// Streams one split's records in index order. Opening checks the record
/// count against the manifest (LengthMismatchError), then trailing bytes and
/// the file checksum (IntegrityError), so a corrupt file never yields records.
class SplitReader {
public:
    SplitReader(const Dataset& ds, Split split, bool verify_checksum = true)
        : split_(split),
          label_dim_(ds.manifest.label_dim),
          height_(ds.manifest.height),
          width_(ds.manifest.width),
          path_(ds.path_of(ds.manifest.split_files(split).tensors)) {
        const auto& files = ds.manifest.split_files(split);
        count_ = files.count;
        in_.open(path_, std::ios::binary);
        if (!in_) throw IoError("cannot open " + path_.string());

        std::array<unsigned char, kTensorHeaderBytes> hdr{};
        in_.read(reinterpret_cast<char*>(hdr.data()), hdr.size());
        if (in_.gcount() != static_cast<std::streamsize>(hdr.size()))
            throw LengthMismatchError(path_.string(), count_, 0);
        if (std::memcmp(hdr.data(), kTensorMagic, 4) != 0) throw FormatError(path_.string() + ": bad magic (not PBT1)");
        const auto h_count = detail::read_u32(hdr.data() + 4);
        const auto h_height = detail::read_u32(hdr.data() + 8);
        const auto h_width = detail::read_u32(hdr.data() + 12);
        const auto h_dim = detail::read_u32(hdr.data() + 16);
        if (h_height != static_cast<std::uint32_t>(height_) || h_width != static_cast<std::uint32_t>(width_) ||
            h_dim != label_dim_)
            throw FormatError(path_.string() + ": header shape disagrees with manifest");

        const auto size = static_cast<std::size_t>(fs::file_size(path_));
        const std::size_t fit = (size - kTensorHeaderBytes) / record_bytes();
        const bool exact = (size - kTensorHeaderBytes) % record_bytes() == 0;
        if (h_count != count_) throw LengthMismatchError(path_.string(), count_, h_count);
        if (fit != count_) throw LengthMismatchError(path_.string(), count_, fit);
        if (!exact)
            throw IntegrityError(path_.string() + ": " + std::to_string((size - kTensorHeaderBytes) % record_bytes()) +
                                 " trailing bytes after the last record");

        if (verify_checksum) {
            const auto actual = sha256_file(path_);
            if (actual != files.tensors_sha256)
                throw IntegrityError(path_.string() + ": checksum mismatch (manifest " + files.tensors_sha256 +
                                     ", file " + actual + ")");
        }
        buf_.resize(record_bytes());
    }

    std::size_t count() const noexcept { return count_; }
    std::size_t record_bytes() const noexcept {
        return 4 * (static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_) + label_dim_);
    }

    bool next(ExampleRecord& rec) {
        if (next_ >= count_) return false;
        in_.read(buf_.data(), static_cast<std::streamsize>(buf_.size()));
        if (in_.gcount() != static_cast<std::streamsize>(buf_.size()))
            throw LengthMismatchError(path_.string(), count_, next_);
        const std::size_t pixels = static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
        rec.split = split_;
        rec.index = next_++;
        rec.image.width = width_;
        rec.image.height = height_;
        rec.image.values.resize(pixels);
        rec.labels.resize(label_dim_);
        detail::read_floats(buf_.data(), rec.image.values.data(), pixels);
        detail::read_floats(buf_.data() + 4 * pixels, rec.labels.data(), label_dim_);
        return true;
    }

private:
    Split split_;
    std::size_t label_dim_;
    int height_, width_;
    fs::path path_;
    std::ifstream in_;
    std::size_t count_ = 0;
    std::size_t next_ = 0;
    std::vector<char> buf_;
};

inline std::vector<ExampleRecord> read_dataset(const Dataset& ds, Split split) {
    SplitReader reader(ds, split);
    std::vector<ExampleRecord> out(reader.count());
    for (auto& rec : out) reader.next(rec);
    return out;
}

/// A whole split as dense row-major arrays: images (n x height*width) and
/// labels (n x label_dim).
struct SplitArrays {
    Split split = Split::Train;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t label_dim = 0;
    std::vector<float> images;
    std::vector<float> labels;

    std::string id(std::size_t i) const { return example_id(split, i); }
};

inline SplitArrays load_split_arrays(const Dataset& ds, Split split) {
    SplitReader reader(ds, split);
    SplitArrays a;
    a.split = split;
    a.rows = reader.count();
    a.cols = static_cast<std::size_t>(ds.manifest.height) * static_cast<std::size_t>(ds.manifest.width);
    a.label_dim = ds.manifest.label_dim;
    a.images.resize(a.rows * a.cols);
    a.labels.resize(a.rows * a.label_dim);
    ExampleRecord rec;
    for (std::size_t i = 0; reader.next(rec); ++i) {
        std::copy(rec.image.values.begin(), rec.image.values.end(), a.images.begin() + static_cast<std::ptrdiff_t>(i * a.cols));
        std::copy(rec.labels.begin(), rec.labels.end(), a.labels.begin() + static_cast<std::ptrdiff_t>(i * a.label_dim));
    }
    return a;
}

struct ParamRow {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    ParamTuple params;
};

inline std::vector<ParamRow> read_params(const Dataset& ds, Split split) {
    const auto& files = ds.manifest.split_files(split);
    const fs::path path = ds.path_of(files.params);
    const std::string text = read_text_file(path);
    if (const auto actual = sha256_hex(text); actual != files.params_sha256)
        throw IntegrityError(path.string() + ": checksum mismatch (manifest " + files.params_sha256 + ", file " +
                             actual + ")");
    std::vector<ParamRow> rows;
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);  // header
    const std::size_t arity = param_arity(ds.manifest.task.kind);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string_view> fields;
        std::string_view rest(line);
        for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos; rest.remove_prefix(pos + 1))
            fields.push_back(rest.substr(0, pos));
        fields.push_back(rest);
        if (fields.size() != 2 + arity) throw FormatError(path.string() + ": bad row '" + line + "'");
        auto parse = [&](std::string_view f, auto& out) {
            auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), out);
            if (ec != std::errc{} || ptr != f.data() + f.size())
                throw FormatError(path.string() + ": bad field '" + std::string(f) + "'");
        };
        ParamRow row;
        parse(fields[0], row.index);
        parse(fields[1], row.seed);
        row.params.resize(arity);
        for (std::size_t i = 0; i < arity; ++i) parse(fields[2 + i], row.params[i]);
        rows.push_back(std::move(row));
    }
    if (rows.size() != files.count) throw LengthMismatchError(path.string(), files.count, rows.size());
    return rows;
}

// ---------------------------------------------------------------------------
// Verification

struct SplitVerification {
    Split split = Split::Train;
    std::size_t examples = 0;
    std::size_t violations = 0;        // recorded tuple outside this split's subset
    std::size_t seed_mismatches = 0;   // recorded seed differs from the derivation
    std::size_t param_mismatches = 0;  // recorded tuple differs from regeneration
    std::size_t label_mismatches = 0;  // stored labels differ from the recorded tuple's labels
    std::size_t value_out_of_bounds = 0;
};

struct VerifyReport {
    std::vector<SplitVerification> splits;
    std::vector<std::string> findings;  // first few offending examples

    std::size_t total(std::size_t SplitVerification::*field) const {
        std::size_t n = 0;
        for (const auto& s : splits) n += s.*field;
        return n;
    }
    std::size_t violations() const { return total(&SplitVerification::violations); }
    std::size_t examples() const { return total(&SplitVerification::examples); }
    bool ok() const {
        return violations() == 0 && total(&SplitVerification::seed_mismatches) == 0 &&
               total(&SplitVerification::param_mismatches) == 0 && total(&SplitVerification::label_mismatches) == 0 &&
               total(&SplitVerification::value_out_of_bounds) == 0;
    }
};

struct VerifyOptions {
    bool check_tensors = true;
    std::size_t max_findings = 20;
};

/// Recomputes every example's seed and parameters, checks each recorded
/// tuple lies in its split's subset, and (optionally) re-derives stored
/// labels and checks image value bounds. Checksum mismatches throw
/// IntegrityError before anything is counted.
inline VerifyReport verify_split_disjointness(const Dataset& ds, const VerifyOptions& opt = {}) {
    const auto& m = ds.manifest;
    VerifyReport report;
    auto note = [&](std::string s) {
        if (report.findings.size() < opt.max_findings) report.findings.push_back(std::move(s));
    };
    for (auto split : kAllSplits) {
        SplitVerification sv;
        sv.split = split;
        const auto rows = read_params(ds, split);
        std::optional<SplitReader> reader;
        if (opt.check_tensors) reader.emplace(ds, split);

        std::vector<ParamTuple> fixed;
        if (m.unique_params) fixed = unique_split_params(m.task, m.variant, m.base_seed, split, rows.size());

        ExampleRecord rec;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& row = rows[i];
            const std::string id = example_id(split, i);
            ++sv.examples;
            const std::uint64_t seed = example_seed(m.base_seed, split, i);
            if (row.index != i || row.seed != seed) {
                ++sv.seed_mismatches;
                note(id + ": seed/index does not match the derivation");
            }
            const ParamTuple expected = m.unique_params ? fixed[i] : example_params(m.task, m.variant, seed, split);
            if (expected != row.params) {
                ++sv.param_mismatches;
                note(id + ": recorded " + tuple_str(row.params) + " but regeneration gives " + tuple_str(expected));
            }
            bool valid = true;
            try {
                validate_params(m.task, row.params);
            } catch (const RangeError&) {
                valid = false;
            }
            const Split actual = split_of(m.task, row.params);
            if (!valid || actual != split) {
                ++sv.violations;
                note(id + ": tuple " + tuple_str(row.params) + " belongs to the " +
                     std::string(valid ? split_name(actual) : "no") + " subset");
            }
            if (reader) {
                reader->next(rec);
                if (valid) {
                    const auto labels = labels_for(m.task, row.params);
                    for (std::size_t d = 0; d < labels.size(); ++d)
                        if (rec.labels[d] != static_cast<float>(labels[d])) {
                            ++sv.label_mismatches;
                            note(id + ": stored label disagrees with recorded parameters");
                            break;
                        }
                }
                for (float v : rec.image.values)
                    if (!(v >= -0.5f && v <= 0.5f)) {
                        ++sv.value_out_of_bounds;
                        note(id + ": image value outside [-0.5, 0.5]");
                        break;
                    }
            }
        }
        report.splits.push_back(sv);
    }
    return report;
}

/// Fault injection used to exercise verification: rewrites train example
/// `index` in the params file with a tuple from the test subset and
/// refreshes the manifest checksum so the file still passes integrity
/// checks. Returns the injected tuple.
inline ParamTuple inject_partition_fault(const fs::path& dir, std::size_t index = 0) {
    Dataset ds = open_dataset(dir);
    auto& files = ds.manifest.split_files(Split::Train);
    if (index >= files.count) throw ConfigError("fault index " + std::to_string(index) + " out of range");
    std::optional<ParamTuple> target;
    for_each_tuple(ds.manifest.task, [&](const ParamTuple& p) {
        if (!target && split_of(ds.manifest.task, p) == Split::Test) target = p;
    });
    if (!target) throw CapacityError("test subset is empty");

    const fs::path ppath = ds.path_of(files.params);
    std::istringstream in(read_text_file(ppath));
    std::string out, line;
    std::getline(in, line);
    out += line + "\n";
    for (std::size_t i = 0; std::getline(in, line); ++i) {
        if (i == index) {
            const auto first = line.find(',');
            const auto second = line.find(',', first + 1);
            line = line.substr(0, second);
            for (int v : *target) line += "," + std::to_string(v);
        }
        out += line + "\n";
    }
    write_text_file(ppath, out);
    files.params_sha256 = sha256_hex(out);
    write_text_file(dir / kManifestFile, manifest_text(ds.manifest));
    return *target;
}

}  // namespace percept
