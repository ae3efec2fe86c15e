#pragma once

// Task catalogue: identities, parameterization variants, label-bearing
// parameter spaces, their train/val/test partition, and ground-truth labels.
//
// Every label-bearing parameter is an integer. Partition of a parameter
// tuple into splits is by "bucket" in [0, 5): buckets 0..2 train, 3 val,
// 4 test, which gives the 0.6:0.2:0.2 proportions in expectation and keeps
// the three subsets disjoint by construction. Single-parameter tasks bucket
// by residue mod 5; tuple-valued tasks bucket by a splitmix64 hash.

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "percept/errors.hpp"
#include "percept/rng.hpp"

namespace percept {

using ParamTuple = std::vector<int>;

enum class TaskKind {
    PositionCommon,
    PositionNonAligned,
    Length,
    Direction,
    Angle,
    Area,
    Volume,
    Curvature,
    Shading,
    PositionAngle,
    PositionLength,
    BarsFramed,
    PointCloud,
};

inline constexpr std::array<TaskKind, 13> kAllTaskKinds = {
    TaskKind::PositionCommon, TaskKind::PositionNonAligned, TaskKind::Length,     TaskKind::Direction,
    TaskKind::Angle,          TaskKind::Area,               TaskKind::Volume,     TaskKind::Curvature,
    TaskKind::Shading,        TaskKind::PositionAngle,      TaskKind::PositionLength,
    TaskKind::BarsFramed,     TaskKind::PointCloud,
};

inline constexpr bool is_elementary(TaskKind k) noexcept { return static_cast<int>(k) <= static_cast<int>(TaskKind::Shading); }

namespace pa {
inline constexpr int kBar = 0;
inline constexpr int kPie = 1;
inline constexpr int kPieNoOutline = 2;
}  // namespace pa
namespace bf {
inline constexpr int kBar = 0;
inline constexpr int kFramed = 1;
}  // namespace bf

/// A concrete task: kind plus subtype (position-angle chart style,
/// position-length type 1..5, bar vs framed, point-cloud base count).
struct TaskId {
    TaskKind kind = TaskKind::Length;
    int subtype = 0;

    friend bool operator==(const TaskId&, const TaskId&) = default;
    friend auto operator<=>(const TaskId&, const TaskId&) = default;
};

enum class Variant { Base, Pos, Size, PosSize };

inline constexpr std::array<Variant, 4> kAllVariants = {Variant::Base, Variant::Pos, Variant::Size, Variant::PosSize};

inline constexpr bool randomizes_position(Variant v) noexcept { return v == Variant::Pos || v == Variant::PosSize; }
inline constexpr bool randomizes_size(Variant v) noexcept { return v == Variant::Size || v == Variant::PosSize; }

enum class Split { Train = 0, Val = 1, Test = 2 };

inline constexpr std::array<Split, 3> kAllSplits = {Split::Train, Split::Val, Split::Test};

// ---------------------------------------------------------------------------
// Names

inline std::string_view kind_name(TaskKind k) {
    switch (k) {
        case TaskKind::PositionCommon: return "position-common";
        case TaskKind::PositionNonAligned: return "position-nonaligned";
        case TaskKind::Length: return "length";
        case TaskKind::Direction: return "direction";
        case TaskKind::Angle: return "angle";
        case TaskKind::Area: return "area";
        case TaskKind::Volume: return "volume";
        case TaskKind::Curvature: return "curvature";
        case TaskKind::Shading: return "shading";
        case TaskKind::PositionAngle: return "position-angle";
        case TaskKind::PositionLength: return "position-length";
        case TaskKind::BarsFramed: return "bars-framed";
        case TaskKind::PointCloud: return "point-cloud";
    }
    return "?";
}

/// Subtypes valid for a kind, default first.
inline std::vector<int> subtypes(TaskKind k) {
    switch (k) {
        case TaskKind::PositionAngle: return {pa::kBar, pa::kPie, pa::kPieNoOutline};
        case TaskKind::PositionLength: return {1, 2, 3, 4, 5};
        case TaskKind::BarsFramed: return {bf::kBar, bf::kFramed};
        case TaskKind::PointCloud: return {10, 100, 1000};
        default: return {0};
    }
}

inline TaskId default_task(TaskKind k) { return {k, subtypes(k).front()}; }

/// Every concrete task id (9 elementary + 13 composite/point-cloud subtypes).
inline std::vector<TaskId> all_task_ids() {
    std::vector<TaskId> out;
    for (auto k : kAllTaskKinds)
        for (int s : subtypes(k)) out.push_back({k, s});
    return out;
}

inline std::string task_name(TaskId t) {
    std::string base(kind_name(t.kind));
    switch (t.kind) {
        case TaskKind::PositionAngle:
            return base + (t.subtype == pa::kBar ? "-bar" : t.subtype == pa::kPie ? "-pie" : "-pie-no-outline");
        case TaskKind::PositionLength: return base + "-" + std::to_string(t.subtype);
        case TaskKind::BarsFramed: return base + (t.subtype == bf::kBar ? "-bar" : "-framed");
        case TaskKind::PointCloud: return base + "-" + std::to_string(t.subtype);
        default: return base;
    }
}

/// Parses a task name. A bare composite kind ("position-angle") selects
/// its default subtype.
inline TaskId parse_task(std::string_view name) {
    for (auto t : all_task_ids())
        if (task_name(t) == name) return t;
    for (auto k : kAllTaskKinds)
        if (kind_name(k) == name) return default_task(k);
    std::string known;
    for (auto t : all_task_ids()) known += (known.empty() ? "" : ", ") + task_name(t);
    throw ConfigError("unknown task '" + std::string(name) + "' (known: " + known + ")");
}

inline std::string_view variant_name(Variant v) {
    switch (v) {
        case Variant::Base: return "base";
        case Variant::Pos: return "+pos";
        case Variant::Size: return "+size";
        case Variant::PosSize: return "+pos+size";
    }
    return "?";
}

inline Variant parse_variant(std::string_view name) {
    for (auto v : kAllVariants)
        if (variant_name(v) == name) return v;
    // Shell-friendly aliases.
    if (name == "pos") return Variant::Pos;
    if (name == "size") return Variant::Size;
    if (name == "pos+size" || name == "pos-size") return Variant::PosSize;
    throw ConfigError("unknown variant '" + std::string(name) + "'");
}

inline std::string_view split_name(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
    }
    return "?";
}

inline Split parse_split(std::string_view name) {
    for (auto s : kAllSplits)
        if (split_name(s) == name) return s;
    throw ConfigError("unknown split '" + std::string(name) + "'");
}

inline std::size_t label_dim(TaskId t) noexcept { return t.kind == TaskKind::PositionAngle ? 4 : 1; }

// ---------------------------------------------------------------------------
// Parameter spaces

struct IntRange {
    int lo = 0;
    int hi = 0;
    bool contains(int v) const noexcept { return v >= lo && v <= hi; }
    std::string str() const { return "[" + std::to_string(lo) + ", " + std::to_string(hi) + "]"; }
};

/// Range of every component of the label-bearing tuple.
inline IntRange param_range(TaskKind k) noexcept {
    switch (k) {
        case TaskKind::PositionCommon:
        case TaskKind::PositionNonAligned:
        case TaskKind::Length: return {1, 92};
        case TaskKind::Direction: return {0, 359};
        case TaskKind::Angle: return {1, 90};
        case TaskKind::Area: return {2, 40};
        case TaskKind::Volume: return {2, 28};
        case TaskKind::Curvature: return {0, 45};
        case TaskKind::Shading: return {1, 100};
        case TaskKind::PositionAngle: return {1, 96};
        case TaskKind::PositionLength: return {5, 44};
        case TaskKind::BarsFramed: return {5, 85};
        case TaskKind::PointCloud: return {0, 10};
    }
    return {0, 0};
}

inline std::size_t param_arity(TaskKind k) noexcept {
    switch (k) {
        case TaskKind::PositionAngle: return 5;
        case TaskKind::PositionLength:
        case TaskKind::BarsFramed: return 2;
        default: return 1;
    }
}

inline constexpr int kPositionAngleTotal = 100;

inline std::string tuple_str(const ParamTuple& p) {
    std::string s = "(";
    for (std::size_t i = 0; i < p.size(); ++i) s += (i ? ", " : "") + std::to_string(p[i]);
    return s + ")";
}

/// Throws RangeError naming the range when `p` is not a valid label-bearing
/// tuple for `t`.
inline void validate_params(TaskId t, const ParamTuple& p) {
    const auto r = param_range(t.kind);
    const auto name = task_name(t);
    if (p.size() != param_arity(t.kind))
        throw RangeError(name + ": expected " + std::to_string(param_arity(t.kind)) + " parameters, got " +
                         std::to_string(p.size()));
    for (int v : p)
        if (!r.contains(v))
            throw RangeError(name + ": parameter " + std::to_string(v) + " outside declared range " + r.str());
    switch (t.kind) {
        case TaskKind::PositionAngle: {
            if (std::accumulate(p.begin(), p.end(), 0) != kPositionAngleTotal)
                throw RangeError(name + ": values " + tuple_str(p) + " must sum to 100");
            const int mx = *std::max_element(p.begin(), p.end());
            if (std::count(p.begin(), p.end(), mx) != 1)
                throw RangeError(name + ": values " + tuple_str(p) + " have no unique maximum");
            break;
        }
        case TaskKind::PositionLength:
        case TaskKind::BarsFramed:
            if (p[0] == p[1]) throw RangeError(name + ": marked values " + tuple_str(p) + " are tied (ratio 1)");
            break;
        default: break;
    }
}

// ---------------------------------------------------------------------------
// Partition

inline int bucket_of(const ParamTuple& p) noexcept {
    if (p.size() == 1) return ((p[0] % 5) + 5) % 5;
    std::uint64_t h = 0x243F6A8885A308D3ULL;
    for (int v : p) h = mix64(h ^ (static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)) + kGoldenGamma));
    return static_cast<int>(h % 5);
}

inline constexpr Split split_of_bucket(int bucket) noexcept {
    return bucket <= 2 ? Split::Train : bucket == 3 ? Split::Val : Split::Test;
}

/// The split whose parameter subset contains `p`.
inline Split split_of(TaskId t, const ParamTuple& p) noexcept { return split_of_bucket(bucket_of(p)); }

inline std::string partition_scheme(TaskKind k) {
    return param_arity(k) == 1 ? "residue-mod-5" : "splitmix64-tuple-hash-mod-5";
}

/// Visits every valid tuple of the task's parameter space.
inline void for_each_tuple(TaskId t, const std::function<void(const ParamTuple&)>& fn) {
    const auto r = param_range(t.kind);
    switch (t.kind) {
        case TaskKind::PositionAngle: {
            ParamTuple p(5);
            for (p[0] = 1; p[0] <= 96; ++p[0])
                for (p[1] = 1; p[0] + p[1] <= 97; ++p[1])
                    for (p[2] = 1; p[0] + p[1] + p[2] <= 98; ++p[2])
                        for (p[3] = 1; p[0] + p[1] + p[2] + p[3] <= 99; ++p[3]) {
                            p[4] = 100 - p[0] - p[1] - p[2] - p[3];
                            const int mx = std::max({p[0], p[1], p[2], p[3], p[4]});
                            if (std::count(p.begin(), p.end(), mx) == 1) fn(p);
                        }
            break;
        }
        case TaskKind::PositionLength:
        case TaskKind::BarsFramed: {
            ParamTuple p(2);
            for (p[0] = r.lo; p[0] <= r.hi; ++p[0])
                for (p[1] = r.lo; p[1] <= r.hi; ++p[1])
                    if (p[0] != p[1]) fn(p);
            break;
        }
        default:
            for (int v = r.lo; v <= r.hi; ++v) fn(ParamTuple{v});
    }
}

/// Number of distinct tuples in each split's subset (train, val, test).
inline std::array<std::size_t, 3> subset_cardinality(TaskId t) {
    // Subsets depend only on the kind; position-angle enumeration is the
    // expensive one (about 3.5M tuples), so memoize per kind.
    static std::map<TaskKind, std::array<std::size_t, 3>> cache;
    static std::mutex mu;
    {
        std::lock_guard lock(mu);
        if (auto it = cache.find(t.kind); it != cache.end()) return it->second;
    }
    std::array<std::size_t, 3> n{};
    for_each_tuple(t, [&](const ParamTuple& p) { ++n[static_cast<int>(split_of(t, p))]; });
    std::lock_guard lock(mu);
    cache[t.kind] = n;
    return n;
}

namespace detail {

inline ParamTuple draw_any(TaskId t, Rng& rng) {
    const auto r = param_range(t.kind);
    switch (t.kind) {
        case TaskKind::PositionAngle: {
            // Four distinct cut points in 1..99 split 100 into five positive parts
            // uniformly over all compositions.
            std::array<int, 4> cuts{};
            for (std::size_t i = 0; i < cuts.size();) {
                const int c = static_cast<int>(rng.uniform_int(1, 99));
                if (std::find(cuts.begin(), cuts.begin() + static_cast<std::ptrdiff_t>(i), c) ==
                    cuts.begin() + static_cast<std::ptrdiff_t>(i))
                    cuts[i++] = c;
            }
            std::sort(cuts.begin(), cuts.end());
            return {cuts[0], cuts[1] - cuts[0], cuts[2] - cuts[1], cuts[3] - cuts[2], 100 - cuts[3]};
        }
        case TaskKind::PositionLength:
        case TaskKind::BarsFramed:
            return {static_cast<int>(rng.uniform_int(r.lo, r.hi)), static_cast<int>(rng.uniform_int(r.lo, r.hi))};
        default: return {static_cast<int>(rng.uniform_int(r.lo, r.hi))};
    }
}

inline bool admissible(TaskId t, const ParamTuple& p) {
    switch (t.kind) {
        case TaskKind::PositionAngle: {
            const int mx = *std::max_element(p.begin(), p.end());
            return std::count(p.begin(), p.end(), mx) == 1;
        }
        case TaskKind::PositionLength:
        case TaskKind::BarsFramed: return p[0] != p[1];
        default: return true;
    }
}

}  // namespace detail

/// Draws a tuple uniformly from `split`'s parameter subset. Tuples with
/// tied maxima or a ratio of exactly 1 are resampled. The variant does not
/// affect the label-bearing space; it only changes rendering.
inline ParamTuple sample_parameters(TaskId t, Variant /*variant*/, Split split, Rng& rng) {
    const auto r = param_range(t.kind);
    if (param_arity(t.kind) == 1) {
        std::vector<int> values;
        for (int v = r.lo; v <= r.hi; ++v)
            if (split_of(t, {v}) == split) values.push_back(v);
        if (values.empty())
            throw CapacityError(task_name(t) + ": " + std::string(split_name(split)) +
                                " parameter subset is empty (cardinality 0)");
        return {values[rng.index(values.size())]};
    }
    for (int attempt = 0; attempt < 1'000'000; ++attempt) {
        ParamTuple p = detail::draw_any(t, rng);
        if (detail::admissible(t, p) && split_of(t, p) == split) return p;
    }
    throw CapacityError(task_name(t) + ": no admissible tuple found for split " + std::string(split_name(split)));
}

/// Draws `count` pairwise-distinct tuples from `split`'s subset. Throws
/// CapacityError reporting the subset cardinality when count exceeds it.
inline std::vector<ParamTuple> sample_unique_parameters(TaskId t, Variant variant, Split split, std::size_t count,
                                                        Rng& rng) {
    const std::size_t cardinality = subset_cardinality(t)[static_cast<std::size_t>(split)];
    if (count > cardinality)
        throw CapacityError(task_name(t) + ": requested " + std::to_string(count) + " unique " +
                            std::string(split_name(split)) + " tuples but the subset has cardinality " +
                            std::to_string(cardinality));
    std::vector<ParamTuple> out;
    out.reserve(count);
    if (param_arity(t.kind) == 1) {
        std::vector<ParamTuple> pool;
        for_each_tuple(t, [&](const ParamTuple& p) {
            if (split_of(t, p) == split) pool.push_back(p);
        });
        for (std::size_t i = 0; i < count; ++i) {
            std::swap(pool[i], pool[i + rng.index(pool.size() - i)]);
            out.push_back(pool[i]);
        }
        return out;
    }
    std::set<ParamTuple> seen;
    while (out.size() < count) {
        ParamTuple p = sample_parameters(t, variant, split, rng);
        if (seen.insert(p).second) out.push_back(std::move(p));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Labels

/// Normalized ground-truth labels for a validated tuple. Single-parameter
/// encodings divide by the range maximum (so L=46 of [1,92] is 0.5); area
/// and volume normalize the encoded quantity (s^2, s^3) by its min/max.
/// Position-angle yields the four non-maximum values over the maximum in
/// canonical order: left to right for bars, clockwise starting after the
/// marked sector for pies.
inline std::vector<double> labels_for(TaskId t, const ParamTuple& p) {
    switch (t.kind) {
        case TaskKind::PositionCommon:
        case TaskKind::PositionNonAligned:
        case TaskKind::Length: return {p[0] / 92.0};
        case TaskKind::Direction: return {p[0] / 359.0};
        case TaskKind::Angle: return {p[0] / 90.0};
        case TaskKind::Area: return {(p[0] * p[0] - 4) / (1600.0 - 4.0)};
        case TaskKind::Volume: return {(p[0] * p[0] * p[0] - 8) / (28.0 * 28.0 * 28.0 - 8.0)};
        case TaskKind::Curvature: return {p[0] / 45.0};
        case TaskKind::Shading: return {p[0] / 100.0};
        case TaskKind::PointCloud: return {p[0] / 10.0};
        case TaskKind::PositionLength:
        case TaskKind::BarsFramed: {
            const double lo = std::min(p[0], p[1]);
            const double hi = std::max(p[0], p[1]);
            return {lo / hi};
        }
        case TaskKind::PositionAngle: {
            const auto imax = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
            const double mx = p[imax];
            std::vector<double> out;
            out.reserve(4);
            if (t.subtype == pa::kBar) {
                for (std::size_t i = 0; i < p.size(); ++i)
                    if (i != imax) out.push_back(p[i] / mx);
            } else {
                for (std::size_t k = 1; k < p.size(); ++k) out.push_back(p[(imax + k) % p.size()] / mx);
            }
            return out;
        }
    }
    return {};
}

}  // namespace percept
