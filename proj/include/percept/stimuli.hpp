#pragma once

// Stimulus generators. Each task builds its figure as a pixel list in a
// canonical frame (which is also the `base` placement), then the variant
// decides on stroke widths / non-label extents (+size) and a random
// translation that keeps the figure on the canvas (+pos).
//
// Label-bearing geometry is integer-exact so tests can measure it back out
// of the canvas: a length-L segment covers exactly L rows, a bar of value h
// spans exactly h rows, a point cloud has exactly base+delta set cells.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <vector>

#include "percept/canvas.hpp"
#include "percept/errors.hpp"
#include "percept/rng.hpp"
#include "percept/tasks.hpp"

namespace percept {

struct StimulusSpec {
    TaskId task;
    ParamTuple params;
    Variant variant = Variant::Base;
    std::uint64_t seed = 0;
};

struct Stimulus {
    Canvas canvas;
    std::vector<double> labels;
    StimulusSpec spec;
    /// Canvas-space boxes of the label-bearing marks, in parameter order
    /// (bars, segments, the dot); used for geometric verification.
    std::vector<Box> marks;
};

namespace detail {

struct Figure {
    PointList pixels;
    std::vector<Box> marks;
    std::optional<Box> extent;  // placement box when it differs from the pixel bounds

    Box placement_box() const { return extent ? *extent : pixels.bounds(); }
};

inline int pick(Rng& rng, bool randomize, int fixed, int lo, int hi) {
    return randomize ? static_cast<int>(rng.uniform_int(lo, hi)) : fixed;
}

inline void axis_with_ticks(Figure& f, int x, int top, int bottom, int width) {
    raster::line(f.pixels, Point{x, top}, Point{x, bottom}, width);
    raster::line(f.pixels, Point{x - 4, top}, Point{x - 1, top});
    raster::line(f.pixels, Point{x - 4, bottom}, Point{x - 1, bottom});
}

inline Figure position_common(int h, Variant v, Rng& rng) {
    Figure f;
    const int w = pick(rng, randomizes_size(v), 1, 1, 3);
    const int ds = pick(rng, randomizes_size(v), 1, 1, 3);
    axis_with_ticks(f, 30, 5, 96, w);
    const Point p{50, 97 - h};
    raster::dot(f.pixels, p, ds);
    f.marks.push_back({p.x, p.y - ds + 1, p.x + ds - 1, p.y});
    return f;
}

// The dot is read against a second scale whose baseline sits 4 rows above
// the reference scale.
inline Figure position_nonaligned(int h, Variant v, Rng& rng) {
    Figure f;
    const int w = pick(rng, randomizes_size(v), 1, 1, 3);
    const int ds = pick(rng, randomizes_size(v), 1, 1, 3);
    constexpr int kOffset = 4;
    axis_with_ticks(f, 25, 5, 96, w);
    axis_with_ticks(f, 60, 5 - kOffset, 96 - kOffset, w);
    const Point p{72, 97 - kOffset - h};
    raster::dot(f.pixels, p, ds);
    f.marks.push_back({p.x, p.y - ds + 1, p.x + ds - 1, p.y});
    return f;
}

inline Figure length(int len, Variant v, Rng& rng) {
    Figure f;
    const int w = pick(rng, randomizes_size(v), 1, 1, 3);
    // A filled box rather than a wide line: a one-cell line has no major
    // axis, so its width would be spent vertically.
    const Box seg{50, 97 - len, 50 + w - 1, 96};
    raster::fill_rect(f.pixels, seg);
    f.marks.push_back(seg);
    return f;
}

inline Figure direction(int theta, Variant v, Rng& rng) {
    Figure f;
    const int len = pick(rng, randomizes_size(v), 30, 20, 40);
    const int w = pick(rng, randomizes_size(v), 1, 1, 2);
    const PointF anchor{50, 50};
    const PointF tip = raster::polar(anchor, len, theta);
    raster::line(f.pixels, anchor, tip, w);
    raster::centered_dot(f.pixels, Point{50, 50}, 3);
    Box b;
    b.include({50, 50});
    b.include({raster::round_coord(tip.x), raster::round_coord(tip.y)});
    f.marks.push_back(b);
    return f;
}

inline Figure angle(int alpha, Variant v, Rng& rng) {
    Figure f;
    const int len = pick(rng, randomizes_size(v), 25, 15, 35);
    const PointF vertex{30, 70};
    raster::line(f.pixels, vertex, raster::polar(vertex, len, 0.0));
    raster::line(f.pixels, vertex, raster::polar(vertex, len, alpha));
    f.marks.push_back(f.pixels.bounds());
    return f;
}

// +size swaps the solid fill for an outline of random stroke width.
inline Figure area(int side, Variant v, Rng& rng) {
    Figure f;
    const int stroke = pick(rng, randomizes_size(v), 0, 1, 3);
    const int x0 = 50 - side / 2;
    const int y0 = 50 - side / 2;
    const Box sq{x0, y0, x0 + side - 1, y0 + side - 1};
    if (stroke == 0) raster::fill_rect(f.pixels, sq);
    else raster::rect_outline(f.pixels, sq, stroke);
    f.marks.push_back(sq);
    return f;
}

// Oblique wireframe cube: front face, back face shifted up-right by half a
// side, and the four connecting edges.
inline Figure volume(int side, Variant v, Rng& rng) {
    Figure f;
    const int w = pick(rng, randomizes_size(v), 1, 1, 2);
    const int depth = (side + 1) / 2;
    const Box front{35, 70 - side + 1, 35 + side - 1, 70};
    const Box back = front.translated(depth, -depth);
    raster::rect_outline(f.pixels, front, w);
    raster::rect_outline(f.pixels, back, w);
    raster::line(f.pixels, Point{front.x0, front.y0}, Point{back.x0, back.y0}, w);
    raster::line(f.pixels, Point{front.x1, front.y0}, Point{back.x1, back.y0}, w);
    raster::line(f.pixels, Point{front.x0, front.y1}, Point{back.x0, back.y1}, w);
    raster::line(f.pixels, Point{front.x1, front.y1}, Point{back.x1, back.y1}, w);
    f.marks.push_back(f.pixels.bounds());
    return f;
}

// Apex of the curve sits `d` rows above the chord (control point at 2d).
inline Figure curvature(int d, Variant v, Rng& rng) {
    Figure f;
    const int half_chord = pick(rng, randomizes_size(v), 30, 20, 35);
    const int w = pick(rng, randomizes_size(v), 1, 1, 2);
    const PointF p0{50.0 - half_chord, 70};
    const PointF p2{50.0 + half_chord, 70};
    const PointF ctrl{50, 70.0 - 2.0 * d};
    raster::quadratic(f.pixels, p0, ctrl, p2, w);
    f.marks.push_back(f.pixels.bounds());
    return f;
}

/// Number of marked cells inside a shading region of the given side.
inline int shading_cells(int density, int side) { return (density * side * side + 50) / 100; }

// Horizontal stripes: the required cell count is laid out as full rows
// spread evenly over the region, with the remainder in the last stripe
// (left-aligned). A frame two cells outside the region bounds it.
inline Figure shading(int density, Variant v, Rng& rng) {
    Figure f;
    const int side = pick(rng, randomizes_size(v), 60, 40, 60);
    const int x0 = 50 - side / 2;
    const int y0 = 50 - side / 2;
    const int cells = shading_cells(density, side);
    const int rows = (cells + side - 1) / side;
    for (int k = 0; k < rows; ++k) {
        const int row = y0 + k * side / rows;
        const int run = k + 1 < rows ? side : cells - (rows - 1) * side;
        for (int x = 0; x < run; ++x) f.pixels(x0 + x, row);
    }
    raster::rect_outline(f.pixels, Box{x0 - 2, y0 - 2, x0 + side + 1, y0 + side + 1});
    f.marks.push_back({x0, y0, x0 + side - 1, y0 + side - 1});
    return f;
}

inline Figure position_angle_bars(const ParamTuple& values, Variant v, Rng& rng) {
    Figure f;
    const int bw = pick(rng, randomizes_size(v), 12, 8, 14);
    const int gap = (90 - 5 * bw) / 4;
    const int left = (100 - (5 * bw + 4 * gap)) / 2;
    const auto imax = static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const int x = left + static_cast<int>(i) * (bw + gap);
        const Box bar{x, 97 - values[i], x + bw - 1, 96};
        raster::rect_outline(f.pixels, bar);
        f.marks.push_back(bar);
        if (i == imax) raster::dot(f.pixels, Point{x + bw / 2, (bar.y0 + bar.y1) / 2});
    }
    return f;
}

// Sectors run clockwise from twelve o'clock in tuple order.
inline Figure position_angle_pie(const ParamTuple& values, bool outline, Variant v, Rng& rng) {
    Figure f;
    const int radius = pick(rng, randomizes_size(v), 40, 25, 45);
    const PointF centre{50, 50};
    if (outline) raster::circle(f.pixels, centre, radius);
    const auto imax = static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
    double start = 90.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double sweep = 360.0 * values[i] / kPositionAngleTotal;
        raster::line(f.pixels, centre, raster::polar(centre, radius, start));
        if (i == imax) {
            const double half = sweep / 2.0 * std::numbers::pi / 180.0;
            const double dist = 2.0 * radius * std::sin(half) / (3.0 * half);
            const PointF c = raster::polar(centre, dist, start - sweep / 2.0);
            raster::dot(f.pixels, Point{raster::round_coord(c.x), raster::round_coord(c.y)});
        }
        start -= sweep;
    }
    f.marks.push_back(f.pixels.bounds());
    return f;
}

inline void marker_in(Figure& f, const Box& b) {
    raster::dot(f.pixels, Point{(b.x0 + b.x1 + 1) / 2, b.y1 - b.height() / 2});
}

// Grouped bars (types 1-3): two groups of five outlined bars on a common
// baseline; the marked pair moves further apart with each type.
inline Figure position_length_grouped(int type, const ParamTuple& values, Variant v, Rng& rng) {
    Figure f;
    const int bw = pick(rng, randomizes_size(v), 6, 4, 6);
    constexpr int kGap = 2, kGroupGap = 8, kBaseline = 94;
    const int group_w = 5 * bw + 4 * kGap;
    const int left = (100 - (2 * group_w + kGroupGap)) / 2;
    struct Slot { int group, index; };
    Slot marked[2];
    switch (type) {
        case 1: marked[0] = {0, 1}; marked[1] = {0, 2}; break;
        case 2: marked[0] = {0, 2}; marked[1] = {1, 2}; break;
        default: marked[0] = {0, 0}; marked[1] = {1, 4}; break;
    }
    const auto r = param_range(TaskKind::PositionLength);
    std::vector<Box> marked_boxes(2);
    for (int g = 0; g < 2; ++g)
        for (int i = 0; i < 5; ++i) {
            int height = static_cast<int>(rng.uniform_int(r.lo, r.hi));
            int which = -1;
            for (int m = 0; m < 2; ++m)
                if (marked[m].group == g && marked[m].index == i) which = m;
            if (which >= 0) height = values[static_cast<std::size_t>(which)];
            const int x = left + g * (group_w + kGroupGap) + i * (bw + kGap);
            const Box bar{x, kBaseline - height + 1, x + bw - 1, kBaseline};
            raster::rect_outline(f.pixels, bar);
            if (which >= 0) {
                marker_in(f, bar);
                marked_boxes[static_cast<std::size_t>(which)] = bar;
            }
        }
    f.marks = marked_boxes;
    return f;
}

// Divided (stacked) bars (types 4-5): three stacks of outlined segments.
// Type 4 marks two adjacent segments of the middle stack; type 5 marks the
// top segments of the outer stacks, which sit on bases of unequal height.
inline Figure position_length_divided(int type, const ParamTuple& values, Variant v, Rng& rng) {
    Figure f;
    const int bw = pick(rng, randomizes_size(v), 14, 10, 16);
    constexpr int kGap = 14, kBaseline = 94;
    const int left = (100 - (3 * bw + 2 * kGap)) / 2;

    struct Segment { int height; int marked; };  // marked: -1 or value index
    std::vector<std::vector<Segment>> stacks(3);
    auto filler = [&](int n) {
        std::vector<Segment> s;
        for (int i = 0; i < n; ++i) s.push_back({static_cast<int>(rng.uniform_int(5, 28)), -1});
        return s;
    };
    if (type == 4) {
        stacks[0] = filler(3);
        stacks[1] = {{values[0], 0}, {values[1], 1}};
        stacks[2] = filler(3);
    } else {
        int base0 = static_cast<int>(rng.uniform_int(5, 40));
        int base2 = static_cast<int>(rng.uniform_int(5, 39));
        if (base2 >= base0) ++base2;  // unequal bases
        stacks[0] = {{base0, -1}, {values[0], 0}};
        stacks[1] = filler(3);
        stacks[2] = {{base2, -1}, {values[1], 1}};
    }

    std::vector<Box> marked_boxes(2);
    for (int s = 0; s < 3; ++s) {
        const int x = left + s * (bw + kGap);
        int bottom = kBaseline;
        for (const auto& seg : stacks[static_cast<std::size_t>(s)]) {
            const Box box{x, bottom - seg.height + 1, x + bw - 1, bottom};
            raster::rect_outline(f.pixels, box);
            if (seg.marked >= 0) {
                marker_in(f, box);
                marked_boxes[static_cast<std::size_t>(seg.marked)] = box;
            }
            bottom = box.y0 - 1;
        }
    }
    f.marks = marked_boxes;
    return f;
}

// Two filled bars on non-aligned baselines; the framed subtype encloses each
// bar in a full-height frame with a one-cell gap.
inline Figure bars_framed(bool framed, const ParamTuple& values, Variant v, Rng& rng) {
    Figure f;
    const int bw = pick(rng, randomizes_size(v), 10, 6, 14);
    constexpr int kMaxHeight = 85;
    const int xs[2] = {25, 60};
    const int baselines[2] = {92, 88};
    for (int i = 0; i < 2; ++i) {
        const Box bar{xs[i], baselines[i] - values[static_cast<std::size_t>(i)] + 1, xs[i] + bw - 1, baselines[i]};
        raster::fill_rect(f.pixels, bar);
        f.marks.push_back(bar);
        if (framed)
            raster::rect_outline(f.pixels,
                                 Box{xs[i] - 2, baselines[i] - kMaxHeight - 1, xs[i] + bw + 1, baselines[i] + 2});
    }
    return f;
}

// `count` distinct cells sampled without replacement (partial Fisher-Yates)
// from a square region.
inline Figure point_cloud(int count, Variant v, Rng& rng) {
    Figure f;
    const int side = pick(rng, randomizes_size(v), 60, 40, 80);
    const int x0 = (100 - side) / 2;
    const int y0 = (100 - side) / 2;
    std::vector<int> cells(static_cast<std::size_t>(side * side));
    std::iota(cells.begin(), cells.end(), 0);
    for (int i = 0; i < count; ++i) {
        const auto j = static_cast<std::size_t>(i) + rng.index(cells.size() - static_cast<std::size_t>(i));
        std::swap(cells[static_cast<std::size_t>(i)], cells[j]);
        f.pixels(x0 + cells[static_cast<std::size_t>(i)] % side, y0 + cells[static_cast<std::size_t>(i)] / side);
    }
    f.extent = Box{x0, y0, x0 + side - 1, y0 + side - 1};
    f.marks.push_back(*f.extent);
    return f;
}

inline Figure build_figure(const StimulusSpec& spec, Rng& rng) {
    const auto& p = spec.params;
    const auto v = spec.variant;
    switch (spec.task.kind) {
        case TaskKind::PositionCommon: return position_common(p[0], v, rng);
        case TaskKind::PositionNonAligned: return position_nonaligned(p[0], v, rng);
        case TaskKind::Length: return length(p[0], v, rng);
        case TaskKind::Direction: return direction(p[0], v, rng);
        case TaskKind::Angle: return angle(p[0], v, rng);
        case TaskKind::Area: return area(p[0], v, rng);
        case TaskKind::Volume: return volume(p[0], v, rng);
        case TaskKind::Curvature: return curvature(p[0], v, rng);
        case TaskKind::Shading: return shading(p[0], v, rng);
        case TaskKind::PositionAngle:
            if (spec.task.subtype == pa::kBar) return position_angle_bars(p, v, rng);
            return position_angle_pie(p, spec.task.subtype == pa::kPie, v, rng);
        case TaskKind::PositionLength:
            if (spec.task.subtype <= 3) return position_length_grouped(spec.task.subtype, p, v, rng);
            return position_length_divided(spec.task.subtype, p, v, rng);
        case TaskKind::BarsFramed: return bars_framed(spec.task.subtype == bf::kFramed, p, v, rng);
        case TaskKind::PointCloud: return point_cloud(spec.task.subtype + p[0], v, rng);
    }
    return {};
}

inline void validate_task(TaskId t) {
    const auto subs = subtypes(t.kind);
    if (std::find(subs.begin(), subs.end(), t.subtype) == subs.end())
        throw ConfigError(std::string(kind_name(t.kind)) + ": invalid subtype " + std::to_string(t.subtype));
}

}  // namespace detail

/// Renders a stimulus. Identical specs give identical canvases and labels.
inline Stimulus generate(const StimulusSpec& spec) {
    detail::validate_task(spec.task);
    validate_params(spec.task, spec.params);
    Rng rng(derive_seed(spec.seed, Stream::Render));
    auto fig = detail::build_figure(spec, rng);

    int dx = 0, dy = 0;
    if (randomizes_position(spec.variant)) {
        constexpr int kMargin = 1;
        const Box b = fig.placement_box();
        const int dx_lo = kMargin - b.x0, dx_hi = kCanvasSize - 1 - kMargin - b.x1;
        const int dy_lo = kMargin - b.y0, dy_hi = kCanvasSize - 1 - kMargin - b.y1;
        if (dx_lo <= dx_hi) dx = static_cast<int>(rng.uniform_int(dx_lo, dx_hi));
        if (dy_lo <= dy_hi) dy = static_cast<int>(rng.uniform_int(dy_lo, dy_hi));
    }

    Stimulus s;
    stamp(s.canvas, fig.pixels.points, dx, dy);
    s.labels = labels_for(spec.task, spec.params);
    s.spec = spec;
    for (const auto& m : fig.marks) s.marks.push_back(m.translated(dx, dy));
    return s;
}

/// One of the nine elementary encodings with a single integer parameter.
inline Stimulus generate_elementary(TaskKind kind, int param, Variant variant, std::uint64_t seed) {
    if (!is_elementary(kind)) throw ConfigError(std::string(kind_name(kind)) + " is not an elementary encoding");
    return generate({{kind, 0}, {param}, variant, seed});
}

/// Position-angle (five values summing to 100), position-length or
/// bars-framed (two marked values).
inline Stimulus generate_composite(TaskId task, const ParamTuple& values, Variant variant, std::uint64_t seed) {
    if (task.kind != TaskKind::PositionAngle && task.kind != TaskKind::PositionLength &&
        task.kind != TaskKind::BarsFramed)
        throw ConfigError(task_name(task) + " is not a composite task");
    return generate({task, values, variant, seed});
}

inline Stimulus generate_point_cloud(int base, int delta, Variant variant, std::uint64_t seed) {
    return generate({{TaskKind::PointCloud, base}, {delta}, variant, seed});
}

}  // namespace percept
