#pragma once

// Binary canvas and integer-deterministic rasterization of the primitives
// every stimulus is built from. No anti-aliasing: a cell is either marked or
// not. All primitives are written against a generic `plot(x, y)` sink so the
// same code can stamp onto a Canvas or collect pixel lists for layout.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

namespace percept {

inline constexpr int kCanvasSize = 100;

struct Point {
    int x = 0;  // column
    int y = 0;  // row, 0 at the top

    friend bool operator==(const Point&, const Point&) = default;
};

struct PointF {
    double x = 0.0;
    double y = 0.0;
};

/// Inclusive integer bounding box.
struct Box {
    int x0 = 0, y0 = 0, x1 = -1, y1 = -1;

    bool empty() const noexcept { return x1 < x0 || y1 < y0; }
    int width() const noexcept { return empty() ? 0 : x1 - x0 + 1; }
    int height() const noexcept { return empty() ? 0 : y1 - y0 + 1; }

    void include(Point p) noexcept {
        if (empty()) {
            x0 = x1 = p.x;
            y0 = y1 = p.y;
            return;
        }
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
    }

    Box translated(int dx, int dy) const noexcept { return {x0 + dx, y0 + dy, x1 + dx, y1 + dy}; }

    friend bool operator==(const Box&, const Box&) = default;
};

class Canvas {
public:
    Canvas() : Canvas(kCanvasSize, kCanvasSize) {}
    Canvas(int width, int height)
        : width_(width), height_(height), cells_(static_cast<std::size_t>(width * height), 0) {}

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    bool contains(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width_ && y < height_; }

    /// Marks a cell; coordinates outside the canvas are clipped silently.
    void set(int x, int y) noexcept {
        if (contains(x, y)) cells_[index(x, y)] = 1;
    }
    void operator()(int x, int y) noexcept { set(x, y); }

    std::uint8_t at(int x, int y) const noexcept { return contains(x, y) ? cells_[index(x, y)] : 0; }

    std::size_t count() const noexcept {
        return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
    }

    std::span<const std::uint8_t> cells() const noexcept { return cells_; }

    friend bool operator==(const Canvas&, const Canvas&) = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_;
    int height_;
    std::vector<std::uint8_t> cells_;
};

/// Collects plotted points (duplicates allowed); used to measure a figure
/// before placing it.
struct PointList {
    std::vector<Point> points;
    void operator()(int x, int y) { points.push_back({x, y}); }

    Box bounds() const noexcept {
        Box b;
        for (auto p : points) b.include(p);
        return b;
    }
};

namespace raster {

inline int round_coord(double v) noexcept { return static_cast<int>(std::lround(v)); }

/// Bresenham line between integer endpoints. A stroke wider than one cell
/// is extended along the minor axis (rows for x-major lines, columns for
/// y-major ones), so the major-axis extent never changes with width.
template <class Plot>
void line(Plot&& plot, Point a, Point b, int width = 1) {
    width = std::max(width, 1);
    const int dx = std::abs(b.x - a.x);
    const int dy = -std::abs(b.y - a.y);
    const int sx = a.x < b.x ? 1 : -1;
    const int sy = a.y < b.y ? 1 : -1;
    const bool x_major = dx >= -dy;
    int err = dx + dy;
    int x = a.x, y = a.y;
    for (;;) {
        for (int w = 0; w < width; ++w) {
            if (x_major) plot(x, y + w);
            else plot(x + w, y);
        }
        if (x == b.x && y == b.y) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y += sy;
        }
    }
}

template <class Plot>
void line(Plot&& plot, PointF a, PointF b, int width = 1) {
    line(plot, Point{round_coord(a.x), round_coord(a.y)}, Point{round_coord(b.x), round_coord(b.y)}, width);
}

inline Box normalized(Box r) noexcept {
    if (r.x0 > r.x1) std::swap(r.x0, r.x1);
    if (r.y0 > r.y1) std::swap(r.y0, r.y1);
    return r;
}

/// Every cell with x0<=x<=x1, y0<=y<=y1.
template <class Plot>
void fill_rect(Plot&& plot, Box r) {
    r = normalized(r);
    for (int y = r.y0; y <= r.y1; ++y)
        for (int x = r.x0; x <= r.x1; ++x) plot(x, y);
}

/// Rectangle border of the given stroke width, drawn inward.
template <class Plot>
void rect_outline(Plot&& plot, Box r, int width = 1) {
    r = normalized(r);
    width = std::max(width, 1);
    for (int y = r.y0; y <= r.y1; ++y)
        for (int x = r.x0; x <= r.x1; ++x) {
            const bool border = x - r.x0 < width || r.x1 - x < width || y - r.y0 < width || r.y1 - y < width;
            if (border) plot(x, y);
        }
}

/// Square dot of side `size` whose bottom-left cell is `p`.
template <class Plot>
void dot(Plot&& plot, Point p, int size = 1) {
    size = std::max(size, 1);
    fill_rect(plot, Box{p.x, p.y - size + 1, p.x + size - 1, p.y});
}

/// Square dot of side `size` centred on `p` (odd sizes are exact).
template <class Plot>
void centered_dot(Plot&& plot, Point p, int size = 1) {
    size = std::max(size, 1);
    const int lo = (size - 1) / 2;
    fill_rect(plot, Box{p.x - lo, p.y - lo, p.x - lo + size - 1, p.y - lo + size - 1});
}

/// Point on a circle at `deg` degrees, counter-clockwise from +x with the
/// y axis pointing down the canvas.
inline PointF polar(PointF centre, double radius, double deg) noexcept {
    const double rad = deg * std::numbers::pi / 180.0;
    return {centre.x + radius * std::cos(rad), centre.y - radius * std::sin(rad)};
}

/// Polyline approximation of an arc from `from_deg` to `to_deg`
/// (counter-clockwise when to > from). Zero radius plots the centre cell.
template <class Plot>
void arc(Plot&& plot, PointF centre, double radius, double from_deg, double to_deg, int width = 1) {
    if (radius <= 0.0) {
        plot(round_coord(centre.x), round_coord(centre.y));
        return;
    }
    const double sweep = to_deg - from_deg;
    PointF prev = polar(centre, radius, from_deg);
    if (sweep == 0.0) {
        line(plot, prev, prev, width);
        return;
    }
    const int steps = std::max(8, static_cast<int>(std::ceil(std::abs(sweep) * std::numbers::pi / 180.0 * radius)));
    for (int i = 1; i <= steps; ++i) {
        const PointF next = polar(centre, radius, from_deg + sweep * i / steps);
        line(plot, prev, next, width);
        prev = next;
    }
}

template <class Plot>
void circle(Plot&& plot, PointF centre, double radius, int width = 1) {
    arc(plot, centre, radius, 0.0, 360.0, width);
}

/// Pie sector: arc plus the two bounding radii.
template <class Plot>
void sector(Plot&& plot, PointF centre, double radius, double from_deg, double to_deg, int width = 1) {
    arc(plot, centre, radius, from_deg, to_deg, width);
    line(plot, centre, polar(centre, radius, from_deg), width);
    line(plot, centre, polar(centre, radius, to_deg), width);
}

/// Quadratic Bezier through p0 and p2 with control point p1, drawn as a
/// connected polyline fine enough that consecutive samples are at most one
/// cell apart.
template <class Plot>
void quadratic(Plot&& plot, PointF p0, PointF p1, PointF p2, int width = 1) {
    const double hull = std::hypot(p1.x - p0.x, p1.y - p0.y) + std::hypot(p2.x - p1.x, p2.y - p1.y);
    const int steps = std::max(1, static_cast<int>(std::ceil(hull)));
    auto at = [&](double t) {
        const double u = 1.0 - t;
        return PointF{u * u * p0.x + 2.0 * u * t * p1.x + t * t * p2.x,
                      u * u * p0.y + 2.0 * u * t * p1.y + t * t * p2.y};
    };
    PointF prev = p0;
    for (int i = 1; i <= steps; ++i) {
        const PointF next = at(static_cast<double>(i) / steps);
        line(plot, prev, next, width);
        prev = next;
    }
}

}  // namespace raster

/// Stamps a point list onto a canvas with an integer offset.
inline void stamp(Canvas& canvas, std::span<const Point> points, int dx = 0, int dy = 0) {
    for (auto p : points) canvas.set(p.x + dx, p.y + dy);
}

}  // namespace percept
