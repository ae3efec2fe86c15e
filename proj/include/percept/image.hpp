#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "percept/canvas.hpp"
#include "percept/errors.hpp"
#include "percept/rng.hpp"

namespace percept {

struct FloatImage {
    int width = 0;
    int height = 0;
    std::vector<float> values;  // row-major

    float at(int x, int y) const {
        return values[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
    }
    friend bool operator==(const FloatImage&, const FloatImage&) = default;
};

inline constexpr double kNoiseAmplitude = 0.05;

/// Maps a binary canvas to [-0.5, 0.5] and pushes every cell inward by
/// u ~ U[0, amplitude): background lands in [-0.5, -0.45), marks in
/// (0.45, 0.5]. Draws exactly one uniform per cell in row-major order.
inline FloatImage normalize_and_noise(const Canvas& canvas, Rng& rng, double amplitude = kNoiseAmplitude) {
    FloatImage img{canvas.width(), canvas.height(), {}};
    const auto cells = canvas.cells();
    img.values.resize(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const double bit = cells[i];
        const double u = amplitude * rng.uniform01();
        img.values[i] = static_cast<float>(bit - 0.5 + (1.0 - 2.0 * bit) * u);
    }
    return img;
}

inline constexpr int kMaxResizeTarget = 4096;

/// Nearest-neighbour upsampling to target x target. Output pixel (x, y)
/// copies source (floor(x*w/target), floor(y*h/target)).
inline FloatImage resize_image(const FloatImage& image, int target) {
    if (target < image.width || target < image.height || target > kMaxResizeTarget)
        throw ConfigError("unsupported resize target " + std::to_string(target) + " for a " +
                          std::to_string(image.width) + "x" + std::to_string(image.height) +
                          " image (must be in [source size, " + std::to_string(kMaxResizeTarget) + "])");
    FloatImage out{target, target, std::vector<float>(static_cast<std::size_t>(target) * static_cast<std::size_t>(target))};
    std::vector<int> src_x(static_cast<std::size_t>(target)), src_y(static_cast<std::size_t>(target));
    for (int i = 0; i < target; ++i) {
        src_x[static_cast<std::size_t>(i)] = i * image.width / target;
        src_y[static_cast<std::size_t>(i)] = i * image.height / target;
    }
    for (int y = 0; y < target; ++y)
        for (int x = 0; x < target; ++x)
            out.values[static_cast<std::size_t>(y) * static_cast<std::size_t>(target) + static_cast<std::size_t>(x)] =
                image.at(src_x[static_cast<std::size_t>(x)], src_y[static_cast<std::size_t>(y)]);
    return out;
}

}  // namespace percept
