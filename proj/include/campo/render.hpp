#pragma once

#include "campo/camera.hpp"
#include "campo/geometry.hpp"

#include <limits>
#include <string>
#include <vector>

namespace campo {

inline constexpr double kNoHit = std::numeric_limits<double>::infinity();

// Sentinel for pixels where only the dynamic image has a surface; finite and
// hugely negative so plain sign tests classify it as foreground.
inline constexpr double kForegroundSentinel = -1e30;

// Per-pixel Euclidean camera-to-surface distance; kNoHit where no face
// projects. Pixel indices are 1-based, matching pixel_of().
struct DepthImage {
    int width = 0, height = 0;
    std::vector<double> data;

    DepthImage() = default;
    DepthImage(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * h, kNoHit) {}

    double at(int px, int py) const { return data[static_cast<size_t>(py - 1) * width + (px - 1)]; }
    double& at(int px, int py) { return data[static_cast<size_t>(py - 1) * width + (px - 1)]; }
};

// Background-subtraction result: s = dynamic - static, foreground iff s < 0.
struct SegmentedImage {
    int width = 0, height = 0;
    std::vector<double> s;

    double at(int px, int py) const { return s[static_cast<size_t>(py - 1) * width + (px - 1)]; }
    bool foreground(int px, int py) const { return at(px, py) < 0.0; }
    size_t foreground_count() const;
};

// Z-buffer depth rasterization: each pixel ends up with the minimum Euclidean
// distance over all faces seen through its center. Faces are clipped against
// the near plane; the per-pixel distance comes from perspective-correct
// interpolation of the camera-space position. Output is independent of face
// order and of the thread count.
DepthImage render_depth(const CameraPose& pose, const CameraIntrinsics& intr,
                        const std::vector<Triangle>& faces);

// s(p) = dynamic(p) - static(p) with the sign rules: both kNoHit -> 0
// (background); dynamic finite, static kNoHit -> kForegroundSentinel;
// dynamic kNoHit, static finite -> background (stored +inf). Throws on
// dimension mismatch.
SegmentedImage segment(const DepthImage& static_img, const DepthImage& dynamic_img);

// 16-bit binary PGM, value = round(clamp(distance / depth_scale, 0, 65534)),
// 65535 = no hit; depth_scale recorded in a header comment.
void write_pgm16(const DepthImage& img, const std::string& path, double depth_scale);

// 8-bit binary PGM, 0 = background, 255 = foreground.
void write_pgm8(const SegmentedImage& img, const std::string& path);

}  // namespace campo
