#pragma once

#include "campo/camera.hpp"
#include "campo/facetree.hpp"
#include "campo/geometry.hpp"
#include "campo/render.hpp"

#include <random>
#include <vector>

namespace campo::testutil {

inline double uniform(std::mt19937_64& gen, double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(gen() >> 11) * 0x1.0p-53);
}

inline Vec3 random_point(std::mt19937_64& gen, const Vec3& lo, const Vec3& hi) {
    return Vec3(uniform(gen, lo.x(), hi.x()), uniform(gen, lo.y(), hi.y()),
                uniform(gen, lo.z(), hi.z()));
}

inline void append_faces(std::vector<Triangle>& out, const TriangleMesh& mesh) {
    for (size_t f = 0; f < mesh.faces.size(); ++f) out.push_back(mesh.face_triangle(static_cast<int>(f)));
}

// Wall in the plane x = wall_x spanning [y0,y1]x[z0,z1] with a rectangular
// door cut out; built from three slabs (left of, right of, above the door).
inline std::vector<Triangle> wall_with_door(double wall_x, double thickness = 0.11) {
    std::vector<Triangle> faces;
    const double y0 = -4.03, y1 = 4.07, z0 = 0.0, z1 = 3.57;
    const double door_y0 = -0.62, door_y1 = 0.58, door_z1 = 2.13;
    append_faces(faces, make_box({wall_x, y0, z0}, {wall_x + thickness, door_y0, z1}));
    append_faces(faces, make_box({wall_x, door_y1, z0}, {wall_x + thickness, y1, z1}));
    append_faces(faces, make_box({wall_x, door_y0, door_z1}, {wall_x + thickness, door_y1, z1}));
    return faces;
}

// Room interior: floor, far wall and two side walls of a [0,10]x[-5,5]x[0,4]
// box (camera side and ceiling left open).
inline std::vector<Triangle> open_room() {
    std::vector<Triangle> faces;
    append_faces(faces, make_box({-0.5, -5.2, -0.1}, {10.3, 5.2, 0.0}));   // floor
    append_faces(faces, make_box({10.1, -5.2, 0.0}, {10.3, 5.2, 4.1}));   // far wall
    append_faces(faces, make_box({-0.5, -5.21, 0.0}, {10.3, -5.01, 4.1}));  // side
    append_faces(faces, make_box({-0.5, 5.01, 0.0}, {10.3, 5.21, 4.1}));    // side
    return faces;
}

// Ray-cast reference image: distance along the ray through each pixel
// center to the nearest face.
inline DepthImage raycast_depth(const CameraPose& pose, const CameraIntrinsics& intr,
                                const FaceTree& tree) {
    DepthImage img(intr.width, intr.height);
    const double f = intr.focal();
    for (int j = 1; j <= intr.height; ++j) {
        for (int i = 1; i <= intr.width; ++i) {
            Vec3 dir_cam((i - intr.center_x()) / f, (j - intr.center_y()) / f, 1.0);
            dir_cam.normalize();
            const Vec3 dir = pose.orientation * dir_cam;
            if (auto t = tree.nearest_hit(pose.position, dir)) img.at(i, j) = *t;
        }
    }
    return img;
}

// Lateral size of one pixel at the given depth.
inline double pixel_footprint(const CameraIntrinsics& intr, double depth) {
    return depth / intr.focal();
}

// True when the 3x3 neighborhood spans a depth discontinuity (relative jump
// above threshold or a mix of hit and no-hit pixels) or touches the image
// boundary.
inline bool near_discontinuity(const DepthImage& img, int px, int py, double jump) {
    if (px <= 1 || py <= 1 || px >= img.width || py >= img.height) return true;
    double lo = kNoHit, hi = 0.0;
    bool any_nohit = false;
    for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
            const double d = img.at(px + dx, py + dy);
            if (std::isfinite(d)) {
                lo = std::min(lo, d);
                hi = std::max(hi, d);
            } else {
                any_nohit = true;
            }
        }
    if (any_nohit) return true;
    return hi - lo > jump;
}

}  // namespace campo::testutil
