#pragma once

#include "campo/geometry.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <stdexcept>

namespace campo {

// Pinhole intrinsics. Pixels are square; the horizontal field of view spans
// the full image width (pixel edges 0.5 .. n_x + 0.5). Pixel (i, j) is
// 1-based with center at continuous coordinate (i, j) and covers the
// half-open square [i-0.5, i+0.5) x [j-0.5, j+0.5).
struct CameraIntrinsics {
    int width = 320;
    int height = 240;
    double hfov = 1.5707963267948966;  // radians
    double near_plane = 0.05;          // meters

    double focal() const { return width / (2.0 * std::tan(hfov / 2.0)); }
    double center_x() const { return (1.0 + width) / 2.0; }
    double center_y() const { return (1.0 + height) / 2.0; }

    void validate() const {
        if (width < 8 || height < 8) throw std::invalid_argument("intrinsics: pixel counts must be >= 8");
        if (!(hfov > 0.0) || !(hfov < 3.141592653589793)) throw std::invalid_argument("intrinsics: fov out of (0, pi)");
        if (!(near_plane > 0.0)) throw std::invalid_argument("intrinsics: near plane must be positive");
    }
};

// Camera frame: x right, y down, z forward (optical axis). The orientation
// quaternion rotates camera axes into world axes.
struct CameraPose {
    Vec3 position = Vec3::Zero();
    Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();

    Vec3 forward() const { return orientation * Vec3::UnitZ(); }
    Vec3 to_camera(const Vec3& y) const { return orientation.conjugate() * (y - position); }
};

struct Projection {
    double u = 0.0, v = 0.0;  // continuous pixel coordinates, defined iff in_front
    double distance = 0.0;    // Euclidean camera-to-point distance d(y, a)
    bool in_front = false;    // false when the point is behind the near plane
};

inline Projection project(const CameraPose& pose, const CameraIntrinsics& intr, const Vec3& y) {
    Projection p;
    const Vec3 pc = pose.to_camera(y);
    p.distance = pc.norm();
    p.in_front = pc.z() >= intr.near_plane;
    if (p.in_front) {
        const double f = intr.focal();
        p.u = intr.center_x() + f * pc.x() / pc.z();
        p.v = intr.center_y() + f * pc.y() / pc.z();
    }
    return p;
}

struct PixelIndex {
    int x = 0, y = 0;  // 1-based
    bool outside = true;
};

// Rounds continuous pixel coordinates to the owning pixel; ties round up.
inline PixelIndex pixel_of(const CameraIntrinsics& intr, double u, double v) {
    PixelIndex p;
    if (!(u >= 0.5) || !(u < intr.width + 0.5) || !(v >= 0.5) || !(v < intr.height + 0.5)) return p;
    p.x = static_cast<int>(std::floor(u + 0.5));
    p.y = static_cast<int>(std::floor(v + 0.5));
    p.outside = false;
    return p;
}

inline PixelIndex pixel_of(const CameraIntrinsics& intr, const Projection& pr) {
    if (!pr.in_front) return {};
    return pixel_of(intr, pr.u, pr.v);
}

// Aims the optical axis at target; roll is fixed by up. Throws when up is
// parallel to the view direction.
CameraPose look_at(const Vec3& position, const Vec3& target, const Vec3& up);

// Roll-free orientation in a z-up world. pan is the azimuth of the optical
// axis about +z measured from +x, tilt its elevation: forward =
// (cos t cos p, cos t sin p, sin t).
CameraPose pose_from_pan_tilt(const Vec3& position, double pan, double tilt);

// Inverse of pose_from_pan_tilt for roll-free poses; pan in [0, 2pi),
// tilt in [-pi/2, pi/2].
void pan_tilt_of(const CameraPose& pose, double& pan, double& tilt);

}  // namespace campo
