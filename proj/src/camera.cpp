#include "campo/camera.hpp"

namespace campo {

namespace {

Eigen::Quaterniond quaternion_from_axes(const Vec3& right, const Vec3& down, const Vec3& forward) {
    Eigen::Matrix3d r;
    r.col(0) = right;
    r.col(1) = down;
    r.col(2) = forward;
    Eigen::Quaterniond q(r);
    q.normalize();
    return q;
}

}  // namespace

CameraPose look_at(const Vec3& position, const Vec3& target, const Vec3& up) {
    const Vec3 diff = target - position;
    const double len = diff.norm();
    if (len == 0.0) throw std::invalid_argument("look_at: target equals position");
    const Vec3 f = diff / len;
    Vec3 s = f.cross(up);
    const double slen = s.norm();
    if (slen < 1e-12 * up.norm()) throw std::invalid_argument("look_at: up is parallel to the view direction");
    s /= slen;
    const Vec3 d = f.cross(s);
    return {position, quaternion_from_axes(s, d, f)};
}

CameraPose pose_from_pan_tilt(const Vec3& position, double pan, double tilt) {
    const double cp = std::cos(pan), sp = std::sin(pan);
    const double ct = std::cos(tilt), st = std::sin(tilt);
    const Vec3 f(ct * cp, ct * sp, st);
    const Vec3 r(sp, -cp, 0.0);  // horizontal right, independent of tilt
    const Vec3 d = f.cross(r);
    return {position, quaternion_from_axes(r, d, f)};
}

void pan_tilt_of(const CameraPose& pose, double& pan, double& tilt) {
    const Vec3 f = pose.forward();
    tilt = std::asin(std::clamp(f.z(), -1.0, 1.0));
    pan = std::atan2(f.y(), f.x());
    if (pan < 0.0) pan += 2.0 * 3.14159265358979323846;
}

}  // namespace campo
