#include "campo/render.hpp"

#include "campo/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace campo {

namespace {

// A near-clipped, projected triangle ready for scanning. pw is the
// camera-space position pre-divided by z; winv = 1/z. Both interpolate
// linearly in screen space.
struct ScreenTri {
    double u[3], v[3];
    Vec3 pw[3];
    double winv[3];
    double umin, umax, vmin, vmax;
};

void emit_screen_tri(const Vec3& a, const Vec3& b, const Vec3& c, const CameraIntrinsics& intr,
                     std::vector<ScreenTri>& out) {
    const double f = intr.focal();
    const double cx = intr.center_x(), cy = intr.center_y();
    ScreenTri t;
    const Vec3* pts[3] = {&a, &b, &c};
    for (int i = 0; i < 3; ++i) {
        const Vec3& p = *pts[i];
        const double invz = 1.0 / p.z();
        t.u[i] = cx + f * p.x() * invz;
        t.v[i] = cy + f * p.y() * invz;
        t.winv[i] = invz;
        t.pw[i] = p * invz;
    }
    t.umin = std::min({t.u[0], t.u[1], t.u[2]});
    t.umax = std::max({t.u[0], t.u[1], t.u[2]});
    t.vmin = std::min({t.v[0], t.v[1], t.v[2]});
    t.vmax = std::max({t.v[0], t.v[1], t.v[2]});
    if (t.umax < 0.5 || t.umin >= intr.width + 0.5 || t.vmax < 0.5 || t.vmin >= intr.height + 0.5)
        return;  // fully off screen
    out.push_back(t);
}

// Clip the camera-space triangle against z >= near and append the projected
// pieces (at most two triangles).
void clip_and_project(const Vec3& p0, const Vec3& p1, const Vec3& p2, const CameraIntrinsics& intr,
                      std::vector<ScreenTri>& out) {
    const double near = intr.near_plane;
    const Vec3 in[3] = {p0, p1, p2};
    Vec3 poly[4];
    int count = 0;
    for (int i = 0; i < 3; ++i) {
        const Vec3& cur = in[i];
        const Vec3& nxt = in[(i + 1) % 3];
        const bool cur_in = cur.z() >= near;
        const bool nxt_in = nxt.z() >= near;
        if (cur_in) poly[count++] = cur;
        if (cur_in != nxt_in) {
            const double t = (near - cur.z()) / (nxt.z() - cur.z());
            poly[count++] = cur + t * (nxt - cur);
        }
    }
    if (count < 3) return;
    emit_screen_tri(poly[0], poly[1], poly[2], intr, out);
    if (count == 4) emit_screen_tri(poly[0], poly[2], poly[3], intr, out);
}

// Scans the triangle's pixels within rows [row_lo, row_hi] (1-based,
// inclusive). Ownership of edge-on pixels follows the top-left rule so
// shared edges are written exactly once.
void raster_rows(const ScreenTri& t, int row_lo, int row_hi, DepthImage& img) {
    int i0 = 0, i1 = 1, i2 = 2;
    double area2 = (t.u[1] - t.u[0]) * (t.v[2] - t.v[0]) - (t.v[1] - t.v[0]) * (t.u[2] - t.u[0]);
    if (area2 == 0.0) return;
    if (area2 < 0.0) {
        std::swap(i1, i2);
        area2 = -area2;
    }
    const double u0 = t.u[i0], u1 = t.u[i1], u2 = t.u[i2];
    const double v0 = t.v[i0], v1 = t.v[i1], v2 = t.v[i2];

    const int jlo = std::max(row_lo, static_cast<int>(std::ceil(t.vmin)));
    const int jhi = std::min(row_hi, static_cast<int>(std::floor(t.vmax)));
    const int ilo = std::max(1, static_cast<int>(std::ceil(t.umin)));
    const int ihi = std::min(img.width, static_cast<int>(std::floor(t.umax)));
    if (jlo > jhi || ilo > ihi) return;

    // edge k is opposite vertex k; E >= 0 inside with area2 > 0
    const double ea[3] = {u2 - u1, u0 - u2, u1 - u0};  // du per edge
    const double eb[3] = {v2 - v1, v0 - v2, v1 - v0};  // dv per edge
    const double org_u[3] = {u1, u2, u0};
    const double org_v[3] = {v1, v2, v0};
    bool accept_zero[3];
    for (int k = 0; k < 3; ++k)
        accept_zero[k] = (eb[k] == 0.0 && ea[k] > 0.0) || eb[k] < 0.0;  // top or left

    const double inv_area = 1.0 / area2;
    const double w0 = t.winv[i0], w1 = t.winv[i1], w2 = t.winv[i2];
    const Vec3 &pw0 = t.pw[i0], &pw1 = t.pw[i1], &pw2 = t.pw[i2];

    for (int j = jlo; j <= jhi; ++j) {
        double e[3];
        for (int k = 0; k < 3; ++k)
            e[k] = ea[k] * (j - org_v[k]) - eb[k] * (ilo - org_u[k]);
        for (int i = ilo; i <= ihi; ++i) {
            const bool inside = (e[0] > 0.0 || (e[0] == 0.0 && accept_zero[0])) &&
                                (e[1] > 0.0 || (e[1] == 0.0 && accept_zero[1])) &&
                                (e[2] > 0.0 || (e[2] == 0.0 && accept_zero[2]));
            if (inside) {
                const double l0 = e[0] * inv_area;
                const double l1 = e[1] * inv_area;
                const double l2 = e[2] * inv_area;
                const double winv = l0 * w0 + l1 * w1 + l2 * w2;
                const Vec3 pos = (l0 * pw0 + l1 * pw1 + l2 * pw2) / winv;
                const double dist = pos.norm();
                double& px = img.at(i, j);
                if (dist < px) px = dist;
            }
            for (int k = 0; k < 3; ++k) e[k] -= eb[k];
        }
    }
}

}  // namespace

DepthImage render_depth(const CameraPose& pose, const CameraIntrinsics& intr,
                        const std::vector<Triangle>& faces) {
    intr.validate();
    DepthImage img(intr.width, intr.height);

    std::vector<ScreenTri> tris;
    tris.reserve(faces.size());
    const Eigen::Quaterniond world_to_cam = pose.orientation.conjugate();
    for (const Triangle& f : faces) {
        const Vec3 a = world_to_cam * (f.a - pose.position);
        const Vec3 b = world_to_cam * (f.b - pose.position);
        const Vec3 c = world_to_cam * (f.c - pose.position);
        if (a.z() < intr.near_plane && b.z() < intr.near_plane && c.z() < intr.near_plane) continue;
        clip_and_project(a, b, c, intr, tris);
    }

    parallel_chunks(intr.height, 32, [&](int64_t, int64_t begin, int64_t end) {
        const int row_lo = static_cast<int>(begin) + 1;
        const int row_hi = static_cast<int>(end);
        for (const ScreenTri& t : tris) {
            if (t.vmax < row_lo || t.vmin > row_hi) continue;
            raster_rows(t, row_lo, row_hi, img);
        }
    });
    return img;
}

SegmentedImage segment(const DepthImage& static_img, const DepthImage& dynamic_img) {
    if (static_img.width != dynamic_img.width || static_img.height != dynamic_img.height)
        throw std::invalid_argument("segment: image dimensions differ");
    SegmentedImage seg;
    seg.width = static_img.width;
    seg.height = static_img.height;
    seg.s.resize(static_img.data.size());
    for (size_t i = 0; i < seg.s.size(); ++i) {
        const double ds = static_img.data[i];
        const double dd = dynamic_img.data[i];
        const bool static_hit = std::isfinite(ds);
        const bool dynamic_hit = std::isfinite(dd);
        if (!static_hit && !dynamic_hit)
            seg.s[i] = 0.0;
        else if (dynamic_hit && !static_hit)
            seg.s[i] = kForegroundSentinel;
        else if (!dynamic_hit && static_hit)
            seg.s[i] = kNoHit;  // background: the dynamic view sees past the static surface
        else
            seg.s[i] = dd - ds;
    }
    return seg;
}

size_t SegmentedImage::foreground_count() const {
    size_t n = 0;
    for (double v : s)
        if (v < 0.0) ++n;
    return n;
}

void write_pgm16(const DepthImage& img, const std::string& path, double depth_scale) {
    if (!(depth_scale > 0.0)) throw std::invalid_argument("depth_scale must be positive");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    char header[128];
    std::snprintf(header, sizeof header, "P5\n# depth_scale %.17g\n%d %d\n65535\n", depth_scale,
                  img.width, img.height);
    out << header;
    std::vector<unsigned char> bytes;
    bytes.reserve(img.data.size() * 2);
    for (double d : img.data) {
        unsigned value = 65535;
        if (std::isfinite(d)) {
            const double scaled = std::clamp(d / depth_scale, 0.0, 65534.0);
            value = static_cast<unsigned>(std::lround(scaled));
        }
        bytes.push_back(static_cast<unsigned char>(value >> 8));
        bytes.push_back(static_cast<unsigned char>(value & 0xff));
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_pgm8(const SegmentedImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    char header[64];
    std::snprintf(header, sizeof header, "P5\n%d %d\n255\n", img.width, img.height);
    out << header;
    std::vector<unsigned char> bytes;
    bytes.reserve(img.s.size());
    for (double v : img.s) bytes.push_back(v < 0.0 ? 255 : 0);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace campo
