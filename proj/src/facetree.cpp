#include "campo/facetree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace campo {

WatertightRay::WatertightRay(const Vec3& origin, const Vec3& direction) : org(origin), dir(direction) {
    kz = 0;
    if (std::abs(dir[1]) > std::abs(dir[kz])) kz = 1;
    if (std::abs(dir[2]) > std::abs(dir[kz])) kz = 2;
    kx = (kz + 1) % 3;
    ky = (kx + 1) % 3;
    if (dir[kz] < 0.0) std::swap(kx, ky);  // keep winding consistent
    sx = dir[kx] / dir[kz];
    sy = dir[ky] / dir[kz];
    sz = 1.0 / dir[kz];
}

std::optional<double> WatertightRay::hit(const Triangle& tri) const {
    const Vec3 a = tri.a - org, b = tri.b - org, c = tri.c - org;
    const double ax = a[kx] - sx * a[kz], ay = a[ky] - sy * a[kz];
    const double bx = b[kx] - sx * b[kz], by = b[ky] - sy * b[kz];
    const double cx = c[kx] - sx * c[kz], cy = c[ky] - sy * c[kz];

    const double u = cx * by - cy * bx;
    const double v = ax * cy - ay * cx;
    const double w = bx * ay - by * ax;

    if ((u < 0.0 || v < 0.0 || w < 0.0) && (u > 0.0 || v > 0.0 || w > 0.0)) return std::nullopt;
    const double det = u + v + w;
    if (det == 0.0) return std::nullopt;  // ray in the triangle plane

    const double az = sz * a[kz], bz = sz * b[kz], cz = sz * c[kz];
    const double t = (u * az + v * bz + w * cz) / det;
    return t;
}

namespace {

// Slab test over the t interval (0, tmax); conservative on axis-parallel rays.
inline bool box_hit(const Vec3& box_min, const Vec3& box_max, const Vec3& org, const Vec3& inv_dir,
                    double tmax) {
    double t0 = 0.0, t1 = tmax;
    for (int i = 0; i < 3; ++i) {
        if (std::isinf(inv_dir[i])) {
            if (org[i] < box_min[i] || org[i] > box_max[i]) return false;
            continue;
        }
        double near = (box_min[i] - org[i]) * inv_dir[i];
        double far = (box_max[i] - org[i]) * inv_dir[i];
        if (near > far) std::swap(near, far);
        t0 = std::max(t0, near);
        t1 = std::min(t1, far);
        if (t0 > t1) return false;
    }
    return true;
}

}  // namespace

FaceTree::FaceTree(std::vector<Triangle> faces) : faces_(std::move(faces)) {
    if (faces_.empty()) return;
    std::vector<int> order(faces_.size());
    std::iota(order.begin(), order.end(), 0);
    nodes_.reserve(2 * faces_.size());
    root_ = build(order, 0, static_cast<int>(order.size()));
    // permute faces into leaf order so leaves reference contiguous ranges
    std::vector<Triangle> sorted;
    sorted.reserve(faces_.size());
    for (int i : order) sorted.push_back(faces_[i]);
    leaf_order_ = std::move(order);
    faces_sorted_ = std::move(sorted);
}

int32_t FaceTree::build(std::vector<int>& order, int begin, int end) {
    Node node;
    node.box_min = Vec3::Constant(std::numeric_limits<double>::infinity());
    node.box_max = Vec3::Constant(-std::numeric_limits<double>::infinity());
    Vec3 cmin = node.box_min, cmax = node.box_max;
    for (int i = begin; i < end; ++i) {
        const Triangle& t = faces_[order[i]];
        node.box_min = node.box_min.cwiseMin(t.min());
        node.box_max = node.box_max.cwiseMax(t.max());
        const Vec3 c = (t.a + t.b + t.c) / 3.0;
        cmin = cmin.cwiseMin(c);
        cmax = cmax.cwiseMax(c);
    }

    constexpr int kLeafSize = 8;
    if (end - begin <= kLeafSize) {
        node.left = begin;
        node.count = end - begin;
        nodes_.push_back(node);
        return static_cast<int32_t>(nodes_.size() - 1);
    }

    int axis = 0;
    const Vec3 ext = cmax - cmin;
    if (ext[1] > ext[axis]) axis = 1;
    if (ext[2] > ext[axis]) axis = 2;
    const int mid = (begin + end) / 2;
    std::nth_element(order.begin() + begin, order.begin() + mid, order.begin() + end,
                     [&](int a, int b) {
                         const double ca = faces_[a].a[axis] + faces_[a].b[axis] + faces_[a].c[axis];
                         const double cb = faces_[b].a[axis] + faces_[b].b[axis] + faces_[b].c[axis];
                         if (ca != cb) return ca < cb;
                         return a < b;  // deterministic tie-break
                     });

    const int32_t left = build(order, begin, mid);
    const int32_t right = build(order, mid, end);
    node.left = left;
    node.right = right;
    node.count = 0;
    nodes_.push_back(node);
    return static_cast<int32_t>(nodes_.size() - 1);
}

template <typename Visitor>
void FaceTree::traverse(const Vec3& org, const Vec3& dir, double tmax, Visitor&& visit) const {
    if (root_ < 0) return;
    const Vec3 inv_dir = dir.cwiseInverse();
    int32_t stack[64];
    int sp = 0;
    stack[sp++] = root_;
    while (sp > 0) {
        const Node& node = nodes_[stack[--sp]];
        if (!box_hit(node.box_min, node.box_max, org, inv_dir, tmax)) continue;
        if (node.count > 0) {
            for (int i = node.left; i < node.left + node.count; ++i)
                if (!visit(i)) return;
        } else {
            stack[sp++] = node.left;
            stack[sp++] = node.right;
        }
    }
}

bool FaceTree::segment_blocked(const Vec3& origin, const Vec3& target) const {
    if (faces_.empty()) return false;
    const Vec3 dir = target - origin;
    WatertightRay ray(origin, dir);
    bool blocked = false;
    traverse(origin, dir, 1.0, [&](int i) {
        if (auto t = ray.hit(faces_sorted_[i]); t && *t > 0.0 && *t < 1.0) {
            blocked = true;
            return false;
        }
        return true;
    });
    return blocked;
}

std::vector<int> FaceTree::segment_hits(const Vec3& origin, const Vec3& target) const {
    std::vector<int> hits;
    if (faces_.empty()) return hits;
    const Vec3 dir = target - origin;
    WatertightRay ray(origin, dir);
    traverse(origin, dir, 1.0, [&](int i) {
        if (auto t = ray.hit(faces_sorted_[i]); t && *t > 0.0 && *t < 1.0)
            hits.push_back(leaf_order_[i]);
        return true;
    });
    std::sort(hits.begin(), hits.end());
    return hits;
}

int FaceTree::count_crossings(const Vec3& origin, const Vec3& dir) const {
    if (faces_.empty()) return 0;
    WatertightRay ray(origin, dir);
    int count = 0;
    const double tmax = std::numeric_limits<double>::infinity();
    traverse(origin, dir, tmax, [&](int i) {
        if (auto t = ray.hit(faces_sorted_[i]); t && *t > 0.0) ++count;
        return true;
    });
    return count;
}

std::optional<double> FaceTree::nearest_hit(const Vec3& origin, const Vec3& dir) const {
    if (faces_.empty()) return std::nullopt;
    WatertightRay ray(origin, dir);
    double best = std::numeric_limits<double>::infinity();
    traverse(origin, dir, best, [&](int i) {
        if (auto t = ray.hit(faces_sorted_[i]); t && *t > 0.0 && *t < best) best = *t;
        return true;
    });
    if (std::isinf(best)) return std::nullopt;
    return best;
}

bool ray_visible(const Vec3& origin, const Vec3& target, const FaceTree& tree) {
    return !tree.segment_blocked(origin, target);
}

bool ray_visible(const Vec3& origin, const Vec3& target, const std::vector<Triangle>& faces) {
    return ray_visible(origin, target, FaceTree(faces));
}

}  // namespace campo
