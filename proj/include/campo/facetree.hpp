#pragma once

#include "campo/geometry.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace campo {

// Watertight ray/triangle intersection (shear + 2D edge functions). The edge
// tests are sign-consistent across shared edges, so a segment crossing a
// closed surface never slips between adjacent faces; grazing a face exactly
// in its plane counts as a miss.
struct WatertightRay {
    Vec3 org;
    Vec3 dir;  // not normalized; t is in units of dir
    int kx, ky, kz;
    double sx, sy, sz;

    WatertightRay(const Vec3& origin, const Vec3& direction);

    // Parametric hit t along dir, unbounded; callers clamp to their interval.
    std::optional<double> hit(const Triangle& tri) const;
};

// Axis-aligned BVH over a face list. Median split on the longest centroid
// axis, built once, immutable afterwards; queries are safe to run
// concurrently.
class FaceTree {
public:
    FaceTree() = default;
    explicit FaceTree(std::vector<Triangle> faces);

    size_t face_count() const { return faces_.size(); }
    const std::vector<Triangle>& faces() const { return faces_; }

    // True iff some face intersects the open segment (origin, target).
    bool segment_blocked(const Vec3& origin, const Vec3& target) const;

    // Indices of all faces hit by the open segment, ascending. Test support
    // for comparing traversal against brute force.
    std::vector<int> segment_hits(const Vec3& origin, const Vec3& target) const;

    // Number of faces crossed by the ray origin + t*dir, t in (0, inf).
    int count_crossings(const Vec3& origin, const Vec3& dir) const;

    // Distance (in units of |dir|) to the nearest face along the ray, if any.
    std::optional<double> nearest_hit(const Vec3& origin, const Vec3& dir) const;

private:
    struct Node {
        Vec3 box_min, box_max;
        int32_t left = -1;    // internal: child index; leaf: first face
        int32_t count = 0;    // leaf: face count; internal: 0
        int32_t right = -1;
    };

    template <typename Visitor>
    void traverse(const Vec3& org, const Vec3& dir, double tmax, Visitor&& visit) const;

    int32_t build(std::vector<int>& order, int begin, int end);

    std::vector<Triangle> faces_;         // original order, as given
    std::vector<Triangle> faces_sorted_;  // leaf order for contiguous ranges
    std::vector<int> leaf_order_;         // faces_sorted_[i] == faces_[leaf_order_[i]]
    std::vector<Node> nodes_;
    int32_t root_ = -1;
};

// True iff no face occludes the open segment (origin, target).
bool ray_visible(const Vec3& origin, const Vec3& target, const FaceTree& tree);
bool ray_visible(const Vec3& origin, const Vec3& target, const std::vector<Triangle>& faces);

}  // namespace campo
