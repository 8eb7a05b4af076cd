#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

namespace campo {

using Vec3 = Eigen::Vector3d;

// One assembled world-space face. All visibility code consumes flat lists of
// these; mesh/instance structure is resolved by assemble_scene().
struct Triangle {
    Vec3 a, b, c;

    Vec3 min() const { return a.cwiseMin(b).cwiseMin(c); }
    Vec3 max() const { return a.cwiseMax(b).cwiseMax(c); }
    double area() const { return 0.5 * (b - a).cross(c - a).norm(); }
};

struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;  // indices into vertices
    std::string name;
    int dropped_degenerate = 0;  // zero-area faces removed at load

    Triangle face_triangle(int f) const {
        const auto& idx = faces[f];
        return {vertices[idx[0]], vertices[idx[1]], vertices[idx[2]]};
    }
};

// Loads the v/f subset of ASCII Wavefront OBJ. Polygons with more than three
// vertices are fan-triangulated; faces with area below 1e-12 m^2 are dropped
// and counted in dropped_degenerate. Unknown keywords (vn, vt, ...) are
// skipped. Throws std::runtime_error with the offending line number on
// malformed records or out-of-range indices.
TriangleMesh load_obj(const std::string& path);
void write_obj(const TriangleMesh& mesh, const std::string& path);

// Builds a mesh directly; shared by tests and the asset-free scene builders.
TriangleMesh make_box(const Vec3& lo, const Vec3& hi, const std::string& name = "box");

struct RigidTransform {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Vec3 translation = Vec3::Zero();

    Vec3 apply(const Vec3& p) const { return rotation * p + translation; }

    static RigidTransform identity() { return {}; }
    static RigidTransform translate(const Vec3& t) { return {Eigen::Matrix3d::Identity(), t}; }

    // Row-major 3x4 matrix [R | t], the wire format used by scene configs.
    std::array<double, 12> to_row_major() const;
    static RigidTransform from_row_major(const std::array<double, 12>& m);
};

struct Aabb {
    Vec3 min = Vec3::Zero();
    Vec3 max = Vec3::Zero();

    bool contains(const Vec3& p) const {
        return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
    }
    Vec3 extent() const { return max - min; }
};

struct DynamicObject {
    TriangleMesh mesh;
    std::vector<RigidTransform> poses;  // exactly one per time step
};

struct Environment {
    std::vector<TriangleMesh> static_meshes;
    std::vector<DynamicObject> dynamic_objects;
    Aabb bounds;
    int time_steps = 1;

    // Enforces the structural invariants (pose count per dynamic object,
    // T >= 1). Static vertices outside the bounds are reported as warnings,
    // not failures. Throws std::runtime_error on violations.
    std::vector<std::string> validate() const;
};

// Faces of the scene at time step t (1-based, 1 <= t <= time_steps). Static
// faces are always included; dynamic faces are transformed by the object's
// pose at t and included iff include_dynamic is set.
std::vector<Triangle> assemble_scene(const Environment& env, int t, bool include_dynamic);

// Closed-surface check used by the point-in-mesh oracle: every undirected
// edge must have exactly two incident faces and the Euler characteristic
// must be even. Returns an empty string when watertight, else a diagnostic.
std::string watertight_error(const TriangleMesh& mesh);

// True iff the point lies inside any dynamic mesh at time step t, decided by
// crossing parity along three fixed independent ray directions (majority
// vote). Throws if a dynamic mesh is not watertight, naming the mesh.
bool point_in_dynamic(const Environment& env, int t, const Vec3& point);

}  // namespace campo
