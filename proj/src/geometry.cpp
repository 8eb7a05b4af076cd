#include "campo/geometry.hpp"

#include "campo/facetree.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace campo {

namespace {

constexpr double kDegenerateArea = 1e-12;  // m^2

[[noreturn]] void parse_fail(const std::string& path, int line, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

TriangleMesh load_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open OBJ file: " + path);

    TriangleMesh mesh;
    mesh.name = path;
    std::string line;
    int lineno = 0;
    std::vector<std::array<int, 3>> raw_faces;
    std::vector<int> raw_face_line;

    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(line);
        std::string key;
        if (!(ss >> key) || key[0] == '#') continue;

        if (key == "v") {
            double x, y, z;
            if (!(ss >> x >> y >> z)) parse_fail(path, lineno, "malformed vertex record");
            if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z))
                parse_fail(path, lineno, "non-finite vertex coordinate");
            mesh.vertices.emplace_back(x, y, z);
        } else if (key == "f") {
            std::vector<int> idx;
            std::string tok;
            while (ss >> tok) {
                // "i", "i/t", "i//n", "i/t/n": the vertex index leads
                size_t slash = tok.find('/');
                std::string head = slash == std::string::npos ? tok : tok.substr(0, slash);
                int v = 0;
                try {
                    size_t used = 0;
                    v = std::stoi(head, &used);
                    if (used != head.size()) throw std::invalid_argument(head);
                } catch (const std::exception&) {
                    parse_fail(path, lineno, "malformed face index '" + tok + "'");
                }
                if (v < 0)
                    v = static_cast<int>(mesh.vertices.size()) + v;  // relative index
                else
                    v -= 1;  // OBJ is 1-based
                idx.push_back(v);
            }
            if (idx.size() < 3) parse_fail(path, lineno, "face with fewer than 3 vertices");
            // fan triangulation: (0,1,2), (0,2,3), ...
            for (size_t i = 1; i + 1 < idx.size(); ++i) {
                raw_faces.push_back({idx[0], idx[static_cast<int>(i)], idx[i + 1]});
                raw_face_line.push_back(lineno);
            }
        }
        // other keywords (vn, vt, o, g, s, usemtl, mtllib, ...) are ignored
    }

    const int vcount = static_cast<int>(mesh.vertices.size());
    for (size_t f = 0; f < raw_faces.size(); ++f) {
        for (int v : raw_faces[f]) {
            if (v < 0 || v >= vcount)
                parse_fail(path, raw_face_line[f],
                           "face references vertex " + std::to_string(v + 1) + " of " +
                               std::to_string(vcount));
        }
        Triangle t{mesh.vertices[raw_faces[f][0]], mesh.vertices[raw_faces[f][1]],
                   mesh.vertices[raw_faces[f][2]]};
        if (t.area() < kDegenerateArea) {
            ++mesh.dropped_degenerate;
            continue;
        }
        mesh.faces.push_back(raw_faces[f]);
    }
    return mesh;
}

void write_obj(const TriangleMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write OBJ file: " + path);
    char buf[128];
    for (const auto& v : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", v.x(), v.y(), v.z());
        out << buf;
    }
    for (const auto& f : mesh.faces) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

TriangleMesh make_box(const Vec3& lo, const Vec3& hi, const std::string& name) {
    TriangleMesh m;
    m.name = name;
    for (int i = 0; i < 8; ++i)
        m.vertices.emplace_back(i & 1 ? hi.x() : lo.x(), i & 2 ? hi.y() : lo.y(),
                                i & 4 ? hi.z() : lo.z());
    // outward-oriented quads, each split into two triangles
    const int quads[6][4] = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4},
                             {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
    for (const auto& q : quads) {
        m.faces.push_back({q[0], q[1], q[2]});
        m.faces.push_back({q[0], q[2], q[3]});
    }
    return m;
}

std::array<double, 12> RigidTransform::to_row_major() const {
    std::array<double, 12> m{};
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) m[r * 4 + c] = rotation(r, c);
        m[r * 4 + 3] = translation[r];
    }
    return m;
}

RigidTransform RigidTransform::from_row_major(const std::array<double, 12>& m) {
    RigidTransform t;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) t.rotation(r, c) = m[r * 4 + c];
        t.translation[r] = m[r * 4 + 3];
    }
    return t;
}

std::vector<std::string> Environment::validate() const {
    if (time_steps < 1) throw std::runtime_error("environment: time_steps must be >= 1");
    for (const auto& d : dynamic_objects) {
        if (static_cast<int>(d.poses.size()) != time_steps)
            throw std::runtime_error("environment: dynamic object '" + d.mesh.name + "' has " +
                                     std::to_string(d.poses.size()) + " poses, expected " +
                                     std::to_string(time_steps));
    }
    std::vector<std::string> warnings;
    for (const auto& m : static_meshes) {
        for (const auto& v : m.vertices) {
            if (!bounds.contains(v)) {
                warnings.push_back("static mesh '" + m.name + "' has vertices outside bounds");
                break;
            }
        }
    }
    return warnings;
}

std::vector<Triangle> assemble_scene(const Environment& env, int t, bool include_dynamic) {
    if (t < 1 || t > env.time_steps)
        throw std::runtime_error("time step " + std::to_string(t) + " out of range [1, " +
                                 std::to_string(env.time_steps) + "]");
    std::vector<Triangle> faces;
    size_t total = 0;
    for (const auto& m : env.static_meshes) total += m.faces.size();
    if (include_dynamic)
        for (const auto& d : env.dynamic_objects) total += d.mesh.faces.size();
    faces.reserve(total);

    for (const auto& m : env.static_meshes)
        for (size_t f = 0; f < m.faces.size(); ++f) faces.push_back(m.face_triangle(static_cast<int>(f)));

    if (include_dynamic) {
        for (const auto& d : env.dynamic_objects) {
            const RigidTransform& pose = d.poses[t - 1];
            for (const auto& idx : d.mesh.faces)
                faces.push_back({pose.apply(d.mesh.vertices[idx[0]]),
                                 pose.apply(d.mesh.vertices[idx[1]]),
                                 pose.apply(d.mesh.vertices[idx[2]])});
        }
    }
    return faces;
}

std::string watertight_error(const TriangleMesh& mesh) {
    if (mesh.faces.empty()) return "mesh has no faces";
    std::map<std::pair<int, int>, int> edge_count;
    std::set<int> used;
    for (const auto& f : mesh.faces) {
        for (int e = 0; e < 3; ++e) {
            int a = f[e], b = f[(e + 1) % 3];
            used.insert(a);
            if (a > b) std::swap(a, b);
            ++edge_count[{a, b}];
        }
    }
    for (const auto& [edge, count] : edge_count) {
        if (count != 2)
            return "edge (" + std::to_string(edge.first) + "," + std::to_string(edge.second) +
                   ") has " + std::to_string(count) + " incident faces";
    }
    const long chi = static_cast<long>(used.size()) - static_cast<long>(edge_count.size()) +
                     static_cast<long>(mesh.faces.size());
    if (chi % 2 != 0) return "odd Euler characteristic " + std::to_string(chi);
    return {};
}

bool point_in_dynamic(const Environment& env, int t, const Vec3& point) {
    if (t < 1 || t > env.time_steps)
        throw std::runtime_error("time step " + std::to_string(t) + " out of range");
    // Fixed irrational-leaning directions so lattice-aligned geometry rarely
    // produces edge-grazing rays; parity is taken by majority vote.
    static const Vec3 dirs[3] = {Vec3(0.57361236698, 0.33282923402, 0.74846328241),
                                 Vec3(-0.31287642058, 0.83112358317, -0.45963618246),
                                 Vec3(0.76412893561, -0.52436754191, -0.37570921783)};
    for (const auto& d : env.dynamic_objects) {
        if (auto err = watertight_error(d.mesh); !err.empty())
            throw std::runtime_error("dynamic mesh '" + d.mesh.name + "' is not watertight: " + err);
        const RigidTransform& pose = d.poses[t - 1];
        std::vector<Triangle> faces;
        faces.reserve(d.mesh.faces.size());
        for (const auto& idx : d.mesh.faces)
            faces.push_back({pose.apply(d.mesh.vertices[idx[0]]), pose.apply(d.mesh.vertices[idx[1]]),
                             pose.apply(d.mesh.vertices[idx[2]])});
        FaceTree tree(std::move(faces));
        int votes = 0;
        for (const auto& dir : dirs)
            if (tree.count_crossings(point, dir) % 2 == 1) ++votes;
        if (votes >= 2) return true;
    }
    return false;
}

}  // namespace campo
