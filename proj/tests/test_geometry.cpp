#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "campo/facetree.hpp"
#include "campo/geometry.hpp"
#include "testutil.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

using namespace campo;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path.string();
}

}  // namespace

TEST_CASE("load_obj parses a unit cube") {
    const char* cube =
        "# unit cube\n"
        "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\nv 0 0 1\nv 1 0 1\nv 0 1 1\nv 1 1 1\n"
        "f 1 2 4 3\nf 5 7 8 6\nf 1 5 6 2\nf 3 4 8 7\nf 1 3 7 5\nf 2 6 8 4\n";
    const auto path = write_temp("campo_cube.obj", cube);
    const TriangleMesh mesh = load_obj(path);
    CHECK(mesh.vertices.size() == 8);
    CHECK(mesh.faces.size() == 12);  // six quads fan-triangulated
    CHECK(mesh.dropped_degenerate == 0);
}

TEST_CASE("load_obj fan-triangulates quads in order") {
    const auto path = write_temp("campo_quad.obj", "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
    const TriangleMesh mesh = load_obj(path);
    REQUIRE(mesh.faces.size() == 2);
    CHECK(mesh.faces[0] == std::array<int, 3>{0, 1, 2});
    CHECK(mesh.faces[1] == std::array<int, 3>{0, 2, 3});
}

TEST_CASE("load_obj rejects out-of-range indices with the face line") {
    const auto path = write_temp("campo_bad.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 99\n");
    CHECK_THROWS_WITH_AS(load_obj(path), doctest::Contains("99"), std::runtime_error);
}

TEST_CASE("load_obj reports malformed records with line numbers") {
    const auto path = write_temp("campo_malformed.obj", "v 0 0 0\nv 1 0\n");
    CHECK_THROWS_WITH_AS(load_obj(path), doctest::Contains(":2"), std::runtime_error);
}

TEST_CASE("load_obj drops and counts degenerate faces") {
    const auto path =
        write_temp("campo_degen.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\nf 1 1 2\nf 1 2 2\n");
    const TriangleMesh mesh = load_obj(path);
    CHECK(mesh.faces.size() == 1);
    CHECK(mesh.dropped_degenerate == 2);
}

TEST_CASE("obj round-trip preserves coordinates and faces") {
    std::mt19937_64 gen(7);
    TriangleMesh mesh = make_box({0, 0, 0}, {1, 1, 1});
    for (auto& v : mesh.vertices)
        v += Vec3(testutil::uniform(gen, -0.3, 0.3), testutil::uniform(gen, -0.3, 0.3),
                  testutil::uniform(gen, -0.3, 0.3));
    const auto path = (std::filesystem::temp_directory_path() / "campo_roundtrip.obj").string();
    write_obj(mesh, path);
    const TriangleMesh back = load_obj(path);
    REQUIRE(back.vertices.size() == mesh.vertices.size());
    REQUIRE(back.faces == mesh.faces);
    for (size_t i = 0; i < mesh.vertices.size(); ++i)
        CHECK((back.vertices[i] - mesh.vertices[i]).norm() < 1e-9);
}

TEST_CASE("assemble_scene respects the dynamic flag and poses") {
    Environment env;
    env.static_meshes.push_back(make_box({0, 0, 0}, {1, 1, 1}, "static"));
    DynamicObject obj;
    obj.mesh = make_box({0, 0, 0}, {1, 1, 1}, "dynamic");
    obj.poses = {RigidTransform::identity(), RigidTransform::translate({1, 0, 0})};
    env.dynamic_objects.push_back(obj);
    env.time_steps = 2;
    env.bounds = {{-5, -5, -5}, {5, 5, 5}};
    env.validate();

    CHECK(assemble_scene(env, 1, false).size() == 12);
    CHECK(assemble_scene(env, 2, false).size() == 12);

    const auto both = assemble_scene(env, 1, true);
    REQUIRE(both.size() == 24);
    // identity pose: dynamic faces coincide with the static ones
    CHECK((both[12].a - both[0].a).norm() == 0.0);

    const auto moved = assemble_scene(env, 2, true);
    CHECK((moved[12].a - (both[12].a + Vec3(1, 0, 0))).norm() < 1e-15);

    CHECK_THROWS_AS(assemble_scene(env, 0, true), std::runtime_error);
    CHECK_THROWS_AS(assemble_scene(env, 3, true), std::runtime_error);
}

TEST_CASE("environment validation") {
    Environment env;
    env.static_meshes.push_back(make_box({0, 0, 0}, {1, 1, 1}));
    env.bounds = {{-1, -1, -1}, {2, 2, 2}};
    env.time_steps = 2;
    DynamicObject obj;
    obj.mesh = make_box({0, 0, 0}, {1, 1, 1});
    obj.poses = {RigidTransform::identity()};  // one pose, two steps
    env.dynamic_objects.push_back(obj);
    CHECK_THROWS_AS(env.validate(), std::runtime_error);

    env.dynamic_objects[0].poses.push_back(RigidTransform::identity());
    CHECK(env.validate().empty());

    env.bounds = {{0.5, 0.5, 0.5}, {2, 2, 2}};  // static vertices stick out: warn only
    CHECK_FALSE(env.validate().empty());
}

TEST_CASE("ray_visible basics") {
    CHECK(ray_visible({0, 0, 0}, {1, 0, 0}, std::vector<Triangle>{}));

    // unit square in the plane x = 0.5 centered on the segment
    std::vector<Triangle> wall;
    wall.push_back({{0.5, -0.5, -0.5}, {0.5, 0.5, -0.5}, {0.5, 0.5, 0.5}});
    wall.push_back({{0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}, {0.5, -0.5, 0.5}});
    CHECK_FALSE(ray_visible({0, 0, 0}, {1, 0, 0}, wall));

    // grazing along the face plane but outside the triangles
    CHECK(ray_visible({0.5, 2.0, -1.0}, {0.5, 2.0, 1.0}, wall));

    // endpoints on the surface do not block (open segment)
    CHECK(ray_visible({0, 0, 0}, {0.5, 0, 0}, wall));
}

TEST_CASE("ray_visible is symmetric in origin and target") {
    const auto faces = testutil::wall_with_door(2.0);
    FaceTree tree(faces);
    std::mt19937_64 gen(11);
    for (int i = 0; i < 200; ++i) {
        const Vec3 a = testutil::random_point(gen, {-1, -6, -1}, {5, 6, 5});
        const Vec3 b = testutil::random_point(gen, {-1, -6, -1}, {5, 6, 5});
        if ((a - b).norm() < 1e-9) continue;
        CHECK(ray_visible(a, b, tree) == ray_visible(b, a, tree));
    }
}

TEST_CASE("face tree traversal matches brute force on random segments") {
    auto faces = testutil::open_room();
    const auto wall = testutil::wall_with_door(5.0);
    faces.insert(faces.end(), wall.begin(), wall.end());
    FaceTree tree(faces);

    std::mt19937_64 gen(13);
    for (int s = 0; s < 100; ++s) {
        const Vec3 a = testutil::random_point(gen, {-1, -6, -1}, {11, 6, 5});
        const Vec3 b = testutil::random_point(gen, {-1, -6, -1}, {11, 6, 5});
        if ((a - b).norm() < 1e-9) continue;

        std::vector<int> brute;
        WatertightRay ray(a, b - a);
        for (size_t f = 0; f < faces.size(); ++f) {
            if (auto t = ray.hit(faces[f]); t && *t > 0.0 && *t < 1.0)
                brute.push_back(static_cast<int>(f));
        }
        CHECK(tree.segment_hits(a, b) == brute);
    }
}

TEST_CASE("watertight check flags open meshes") {
    TriangleMesh box = make_box({0, 0, 0}, {1, 1, 1});
    CHECK(watertight_error(box).empty());
    box.faces.pop_back();
    CHECK_FALSE(watertight_error(box).empty());
}

TEST_CASE("point_in_dynamic classifies cube interior and exterior") {
    Environment env;
    env.bounds = {{-10, -10, -10}, {10, 10, 10}};
    DynamicObject obj;
    obj.mesh = make_box({0, 0, 0}, {1, 1, 1}, "cube");
    obj.poses = {RigidTransform::identity()};
    env.dynamic_objects.push_back(obj);

    CHECK(point_in_dynamic(env, 1, {0.5, 0.5, 0.5}));
    CHECK_FALSE(point_in_dynamic(env, 1, {5, 5, 5}));
    CHECK_FALSE(point_in_dynamic(env, 1, {-0.01, 0.5, 0.5}));
}

TEST_CASE("point_in_dynamic agrees with per-direction parity majority") {
    Environment env;
    env.bounds = {{-10, -10, -10}, {10, 10, 10}};
    DynamicObject obj;
    obj.mesh = make_box({-0.73, -0.41, -0.57}, {0.62, 0.77, 0.49}, "cube");
    obj.poses = {RigidTransform::identity()};
    env.dynamic_objects.push_back(obj);

    std::vector<Triangle> faces;
    testutil::append_faces(faces, obj.mesh);
    FaceTree tree(faces);

    std::mt19937_64 gen(17);
    for (int i = 0; i < 300; ++i) {
        const Vec3 p = testutil::random_point(gen, {-1.5, -1.5, -1.5}, {1.5, 1.5, 1.5});
        int votes = 0;
        for (const Vec3& dir : {Vec3(0.912, 0.371, 0.174), Vec3(-0.297, 0.811, 0.503),
                                Vec3(0.151, -0.562, 0.813)})
            if (tree.count_crossings(p, dir) % 2 == 1) ++votes;
        CHECK(point_in_dynamic(env, 1, p) == (votes >= 2));
    }
}

TEST_CASE("point_in_dynamic rejects non-watertight meshes by name") {
    Environment env;
    env.bounds = {{-10, -10, -10}, {10, 10, 10}};
    DynamicObject obj;
    obj.mesh = make_box({0, 0, 0}, {1, 1, 1}, "leaky");
    obj.mesh.faces.pop_back();
    obj.poses = {RigidTransform::identity()};
    env.dynamic_objects.push_back(obj);
    CHECK_THROWS_WITH_AS(point_in_dynamic(env, 1, {0.5, 0.5, 0.5}), doctest::Contains("leaky"),
                         std::runtime_error);
}
