#include "campo/config.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace campo {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kConfigVersion = 1;
constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void fail(const std::string& what) { throw std::runtime_error("config: " + what); }

Vec3 vec3_of(const Json& j, const char* field) {
    if (!j.is_array() || j.size() != 3) fail(std::string(field) + " must be an array of 3 numbers");
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

Json json_of(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

std::string resolve(const std::string& base_dir, const std::string& path) {
    fs::path p(path);
    if (p.is_absolute()) return path;
    return (fs::path(base_dir) / p).string();
}

std::vector<double> read_weights(const std::string& path, size_t expected) {
    std::ifstream in(path);
    if (!in) fail("cannot open weight file " + path);
    std::vector<double> weights;
    weights.reserve(expected);
    double w;
    while (in >> w) weights.push_back(w);
    if (weights.size() != expected)
        fail("weight file " + path + " has " + std::to_string(weights.size()) + " values, expected " +
             std::to_string(expected));
    return weights;
}

DomainBlock parse_block(const Json& j) {
    DomainBlock b;
    const std::string type = j.at("type").get<std::string>();
    if (type == "full")
        b.type = BlockType::full;
    else if (type == "position_lookat")
        b.type = BlockType::position_lookat;
    else if (type == "line")
        b.type = BlockType::line;
    else
        fail("unknown camera block type '" + type + "'");

    b.lo = j.at("lo").get<std::vector<double>>();
    b.hi = j.at("hi").get<std::vector<double>>();
    if (b.type == BlockType::position_lookat) {
        b.target = vec3_of(j.at("target"), "target");
        if (j.contains("up")) b.up = vec3_of(j.at("up"), "up");
    } else if (b.type == BlockType::line) {
        b.p = vec3_of(j.at("p"), "p");
        b.q = vec3_of(j.at("q"), "q");
        if (j.contains("target")) {
            b.aim_target = vec3_of(j.at("target"), "target");
            if (j.contains("up")) b.up = vec3_of(j.at("up"), "up");
        } else {
            b.pan = j.value("pan", 0.0);
            b.tilt = j.value("tilt", 0.0);
        }
    }
    b.validate();
    return b;
}

Json block_json(const DomainBlock& b) {
    Json j;
    switch (b.type) {
        case BlockType::full: j["type"] = "full"; break;
        case BlockType::position_lookat: j["type"] = "position_lookat"; break;
        case BlockType::line: j["type"] = "line"; break;
    }
    if (b.type == BlockType::position_lookat) {
        j["target"] = json_of(b.target);
        j["up"] = json_of(b.up);
    } else if (b.type == BlockType::line) {
        j["p"] = json_of(b.p);
        j["q"] = json_of(b.q);
        if (b.aim_target) {
            j["target"] = json_of(*b.aim_target);
            j["up"] = json_of(b.up);
        } else {
            j["pan"] = b.pan;
            j["tilt"] = b.tilt;
        }
    }
    j["lo"] = b.lo;
    j["hi"] = b.hi;
    return j;
}

}  // namespace

RunConfig parse_config(const std::string& json_text, const std::string& base_dir) {
    Json j;
    try {
        j = Json::parse(json_text);
    } catch (const std::exception& e) {
        fail(std::string("invalid JSON: ") + e.what());
    }
    if (!j.contains("version") || j["version"].get<int>() != kConfigVersion)
        fail("missing or unsupported version (expected " + std::to_string(kConfigVersion) + ")");

    RunConfig c;
    c.base_dir = base_dir;

    // scene
    const Json& scene = j.at("scene");
    c.env.bounds.min = vec3_of(scene.at("bounds").at("min"), "bounds.min");
    c.env.bounds.max = vec3_of(scene.at("bounds").at("max"), "bounds.max");
    c.env.time_steps = scene.value("time_steps", 1);
    if (scene.contains("static_meshes")) {
        for (const auto& m : scene["static_meshes"]) {
            const std::string path = m.get<std::string>();
            c.static_mesh_paths.push_back(path);
            c.env.static_meshes.push_back(load_obj(resolve(base_dir, path)));
            c.env.static_meshes.back().name = path;
        }
    }
    if (scene.contains("dynamic_objects")) {
        for (const auto& d : scene["dynamic_objects"]) {
            const std::string path = d.at("mesh").get<std::string>();
            c.dynamic_mesh_paths.push_back(path);
            DynamicObject obj;
            obj.mesh = load_obj(resolve(base_dir, path));
            obj.mesh.name = path;
            for (const auto& pose : d.at("poses")) {
                if (!pose.is_array() || pose.size() != 12)
                    fail("dynamic pose must be a 3x4 row-major array of 12 numbers");
                std::array<double, 12> m;
                for (int i = 0; i < 12; ++i) m[i] = pose[i].get<double>();
                obj.poses.push_back(RigidTransform::from_row_major(m));
            }
            c.env.dynamic_objects.push_back(std::move(obj));
        }
    }
    c.warnings = c.env.validate();

    // grid
    const Json& grid = j.at("grid");
    c.grid.origin = vec3_of(grid.at("origin"), "grid.origin");
    c.grid.cell = vec3_of(grid.at("cell_size"), "grid.cell_size");
    const auto res = grid.at("resolution");
    if (!res.is_array() || res.size() != 3) fail("grid.resolution must be [nx, ny, nz]");
    c.grid.nx = res[0].get<int>();
    c.grid.ny = res[1].get<int>();
    c.grid.nz = res[2].get<int>();
    if (grid.contains("weights")) {
        c.weight_path = grid["weights"].get<std::string>();
        c.grid.weights = read_weights(resolve(base_dir, c.weight_path), c.grid.count());
    }
    c.grid.validate(&c.env.bounds);

    // cameras
    const Json& cameras = j.at("cameras");
    if (cameras.contains("intrinsics")) {
        const Json& intr = cameras["intrinsics"];
        c.intrinsics.width = intr.value("width", 320);
        c.intrinsics.height = intr.value("height", 240);
        c.intrinsics.hfov = intr.value("hfov_deg", 90.0) * kPi / 180.0;
        c.intrinsics.near_plane = intr.value("near", 0.05);
    }
    c.intrinsics.validate();
    for (const auto& b : cameras.at("blocks")) c.domain.blocks.push_back(parse_block(b));
    c.domain.validate();

    // objective
    const Json& obj = j.at("objective");
    const std::string mode = obj.at("mode").get<std::string>();
    if (mode == "max_coverage")
        c.objective.mode = ObjectiveMode::max_coverage;
    else if (mode == "min_hull_error")
        c.objective.mode = ObjectiveMode::min_hull_error;
    else
        fail("objective.mode must be max_coverage or min_hull_error");
    c.objective.overlap = obj.at("overlap").get<int>();
    const std::string agg = obj.value("aggregate", "sum");
    if (agg == "sum")
        c.objective.aggregate = TimeAggregate::sum;
    else if (agg == "max")
        c.objective.aggregate = TimeAggregate::max;
    else
        fail("objective.aggregate must be sum or max");
    c.objective.depth_slack = obj.value("depth_slack", 0.0);
    c.objective.conservative = obj.value("conservative", false);
    c.objective.validate(c.domain.camera_count());

    // solver
    if (j.contains("solver")) {
        const Json& sol = j["solver"];
        const std::string name = sol.value("name", "cors_rbf");
        if (name == "nelder_mead")
            c.solver.kind = SolverKind::nelder_mead;
        else if (name == "pattern_search")
            c.solver.kind = SolverKind::pattern_search;
        else if (name == "cors_rbf")
            c.solver.kind = SolverKind::cors_rbf;
        else
            fail("solver.name must be nelder_mead, pattern_search or cors_rbf");
        c.solver.budget = sol.value("budget", 200);
        c.solver.seed = sol.value("seed", static_cast<uint64_t>(1));
        if (sol.contains("initial_points")) {
            const Json& ip = sol["initial_points"];
            if (ip.is_number_integer()) {
                c.solver.lhs_count = ip.get<int>();
            } else if (ip.is_array()) {
                for (const auto& p : ip) {
                    std::vector<double> x = p.get<std::vector<double>>();
                    if (static_cast<int>(x.size()) != c.domain.dim())
                        fail("initial point dimension " + std::to_string(x.size()) +
                             " does not match domain dimension " + std::to_string(c.domain.dim()));
                    c.solver.initial_points.push_back(std::move(x));
                }
            } else {
                fail("solver.initial_points must be a point array or a count");
            }
        }
    }

    // scan
    if (j.contains("scan")) {
        c.scan.steps = j["scan"].value("steps", 6);
        c.scan.budget = j["scan"].value("budget", static_cast<int64_t>(100000));
    }

    // outputs
    if (j.contains("outputs")) {
        const Json& out = j["outputs"];
        c.outputs.dir = out.value("dir", "out");
        c.outputs.images = out.value("images", true);
        c.outputs.voxels = out.value("voxels", true);
        c.outputs.depth_scale = out.value("depth_scale", 0.005);
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), fs::path(path).parent_path().string());
}

std::string serialize_config(const RunConfig& c) {
    Json j;
    j["version"] = kConfigVersion;

    Json scene;
    scene["bounds"] = {{"min", json_of(c.env.bounds.min)}, {"max", json_of(c.env.bounds.max)}};
    scene["time_steps"] = c.env.time_steps;
    scene["static_meshes"] = c.static_mesh_paths;
    Json dyn = Json::array();
    for (size_t i = 0; i < c.env.dynamic_objects.size(); ++i) {
        Json d;
        d["mesh"] = c.dynamic_mesh_paths[i];
        Json poses = Json::array();
        for (const auto& p : c.env.dynamic_objects[i].poses) {
            const auto m = p.to_row_major();
            poses.push_back(std::vector<double>(m.begin(), m.end()));
        }
        d["poses"] = poses;
        dyn.push_back(d);
    }
    scene["dynamic_objects"] = dyn;
    j["scene"] = scene;

    Json grid;
    grid["origin"] = json_of(c.grid.origin);
    grid["cell_size"] = json_of(c.grid.cell);
    grid["resolution"] = Json::array({c.grid.nx, c.grid.ny, c.grid.nz});
    if (!c.weight_path.empty()) grid["weights"] = c.weight_path;
    j["grid"] = grid;

    Json cameras;
    cameras["intrinsics"] = {{"width", c.intrinsics.width},
                             {"height", c.intrinsics.height},
                             {"hfov_deg", c.intrinsics.hfov * 180.0 / kPi},
                             {"near", c.intrinsics.near_plane}};
    Json blocks = Json::array();
    for (const auto& b : c.domain.blocks) blocks.push_back(block_json(b));
    cameras["blocks"] = blocks;
    j["cameras"] = cameras;

    Json obj;
    obj["mode"] = c.objective.mode == ObjectiveMode::max_coverage ? "max_coverage" : "min_hull_error";
    obj["overlap"] = c.objective.overlap;
    obj["aggregate"] = c.objective.aggregate == TimeAggregate::sum ? "sum" : "max";
    obj["depth_slack"] = c.objective.depth_slack;
    obj["conservative"] = c.objective.conservative;
    j["objective"] = obj;

    Json sol;
    switch (c.solver.kind) {
        case SolverKind::nelder_mead: sol["name"] = "nelder_mead"; break;
        case SolverKind::pattern_search: sol["name"] = "pattern_search"; break;
        case SolverKind::cors_rbf: sol["name"] = "cors_rbf"; break;
    }
    sol["budget"] = c.solver.budget;
    sol["seed"] = c.solver.seed;
    if (c.solver.lhs_count > 0)
        sol["initial_points"] = c.solver.lhs_count;
    else if (!c.solver.initial_points.empty())
        sol["initial_points"] = c.solver.initial_points;
    j["solver"] = sol;

    j["scan"] = {{"steps", c.scan.steps}, {"budget", c.scan.budget}};
    j["outputs"] = {{"dir", c.outputs.dir},
                    {"images", c.outputs.images},
                    {"voxels", c.outputs.voxels},
                    {"depth_scale", c.outputs.depth_scale}};
    return j.dump(2) + "\n";
}

std::vector<std::vector<double>> latin_hypercube(const Domain& domain, int count, uint64_t seed) {
    if (count < 1) throw std::invalid_argument("latin_hypercube: count must be >= 1");
    const int n = domain.dim();
    const std::vector<double> lo = domain.lower();
    const std::vector<double> hi = domain.upper();
    std::mt19937_64 gen(seed ^ 0x9e3779b97f4a7c15ull);
    auto uniform = [&] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };

    std::vector<std::vector<double>> points(count, std::vector<double>(n));
    std::vector<int> strata(count);
    for (int d = 0; d < n; ++d) {
        for (int i = 0; i < count; ++i) strata[i] = i;
        for (int i = count - 1; i > 0; --i) {
            const int k = static_cast<int>(uniform() * (i + 1));
            std::swap(strata[i], strata[std::min(k, i)]);
        }
        for (int i = 0; i < count; ++i)
            points[i][d] = lo[d] + (hi[d] - lo[d]) * (strata[i] + uniform()) / count;
    }
    return points;
}

std::vector<std::vector<double>> materialize_initial_points(const RunConfig& config, uint64_t seed) {
    if (!config.solver.initial_points.empty()) return config.solver.initial_points;
    const int count = config.solver.lhs_count > 0 ? config.solver.lhs_count : config.domain.dim() + 1;
    return latin_hypercube(config.domain, count, seed);
}

}  // namespace campo
