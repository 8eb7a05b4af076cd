#pragma once

#include "campo/camera.hpp"
#include "campo/geometry.hpp"
#include "campo/objective.hpp"
#include "campo/voxel.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace campo {

enum class SolverKind { nelder_mead, pattern_search, cors_rbf };

struct SolverConfig {
    SolverKind kind = SolverKind::cors_rbf;
    int budget = 200;
    uint64_t seed = 1;
    // Either explicit points or a seeded Latin hypercube of lhs_count points,
    // materialized at solve time with the effective seed.
    std::vector<std::vector<double>> initial_points;
    int lhs_count = 0;
};

struct ScanConfig {
    int steps = 6;
    int64_t budget = 100000;
};

struct OutputConfig {
    std::string dir = "out";
    bool images = true;
    bool voxels = true;
    double depth_scale = 0.005;  // meters per 16-bit step
};

// One experiment = one config file. Mesh and weight paths are resolved
// relative to the config file's directory.
struct RunConfig {
    Environment env;
    VoxelGrid grid;
    CameraIntrinsics intrinsics;
    Domain domain;
    ObjectiveSpec objective;
    SolverConfig solver;
    ScanConfig scan;
    OutputConfig outputs;

    // JSON-visible source fields kept for serialization
    std::vector<std::string> static_mesh_paths;
    std::vector<std::string> dynamic_mesh_paths;
    std::string weight_path;
    std::string base_dir;

    std::vector<std::string> warnings;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text, const std::string& base_dir);
std::string serialize_config(const RunConfig& config);

// Latin hypercube sample of count points in the domain box, deterministic in
// the seed.
std::vector<std::vector<double>> latin_hypercube(const Domain& domain, int count, uint64_t seed);

// Initial points for the configured solver: explicit list or seeded LHS.
std::vector<std::vector<double>> materialize_initial_points(const RunConfig& config, uint64_t seed);

}  // namespace campo
