#pragma once

#include "campo/camera.hpp"
#include "campo/geometry.hpp"
#include "campo/render.hpp"
#include "campo/voxel.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace campo {

// One camera's slice of the optimization domain.
//   full:            (x, y, z, pan, tilt)
//   position_lookat: (x, y, z), orientation from look_at(target, up)
//   line:            scalar u, position = p + u * (q - p), fixed orientation
enum class BlockType { full, position_lookat, line };

struct DomainBlock {
    BlockType type = BlockType::full;
    std::vector<double> lo, hi;  // box bounds per scalar

    // position_lookat
    Vec3 target = Vec3::Zero();
    Vec3 up = Vec3::UnitY();

    // line: pose at u=0 is p, at u=1 is q; orientation fixed by pan/tilt or,
    // when aim_target is set, by look_at.
    Vec3 p = Vec3::Zero(), q = Vec3::UnitX();
    double pan = 0.0, tilt = 0.0;
    std::optional<Vec3> aim_target;

    int dim() const;
    void validate() const;
};

struct Domain {
    std::vector<DomainBlock> blocks;

    int dim() const;
    int camera_count() const { return static_cast<int>(blocks.size()); }
    std::vector<double> lower() const;
    std::vector<double> upper() const;
    double diagonal() const;
    void validate() const;
};

// Thrown when a variable vector leaves its box; names the scalar.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<CameraPose> poses_from_vector(const Domain& domain, std::span<const double> x);

// Inverse of poses_from_vector for full blocks (identity on the block's
// scalars); used by tests and by pose reporting.
std::vector<double> vector_from_poses(const Domain& domain, const std::vector<CameraPose>& poses);

enum class ObjectiveMode { max_coverage, min_hull_error };
enum class TimeAggregate { sum, max };

struct ObjectiveSpec {
    ObjectiveMode mode = ObjectiveMode::max_coverage;
    int overlap = 1;  // k for coverage, kappa for the hull
    TimeAggregate aggregate = TimeAggregate::sum;
    double depth_slack = 0.0;
    bool conservative = false;

    void validate(int camera_count) const;
};

// Per-camera artifacts of one evaluation, for dumps and inspection.
struct EvaluationDetail {
    double value = 0.0;
    std::vector<DepthImage> static_depth;              // per camera
    std::vector<std::vector<AttributeField>> fields;   // [time step][camera]
    std::vector<MultiView> views;                      // per time step
};

// Assembles f_k over a variable vector. Scene data is frozen at construction;
// evaluate() is a pure function of x. Static faces are assembled once and the
// per-camera static depth image is shared across time steps; dynamic images
// are re-rendered per step in hull mode.
class Evaluator {
public:
    Evaluator(const Environment& env, VoxelGrid grid, CameraIntrinsics intr, Domain domain,
              ObjectiveSpec spec);

    // Raw objective: coverage measure (to maximize) or hull-error measure
    // (to minimize).
    double evaluate(std::span<const double> x) const;

    // Maximization convention shared by every solver: negates hull error.
    double solver_value(std::span<const double> x) const;

    EvaluationDetail evaluate_detail(std::span<const double> x) const;

    const Domain& domain() const { return domain_; }
    const ObjectiveSpec& spec() const { return spec_; }
    const VoxelGrid& grid() const { return grid_; }
    const CameraIntrinsics& intrinsics() const { return intr_; }
    int time_steps() const { return time_steps_; }

private:
    double run(std::span<const double> x, EvaluationDetail* detail) const;

    VoxelGrid grid_;
    CameraIntrinsics intr_;
    Domain domain_;
    ObjectiveSpec spec_;
    int time_steps_ = 1;
    std::vector<Triangle> static_faces_;
    std::vector<std::vector<Triangle>> faces_with_dynamic_;  // per time step
};

struct ScanRow {
    std::vector<double> x;
    double value = 0.0;
    double millis = 0.0;
};

struct ScanResult {
    std::vector<ScanRow> rows;
    size_t best_index = 0;
};

// Exhaustive evaluation on the Cartesian lattice of per-scalar linspaces
// (steps points per scalar, bounds included), emitted in row-major order
// (last scalar fastest). Refuses when steps^n exceeds budget.
ScanResult grid_scan(const Evaluator& eval, int steps, int64_t budget);

void write_scan_csv(const ScanResult& scan, const std::string& path);

}  // namespace campo
