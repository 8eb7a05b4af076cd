#pragma once

#include "campo/camera.hpp"
#include "campo/render.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace campo {

// Axis-aligned voxel grid discretizing the workspace. Voxels are indexed
// (ix, iy, iz), 0-based, linearized x-fastest.
struct VoxelGrid {
    Vec3 origin = Vec3::Zero();
    Vec3 cell = Vec3::Ones();  // cell size per axis, meters
    int nx = 0, ny = 0, nz = 0;
    std::vector<double> weights;  // optional, size count() when present

    size_t count() const { return static_cast<size_t>(nx) * ny * nz; }
    double cell_volume() const { return cell.x() * cell.y() * cell.z(); }

    size_t index(int ix, int iy, int iz) const {
        return (static_cast<size_t>(iz) * ny + iy) * nx + ix;
    }
    Vec3 center(int ix, int iy, int iz) const {
        return origin + Vec3((ix + 0.5) * cell.x(), (iy + 0.5) * cell.y(), (iz + 0.5) * cell.z());
    }
    Vec3 corner(int ix, int iy, int iz) const {
        return origin + Vec3(ix * cell.x(), iy * cell.y(), iz * cell.z());
    }

    void validate(const Aabb* bounds = nullptr) const;
};

// Attribute codes. Coverage mode uses {undetectable, detectable}; hull mode
// the four-way partition. Codes are the VOXA wire values.
enum : uint8_t {
    kCovUndetectable = 0,
    kCovDetectable = 1,
};
enum : uint8_t {
    kHullOutside = 0,
    kHullOccluded = 1,
    kHullChanged = 2,
    kHullIdentical = 3,
};

enum class FieldMode : uint8_t { coverage, hull };

struct AttributeField {
    FieldMode mode = FieldMode::coverage;
    std::vector<uint8_t> labels;  // one byte per voxel, x-fastest
};

// Bitmask over attribute codes 0..7; the label predicate of combine().
struct LabelSet {
    uint8_t mask = 0;

    constexpr LabelSet() = default;
    constexpr explicit LabelSet(std::initializer_list<uint8_t> codes) {
        for (uint8_t c : codes) mask |= static_cast<uint8_t>(1u << c);
    }
    constexpr bool contains(uint8_t code) const { return (mask >> code) & 1u; }
    constexpr LabelSet complement() const {
        LabelSet s;
        s.mask = static_cast<uint8_t>(~mask);
        return s;
    }

    static LabelSet detectable() { return LabelSet{kCovDetectable}; }
    // The conservative hull membership sigma_Ed: everything but identical.
    static LabelSet changed_or_undetectable() {
        return LabelSet{kHullOutside, kHullOccluded, kHullChanged};
    }
    static LabelSet identical() { return LabelSet{kHullIdentical}; }
};

struct ColoringOptions {
    double depth_slack = 0.0;  // epsilon added to the stored pixel distance
    bool conservative = false;  // project all 8 corners instead of the center
};

// Labels every voxel from a single camera against the static depth image:
// outside the frustum or occluded -> undetectable, else detectable. No-hit
// pixels never occlude. In conservative mode a voxel is detectable only if
// all eight corners are.
AttributeField color_coverage(const VoxelGrid& grid, const CameraPose& pose,
                              const CameraIntrinsics& intr, const DepthImage& static_depth,
                              const ColoringOptions& opts = {});

// Four-way hull labels: outside, occluded (both from the static image),
// changed (projects to foreground), identical. Conservative mode labels a
// voxel with the strongest hull-membership attribute any corner attains
// (changed > occluded > outside > identical).
AttributeField color_hull(const VoxelGrid& grid, const CameraPose& pose,
                          const CameraIntrinsics& intr, const DepthImage& static_depth,
                          const SegmentedImage& seg, const ColoringOptions& opts = {});

// Per-voxel count of fields whose label is in the selector. Membership at
// overlap threshold k is count >= k, which equals the union of k-wise
// intersections without enumerating combinations.
struct MultiView {
    int num_fields = 0;
    std::vector<uint8_t> counts;

    bool member(size_t voxel, int k) const { return counts[voxel] >= k; }
    size_t member_count(int k) const;
};

MultiView combine(const std::vector<AttributeField>& fields, LabelSet selector, int k);

// Verifies C_k^{color} == A \ C_{M-(k-1)}^{not color} by direct set
// comparison over all voxels.
bool complement_identity_check(const std::vector<AttributeField>& fields, LabelSet color, int k);

// Counts members at threshold k, or sums their weights when given.
double measure(const MultiView& view, int k, const std::vector<double>* weights = nullptr);
double measure_volume(const MultiView& view, int k, const VoxelGrid& grid);

// "VOXA v1 <nx> <ny> <nz> <origin xyz> <cell xyz>" header line followed by
// one label byte per voxel, x-fastest.
void write_voxa(const AttributeField& field, const VoxelGrid& grid, const std::string& path);
void write_voxa(const MultiView& view, int k, const VoxelGrid& grid, const std::string& path);
AttributeField read_voxa(const std::string& path, VoxelGrid& grid_out);

}  // namespace campo
