#include "campo/voxel.hpp"

#include "campo/parallel.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace campo {

void VoxelGrid::validate(const Aabb* bounds) const {
    if (nx <= 0 || ny <= 0 || nz <= 0) throw std::invalid_argument("voxel grid: resolution must be positive");
    if (!(cell.array() > 0.0).all()) throw std::invalid_argument("voxel grid: cell sizes must be positive");
    if (!weights.empty()) {
        if (weights.size() != count())
            throw std::invalid_argument("voxel grid: weight field size does not match resolution");
        for (double w : weights)
            if (!std::isfinite(w) || w < 0.0)
                throw std::invalid_argument("voxel grid: weights must be finite and nonnegative");
    }
    if (bounds) {
        const Vec3 hi = origin + Vec3(nx * cell.x(), ny * cell.y(), nz * cell.z());
        constexpr double tol = 1e-9;
        if ((origin.array() < bounds->min.array() - tol).any() ||
            (hi.array() > bounds->max.array() + tol).any())
            throw std::invalid_argument("voxel grid: grid box exceeds environment bounds");
    }
}

namespace {

enum class PointClass : uint8_t { outside, occluded, visible };

inline PointClass classify(const Vec3& y, const CameraPose& pose, const CameraIntrinsics& intr,
                           const DepthImage& depth, double slack) {
    const Projection pr = project(pose, intr, y);
    if (!pr.in_front) return PointClass::outside;
    const PixelIndex px = pixel_of(intr, pr.u, pr.v);
    if (px.outside) return PointClass::outside;
    if (pr.distance > depth.at(px.x, px.y) + slack) return PointClass::occluded;
    return PointClass::visible;
}

template <typename PerVoxel>
void for_each_voxel(const VoxelGrid& grid, uint8_t* labels, PerVoxel&& fn) {
    // parallel over z-slabs; each slab owns a contiguous label range
    parallel_chunks(grid.nz, 1, [&](int64_t, int64_t z0, int64_t z1) {
        for (int iz = static_cast<int>(z0); iz < static_cast<int>(z1); ++iz)
            for (int iy = 0; iy < grid.ny; ++iy)
                for (int ix = 0; ix < grid.nx; ++ix)
                    labels[grid.index(ix, iy, iz)] = fn(ix, iy, iz);
    });
}

}  // namespace

AttributeField color_coverage(const VoxelGrid& grid, const CameraPose& pose,
                              const CameraIntrinsics& intr, const DepthImage& static_depth,
                              const ColoringOptions& opts) {
    AttributeField field;
    field.mode = FieldMode::coverage;
    field.labels.resize(grid.count());
    const double slack = opts.depth_slack;

    if (!opts.conservative) {
        for_each_voxel(grid, field.labels.data(), [&](int ix, int iy, int iz) -> uint8_t {
            return classify(grid.center(ix, iy, iz), pose, intr, static_depth, slack) ==
                           PointClass::visible
                       ? kCovDetectable
                       : kCovUndetectable;
        });
    } else {
        // detectable only when every corner is
        for_each_voxel(grid, field.labels.data(), [&](int ix, int iy, int iz) -> uint8_t {
            for (int c = 0; c < 8; ++c) {
                const Vec3 y = grid.corner(ix + (c & 1), iy + ((c >> 1) & 1), iz + ((c >> 2) & 1));
                if (classify(y, pose, intr, static_depth, slack) != PointClass::visible)
                    return kCovUndetectable;
            }
            return kCovDetectable;
        });
    }
    return field;
}

AttributeField color_hull(const VoxelGrid& grid, const CameraPose& pose,
                          const CameraIntrinsics& intr, const DepthImage& static_depth,
                          const SegmentedImage& seg, const ColoringOptions& opts) {
    if (seg.width != static_depth.width || seg.height != static_depth.height)
        throw std::invalid_argument("color_hull: segmented image dimensions differ from depth");
    AttributeField field;
    field.mode = FieldMode::hull;
    field.labels.resize(grid.count());
    const double slack = opts.depth_slack;

    auto label_point = [&](const Vec3& y) -> uint8_t {
        const Projection pr = project(pose, intr, y);
        if (!pr.in_front) return kHullOutside;
        const PixelIndex px = pixel_of(intr, pr.u, pr.v);
        if (px.outside) return kHullOutside;
        if (pr.distance > static_depth.at(px.x, px.y) + slack) return kHullOccluded;
        return seg.at(px.x, px.y) < 0.0 ? kHullChanged : kHullIdentical;
    };

    if (!opts.conservative) {
        for_each_voxel(grid, field.labels.data(),
                       [&](int ix, int iy, int iz) -> uint8_t { return label_point(grid.center(ix, iy, iz)); });
    } else {
        // strongest hull-membership attribute over the corners:
        // changed > occluded > outside > identical, so the voxel is in the
        // hull set iff any corner is
        for_each_voxel(grid, field.labels.data(), [&](int ix, int iy, int iz) -> uint8_t {
            bool any_occluded = false, any_outside = false;
            for (int c = 0; c < 8; ++c) {
                const Vec3 y = grid.corner(ix + (c & 1), iy + ((c >> 1) & 1), iz + ((c >> 2) & 1));
                const uint8_t l = label_point(y);
                if (l == kHullChanged) return kHullChanged;
                if (l == kHullOccluded) any_occluded = true;
                if (l == kHullOutside) any_outside = true;
            }
            if (any_occluded) return kHullOccluded;
            if (any_outside) return kHullOutside;
            return kHullIdentical;
        });
    }
    return field;
}

MultiView combine(const std::vector<AttributeField>& fields, LabelSet selector, int k) {
    if (fields.empty()) throw std::invalid_argument("combine: no fields");
    const size_t n = fields[0].labels.size();
    const int m = static_cast<int>(fields.size());
    if (k < 1 || k > m) throw std::invalid_argument("combine: overlap k out of [1, M]");
    for (const auto& f : fields)
        if (f.labels.size() != n) throw std::invalid_argument("combine: fields on different grids");

    MultiView view;
    view.num_fields = m;
    view.counts.assign(n, 0);
    for (const auto& f : fields) {
        const uint8_t* labels = f.labels.data();
        uint8_t* counts = view.counts.data();
        parallel_chunks(static_cast<int64_t>(n), 1 << 16, [&](int64_t, int64_t b, int64_t e) {
            for (int64_t i = b; i < e; ++i) counts[i] += selector.contains(labels[i]) ? 1 : 0;
        });
    }
    return view;
}

size_t MultiView::member_count(int k) const {
    size_t n = 0;
    for (uint8_t c : counts)
        if (c >= k) ++n;
    return n;
}

bool complement_identity_check(const std::vector<AttributeField>& fields, LabelSet color, int k) {
    const int m = static_cast<int>(fields.size());
    const MultiView with = combine(fields, color, k);
    const MultiView without = combine(fields, color.complement(), std::max(1, m - (k - 1)));
    const int dual_k = m - (k - 1);
    for (size_t i = 0; i < with.counts.size(); ++i) {
        const bool in_color = with.member(i, k);
        const bool in_complement = !without.member(i, dual_k);
        if (in_color != in_complement) return false;
    }
    return true;
}

double measure(const MultiView& view, int k, const std::vector<double>* weights) {
    if (weights && !weights->empty() && weights->size() != view.counts.size())
        throw std::invalid_argument("measure: weight field shape mismatch");
    const bool weighted = weights && !weights->empty();
    double total = 0.0;
    for (size_t i = 0; i < view.counts.size(); ++i) {
        if (view.counts[i] >= k) total += weighted ? (*weights)[i] : 1.0;
    }
    return total;
}

double measure_volume(const MultiView& view, int k, const VoxelGrid& grid) {
    return measure(view, k, nullptr) * grid.cell_volume();
}

namespace {

std::string voxa_header(const VoxelGrid& grid) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "VOXA v1 %d %d %d %.17g %.17g %.17g %.17g %.17g %.17g\n",
                  grid.nx, grid.ny, grid.nz, grid.origin.x(), grid.origin.y(), grid.origin.z(),
                  grid.cell.x(), grid.cell.y(), grid.cell.z());
    return buf;
}

void write_voxa_bytes(const std::string& header, const uint8_t* data, size_t n,
                      const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << header;
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n));
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace

void write_voxa(const AttributeField& field, const VoxelGrid& grid, const std::string& path) {
    if (field.labels.size() != grid.count())
        throw std::invalid_argument("write_voxa: field size does not match grid");
    write_voxa_bytes(voxa_header(grid), field.labels.data(), field.labels.size(), path);
}

void write_voxa(const MultiView& view, int k, const VoxelGrid& grid, const std::string& path) {
    if (view.counts.size() != grid.count())
        throw std::invalid_argument("write_voxa: view size does not match grid");
    std::vector<uint8_t> membership(view.counts.size());
    for (size_t i = 0; i < membership.size(); ++i) membership[i] = view.counts[i] >= k ? 1 : 0;
    write_voxa_bytes(voxa_header(grid), membership.data(), membership.size(), path);
}

AttributeField read_voxa(const std::string& path, VoxelGrid& grid_out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("voxa: missing header in " + path);
    std::istringstream ss(line);
    std::string magic, version;
    VoxelGrid grid;
    if (!(ss >> magic >> version >> grid.nx >> grid.ny >> grid.nz >> grid.origin.x() >>
          grid.origin.y() >> grid.origin.z() >> grid.cell.x() >> grid.cell.y() >> grid.cell.z()) ||
        magic != "VOXA" || version != "v1")
        throw std::runtime_error("voxa: malformed header in " + path);
    AttributeField field;
    field.labels.resize(grid.count());
    in.read(reinterpret_cast<char*>(field.labels.data()),
            static_cast<std::streamsize>(field.labels.size()));
    if (static_cast<size_t>(in.gcount()) != field.labels.size())
        throw std::runtime_error("voxa: truncated payload in " + path);
    grid_out = grid;
    return field;
}

}  // namespace campo
