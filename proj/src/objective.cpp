#include "campo/objective.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace campo {

namespace {

const char* kFullRoles[5] = {"x", "y", "z", "pan", "tilt"};
const char* kPosRoles[3] = {"x", "y", "z"};

}  // namespace

int DomainBlock::dim() const {
    switch (type) {
        case BlockType::full: return 5;
        case BlockType::position_lookat: return 3;
        case BlockType::line: return 1;
    }
    return 0;
}

void DomainBlock::validate() const {
    if (static_cast<int>(lo.size()) != dim() || static_cast<int>(hi.size()) != dim())
        throw std::invalid_argument("domain block: bound count does not match parametrization");
    for (size_t i = 0; i < lo.size(); ++i) {
        if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || lo[i] > hi[i])
            throw std::invalid_argument("domain block: bounds must be finite with lower <= upper");
    }
    if (type == BlockType::line && (q - p).norm() == 0.0)
        throw std::invalid_argument("domain block: line endpoints coincide");
}

int Domain::dim() const {
    int n = 0;
    for (const auto& b : blocks) n += b.dim();
    return n;
}

std::vector<double> Domain::lower() const {
    std::vector<double> v;
    for (const auto& b : blocks) v.insert(v.end(), b.lo.begin(), b.lo.end());
    return v;
}

std::vector<double> Domain::upper() const {
    std::vector<double> v;
    for (const auto& b : blocks) v.insert(v.end(), b.hi.begin(), b.hi.end());
    return v;
}

double Domain::diagonal() const {
    double sum = 0.0;
    for (const auto& b : blocks)
        for (size_t i = 0; i < b.lo.size(); ++i) sum += (b.hi[i] - b.lo[i]) * (b.hi[i] - b.lo[i]);
    return std::sqrt(sum);
}

void Domain::validate() const {
    if (blocks.empty()) throw std::invalid_argument("domain: no camera blocks");
    for (const auto& b : blocks) b.validate();
}

std::vector<CameraPose> poses_from_vector(const Domain& domain, std::span<const double> x) {
    if (static_cast<int>(x.size()) != domain.dim())
        throw DomainError("variable vector has dimension " + std::to_string(x.size()) +
                          ", domain expects " + std::to_string(domain.dim()));
    std::vector<CameraPose> poses;
    poses.reserve(domain.blocks.size());
    int offset = 0;
    for (size_t bi = 0; bi < domain.blocks.size(); ++bi) {
        const DomainBlock& b = domain.blocks[bi];
        for (int i = 0; i < b.dim(); ++i) {
            const double v = x[offset + i];
            if (!(v >= b.lo[i]) || !(v <= b.hi[i])) {
                const char* role = b.type == BlockType::full ? kFullRoles[i]
                                   : b.type == BlockType::position_lookat ? kPosRoles[i]
                                                                          : "u";
                char msg[160];
                std::snprintf(msg, sizeof msg,
                              "scalar %d (camera %zu, %s) = %.17g outside [%.17g, %.17g]",
                              offset + i + 1, bi + 1, role, v, b.lo[i], b.hi[i]);
                throw DomainError(msg);
            }
        }
        switch (b.type) {
            case BlockType::full:
                poses.push_back(pose_from_pan_tilt(Vec3(x[offset], x[offset + 1], x[offset + 2]),
                                                   x[offset + 3], x[offset + 4]));
                break;
            case BlockType::position_lookat:
                poses.push_back(look_at(Vec3(x[offset], x[offset + 1], x[offset + 2]), b.target, b.up));
                break;
            case BlockType::line: {
                const Vec3 pos = b.p + x[offset] * (b.q - b.p);
                if (b.aim_target)
                    poses.push_back(look_at(pos, *b.aim_target, b.up));
                else
                    poses.push_back(pose_from_pan_tilt(pos, b.pan, b.tilt));
                break;
            }
        }
        offset += b.dim();
    }
    return poses;
}

std::vector<double> vector_from_poses(const Domain& domain, const std::vector<CameraPose>& poses) {
    if (poses.size() != domain.blocks.size())
        throw std::invalid_argument("vector_from_poses: pose count does not match domain");
    std::vector<double> x;
    x.reserve(domain.dim());
    for (size_t bi = 0; bi < domain.blocks.size(); ++bi) {
        const DomainBlock& b = domain.blocks[bi];
        const CameraPose& pose = poses[bi];
        switch (b.type) {
            case BlockType::full: {
                double pan, tilt;
                pan_tilt_of(pose, pan, tilt);
                x.insert(x.end(), {pose.position.x(), pose.position.y(), pose.position.z(), pan, tilt});
                break;
            }
            case BlockType::position_lookat:
                x.insert(x.end(), {pose.position.x(), pose.position.y(), pose.position.z()});
                break;
            case BlockType::line: {
                const Vec3 d = b.q - b.p;
                x.push_back((pose.position - b.p).dot(d) / d.squaredNorm());
                break;
            }
        }
    }
    return x;
}

void ObjectiveSpec::validate(int camera_count) const {
    if (overlap < 1 || overlap > camera_count)
        throw std::invalid_argument("objective: overlap threshold out of [1, M]");
    if (!(depth_slack >= 0.0)) throw std::invalid_argument("objective: depth slack must be >= 0");
}

Evaluator::Evaluator(const Environment& env, VoxelGrid grid, CameraIntrinsics intr, Domain domain,
                     ObjectiveSpec spec)
    : grid_(std::move(grid)), intr_(intr), domain_(std::move(domain)), spec_(spec) {
    env.validate();
    intr_.validate();
    domain_.validate();
    spec_.validate(domain_.camera_count());
    grid_.validate(&env.bounds);
    time_steps_ = env.time_steps;
    static_faces_ = assemble_scene(env, 1, false);
    if (spec_.mode == ObjectiveMode::min_hull_error) {
        faces_with_dynamic_.reserve(time_steps_);
        for (int t = 1; t <= time_steps_; ++t) faces_with_dynamic_.push_back(assemble_scene(env, t, true));
    }
}

double Evaluator::run(std::span<const double> x, EvaluationDetail* detail) const {
    const std::vector<CameraPose> poses = poses_from_vector(domain_, x);
    const int m = static_cast<int>(poses.size());
    const ColoringOptions copts{spec_.depth_slack, spec_.conservative};
    const std::vector<double>* weights = grid_.weights.empty() ? nullptr : &grid_.weights;

    std::vector<DepthImage> static_depth;  // shared across time steps
    static_depth.reserve(m);
    for (const auto& pose : poses) static_depth.push_back(render_depth(pose, intr_, static_faces_));

    auto aggregate = [&](double acc, double v, int t) {
        if (t == 1) return v;
        return spec_.aggregate == TimeAggregate::sum ? acc + v : std::max(acc, v);
    };

    double value = 0.0;
    if (spec_.mode == ObjectiveMode::max_coverage) {
        std::vector<AttributeField> fields;
        fields.reserve(m);
        for (int c = 0; c < m; ++c)
            fields.push_back(color_coverage(grid_, poses[c], intr_, static_depth[c], copts));
        MultiView view = combine(fields, LabelSet::detectable(), spec_.overlap);
        const double per_step = measure(view, spec_.overlap, weights);
        for (int t = 1; t <= time_steps_; ++t) value = aggregate(value, per_step, t);
        if (detail) {
            detail->static_depth = std::move(static_depth);
            detail->fields.assign(1, std::move(fields));
            detail->views.push_back(std::move(view));
        }
    } else {
        for (int t = 1; t <= time_steps_; ++t) {
            std::vector<AttributeField> fields;
            fields.reserve(m);
            for (int c = 0; c < m; ++c) {
                const DepthImage dynamic_img = render_depth(poses[c], intr_, faces_with_dynamic_[t - 1]);
                const SegmentedImage seg = segment(static_depth[c], dynamic_img);
                fields.push_back(color_hull(grid_, poses[c], intr_, static_depth[c], seg, copts));
            }
            MultiView view = combine(fields, LabelSet::changed_or_undetectable(), spec_.overlap);
            const double v = measure(view, spec_.overlap, weights);
            value = aggregate(value, v, t);
            if (detail) {
                detail->fields.push_back(std::move(fields));
                detail->views.push_back(std::move(view));
            }
        }
        if (detail) detail->static_depth = std::move(static_depth);
    }
    if (detail) detail->value = value;
    return value;
}

double Evaluator::evaluate(std::span<const double> x) const { return run(x, nullptr); }

double Evaluator::solver_value(std::span<const double> x) const {
    const double v = evaluate(x);
    return spec_.mode == ObjectiveMode::min_hull_error ? -v : v;
}

EvaluationDetail Evaluator::evaluate_detail(std::span<const double> x) const {
    EvaluationDetail detail;
    run(x, &detail);
    return detail;
}

ScanResult grid_scan(const Evaluator& eval, int steps, int64_t budget) {
    if (steps < 1) throw std::invalid_argument("grid_scan: steps must be >= 1");
    const int n = eval.domain().dim();
    int64_t total = 1;
    for (int i = 0; i < n; ++i) {
        if (total > budget / steps + 1) {
            total = budget + 1;
            break;
        }
        total *= steps;
    }
    if (total > budget)
        throw std::runtime_error("grid_scan: lattice needs " + std::to_string(steps) + "^" +
                                 std::to_string(n) + " evaluations, budget is " +
                                 std::to_string(budget));
    const std::vector<double> lo = eval.domain().lower();
    const std::vector<double> hi = eval.domain().upper();

    ScanResult result;
    result.rows.reserve(static_cast<size_t>(total));
    std::vector<int> idx(n, 0);
    std::vector<double> x(n);
    for (int64_t row = 0; row < total; ++row) {
        for (int i = 0; i < n; ++i)
            x[i] = steps == 1 ? lo[i] : lo[i] + (hi[i] - lo[i]) * idx[i] / (steps - 1);
        const auto t0 = std::chrono::steady_clock::now();
        const double value = eval.evaluate(x);
        const auto t1 = std::chrono::steady_clock::now();
        result.rows.push_back({x, value, std::chrono::duration<double, std::milli>(t1 - t0).count()});
        // "best" follows the optimization sense: hull error is minimized
        const double prev = result.rows[result.best_index].value;
        const bool better = eval.spec().mode == ObjectiveMode::min_hull_error ? value < prev : value > prev;
        if (better) result.best_index = result.rows.size() - 1;
        // row-major: last scalar fastest
        for (int i = n - 1; i >= 0; --i) {
            if (++idx[i] < steps) break;
            idx[i] = 0;
        }
    }
    return result;
}

void write_scan_csv(const ScanResult& scan, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    const int n = scan.rows.empty() ? 0 : static_cast<int>(scan.rows[0].x.size());
    for (int i = 0; i < n; ++i) out << "x_" << i + 1 << ',';
    out << "value,millis\n";
    char buf[64];
    for (const auto& row : scan.rows) {
        for (double v : row.x) {
            std::snprintf(buf, sizeof buf, "%.17g,", v);
            out << buf;
        }
        std::snprintf(buf, sizeof buf, "%.17g,%.3f\n", row.value, row.millis);
        out << buf;
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace campo
