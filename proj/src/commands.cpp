#include "campo/commands.hpp"

#include "campo/parallel.hpp"
#include "campo/solvers.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <ostream>

namespace campo {

namespace fs = std::filesystem;

namespace {

std::string ensure_out_dir(const RunConfig& config, const RunOptions& opts) {
    const std::string dir = opts.out_dir.empty() ? config.outputs.dir : opts.out_dir;
    fs::create_directories(dir);
    return dir;
}

std::string path_join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void apply_threads(const RunOptions& opts) { set_thread_count(opts.threads); }

uint64_t effective_seed(const RunConfig& config, const RunOptions& opts) {
    return opts.seed ? *opts.seed : config.solver.seed;
}

Evaluator make_evaluator(const RunConfig& config) {
    return Evaluator(config.env, config.grid, config.intrinsics, config.domain, config.objective);
}

void print_threshold_readings(const RunConfig& config, std::ostream& out) {
    if (config.objective.mode != ObjectiveMode::min_hull_error) return;
    const int m = config.domain.camera_count();
    const int kappa = config.objective.overlap;
    out << "hull threshold: changed-or-undetectable in >= " << kappa
        << " views (equivalently: excluded iff identical in >= " << m - (kappa - 1) << " of " << m
        << " views)\n";
}

void write_best_pose(const std::string& path, const RunConfig& config,
                     const std::vector<double>& x, double value) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    char buf[128];
    std::snprintf(buf, sizeof buf, "value %.17g\n", value);
    out << "# campo camera poses\n" << buf;
    out << "x";
    for (double v : x) {
        std::snprintf(buf, sizeof buf, " %.17g", v);
        out << buf;
    }
    out << '\n';
    const auto poses = poses_from_vector(config.domain, x);
    for (size_t i = 0; i < poses.size(); ++i) {
        double pan, tilt;
        pan_tilt_of(poses[i], pan, tilt);
        out << "camera " << i + 1 << '\n';
        std::snprintf(buf, sizeof buf, "  position %.17g %.17g %.17g\n", poses[i].position.x(),
                      poses[i].position.y(), poses[i].position.z());
        out << buf;
        std::snprintf(buf, sizeof buf, "  pan %.17g\n  tilt %.17g\n", pan, tilt);
        out << buf;
        const auto& q = poses[i].orientation;
        std::snprintf(buf, sizeof buf, "  quaternion %.17g %.17g %.17g %.17g\n", q.w(), q.x(), q.y(),
                      q.z());
        out << buf;
    }
}

void dump_voxels(const RunConfig& config, const Evaluator& eval, const std::vector<double>& x,
                 const std::string& dir, std::ostream& out) {
    const EvaluationDetail detail = eval.evaluate_detail(x);
    char name[96];
    for (size_t t = 0; t < detail.fields.size(); ++t) {
        for (size_t c = 0; c < detail.fields[t].size(); ++c) {
            std::snprintf(name, sizeof name, "field_t%02zu_cam%02zu.voxa", t + 1, c + 1);
            write_voxa(detail.fields[t][c], config.grid, path_join(dir, name));
        }
        std::snprintf(name, sizeof name, "multiview_t%02zu.voxa", t + 1);
        write_voxa(detail.views[t], config.objective.overlap, config.grid, path_join(dir, name));
    }
    out << "wrote voxel dumps for " << detail.fields.size() << " time step(s) to " << dir << '\n';
}

}  // namespace

std::vector<double> default_vector(const RunConfig& config) {
    if (!config.solver.initial_points.empty()) return config.solver.initial_points.front();
    const auto lo = config.domain.lower();
    const auto hi = config.domain.upper();
    std::vector<double> x(lo.size());
    for (size_t i = 0; i < x.size(); ++i) x[i] = 0.5 * (lo[i] + hi[i]);
    return x;
}

void cmd_render(const RunConfig& config, int camera_index, int t,
                const std::optional<std::vector<double>>& x_opt, const RunOptions& opts,
                std::ostream& out) {
    apply_threads(opts);
    const int m = config.domain.camera_count();
    if (camera_index < 1 || camera_index > m)
        throw std::runtime_error("camera index " + std::to_string(camera_index) + " out of [1, " +
                                 std::to_string(m) + "]");
    const std::vector<double> x = x_opt ? *x_opt : default_vector(config);
    const auto poses = poses_from_vector(config.domain, x);
    const CameraPose& pose = poses[camera_index - 1];

    const auto static_faces = assemble_scene(config.env, t, false);
    const auto dynamic_faces = assemble_scene(config.env, t, true);
    const DepthImage static_img = render_depth(pose, config.intrinsics, static_faces);
    const DepthImage dynamic_img = render_depth(pose, config.intrinsics, dynamic_faces);
    const SegmentedImage seg = segment(static_img, dynamic_img);

    const std::string dir = ensure_out_dir(config, opts);
    char name[96];
    std::snprintf(name, sizeof name, "static_cam%02d_t%02d.pgm", camera_index, t);
    write_pgm16(static_img, path_join(dir, name), config.outputs.depth_scale);
    out << "wrote " << path_join(dir, name) << '\n';
    std::snprintf(name, sizeof name, "dynamic_cam%02d_t%02d.pgm", camera_index, t);
    write_pgm16(dynamic_img, path_join(dir, name), config.outputs.depth_scale);
    out << "wrote " << path_join(dir, name) << '\n';
    std::snprintf(name, sizeof name, "segmented_cam%02d_t%02d.pgm", camera_index, t);
    write_pgm8(seg, path_join(dir, name));
    out << "wrote " << path_join(dir, name) << '\n';
}

double cmd_evaluate(const RunConfig& config, const std::vector<double>& x, const RunOptions& opts,
                    std::ostream& out) {
    apply_threads(opts);
    const Evaluator eval = make_evaluator(config);
    const double value = eval.evaluate(x);
    char buf[64];
    std::snprintf(buf, sizeof buf, "value %.17g\n", value);
    out << buf;
    print_threshold_readings(config, out);
    if (config.outputs.voxels) {
        const std::string dir = ensure_out_dir(config, opts);
        dump_voxels(config, eval, x, dir, out);
    }
    return value;
}

void cmd_scan(const RunConfig& config, const RunOptions& opts, std::ostream& out) {
    apply_threads(opts);
    const Evaluator eval = make_evaluator(config);
    const ScanResult scan = grid_scan(eval, config.scan.steps, config.scan.budget);

    const std::string dir = ensure_out_dir(config, opts);
    const std::string csv = path_join(dir, "scan.csv");
    write_scan_csv(scan, csv);

    const ScanRow& best = scan.rows[scan.best_index];
    std::ofstream app(csv, std::ios::app);
    char buf[64];
    app << "# optimum";
    for (double v : best.x) {
        std::snprintf(buf, sizeof buf, ",%.17g", v);
        app << buf;
    }
    std::snprintf(buf, sizeof buf, ",%.17g\n", best.value);
    app << buf;

    out << "wrote " << csv << " (" << scan.rows.size() << " rows)\n";
    out << "optimum value " << best.value << " at x = [";
    for (size_t i = 0; i < best.x.size(); ++i) out << (i ? ", " : "") << best.x[i];
    out << "]\n";
    print_threshold_readings(config, out);
}

void cmd_optimize(const RunConfig& config, const RunOptions& opts, std::ostream& out) {
    apply_threads(opts);
    const Evaluator eval = make_evaluator(config);
    const uint64_t seed = effective_seed(config, opts);
    const auto initial = materialize_initial_points(config, seed);

    BoxBounds bounds{config.domain.lower(), config.domain.upper()};
    int eval_counter = 0;
    ObjectiveFn objective = [&](std::span<const double> x) {
        const auto t0 = std::chrono::steady_clock::now();
        const double v = eval.solver_value(x);
        const double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        ++eval_counter;
        std::fprintf(stderr, "eval %4d  value %.17g  (%.1f ms)\n", eval_counter,
                     config.objective.mode == ObjectiveMode::min_hull_error ? -v : v, ms);
        return v;
    };

    SolverTrace trace;
    switch (config.solver.kind) {
        case SolverKind::nelder_mead:
            trace = nelder_mead(objective, initial, bounds, config.solver.budget);
            break;
        case SolverKind::pattern_search:
            trace = pattern_search(objective, initial, bounds, config.solver.budget);
            break;
        case SolverKind::cors_rbf: {
            CorsOptions copts;
            copts.budget = config.solver.budget;
            copts.seed = seed;
            trace = cors_rbf(objective, initial, bounds, copts);
            break;
        }
    }

    const std::string dir = ensure_out_dir(config, opts);
    write_trace_csv(trace, path_join(dir, "trace.csv"));
    out << "wrote " << path_join(dir, "trace.csv") << " (" << trace.records.size() << " evaluations)\n";

    const TraceRecord& best = trace.best();
    const double reported =
        config.objective.mode == ObjectiveMode::min_hull_error ? -best.value : best.value;
    write_best_pose(path_join(dir, "best_pose.txt"), config, best.x, reported);
    out << "wrote " << path_join(dir, "best_pose.txt") << '\n';
    char buf[64];
    std::snprintf(buf, sizeof buf, "best value %.17g\n", reported);
    out << buf;
    print_threshold_readings(config, out);
    if (config.outputs.voxels) dump_voxels(config, eval, best.x, dir, out);
}

void cmd_formats(std::ostream& out) {
    out <<
        R"(campo file formats

config (JSON, version 1)
  top-level keys: version, scene, grid, cameras, objective, solver, scan, outputs.
  scene: bounds {min, max}, time_steps, static_meshes [paths],
         dynamic_objects [{mesh, poses: [[12 numbers: 3x4 row-major rigid transform], one per time step]}].
  grid: origin [3], cell_size [3], resolution [nx, ny, nz], optional weights path
        (text file with nx*ny*nz nonnegative numbers, x-fastest).
  cameras: intrinsics {width, height, hfov_deg, near},
           blocks: [{type: full | position_lookat | line, lo [..], hi [..], ...}]
           full vars (x, y, z, pan, tilt); position_lookat vars (x, y, z) with target [3], up [3];
           line var u with p [3], q [3] (position = p + u*(q - p)) and either pan/tilt or target.
  objective: mode max_coverage | min_hull_error, overlap k, aggregate sum | max,
             depth_slack, conservative.
  solver: name nelder_mead | pattern_search | cors_rbf, budget, seed,
          initial_points: [[x...], ...] or an integer (Latin hypercube count).
  scan: steps, budget.  outputs: dir, images, voxels, depth_scale.
  Mesh and weight paths are relative to the config file.

depth image (16-bit binary PGM, P5 maxval 65535)
  value = round(clamp(distance / depth_scale, 0, 65534)); 65535 = no surface.
  depth_scale is recorded in the header comment line "# depth_scale <v>".

segmented image (8-bit binary PGM, P5 maxval 255): 0 = background, 255 = foreground.

voxel dump (VOXA)
  header line: "VOXA v1 <nx> <ny> <nz> <origin x y z> <cell x y z>"
  followed by nx*ny*nz label bytes, x-fastest.
  coverage fields: 0 = undetectable, 1 = detectable.
  hull fields: 0 = outside, 1 = occluded, 2 = changed, 3 = identical.
  multiview dumps: 0/1 membership at the configured overlap threshold.

scan.csv: header "x_1,...,x_n,value,millis", one row per lattice point in
  row-major order (last scalar fastest), then a "# optimum,..." comment row.

trace.csv: header "iter,evals,value,best_value,millis,x_1,...,x_n", one row
  per true objective evaluation (solver convention: maximization, hull error
  recorded negated).

best_pose.txt: optimum value, variable vector, and per camera the position,
  pan/tilt and orientation quaternion.
)";
}

}  // namespace campo
