#pragma once

#include "campo/config.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace campo {

// Effective run options after CLI overrides. Every command writes its files
// under out_dir and reports what it wrote on `out`.
struct RunOptions {
    std::string out_dir;               // empty: use config.outputs.dir
    std::optional<uint64_t> seed;      // overrides config.solver.seed
    int threads = 0;                   // 0 = auto; speed only, never output
};

// Renders the static, dynamic and segmented views of one camera at time step
// t. The camera pose comes from the variable vector x (default: first
// configured initial point, else the domain box center).
void cmd_render(const RunConfig& config, int camera_index, int t,
                const std::optional<std::vector<double>>& x, const RunOptions& opts,
                std::ostream& out);

// Evaluates the objective at x, printing the value (and both readings of the
// hull threshold) and writing per-camera VOXA dumps plus the combined
// multi-view membership.
double cmd_evaluate(const RunConfig& config, const std::vector<double>& x, const RunOptions& opts,
                    std::ostream& out);

// Exhaustive lattice scan; writes scan.csv with a trailing summary comment
// (argmax and optimum) and prints the summary.
void cmd_scan(const RunConfig& config, const RunOptions& opts, std::ostream& out);

// Runs the configured solver; writes trace.csv, best_pose.txt and the voxel
// dumps at the best point. Progress goes to stderr, one line per true
// objective evaluation.
void cmd_optimize(const RunConfig& config, const RunOptions& opts, std::ostream& out);

// File-format reference for everything the commands write.
void cmd_formats(std::ostream& out);

// Default vector when none is configured: explicit initial point if present,
// else the center of the domain box.
std::vector<double> default_vector(const RunConfig& config);

}  // namespace campo
