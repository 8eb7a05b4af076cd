#include "campo/commands.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::vector<double> parse_vector(const std::string& text) {
    std::vector<double> x;
    std::string cleaned = text;
    for (char& c : cleaned)
        if (c == ',' || c == '[' || c == ']') c = ' ';
    std::istringstream ss(cleaned);
    double v;
    while (ss >> v) x.push_back(v);
    return x;
}

std::vector<double> read_vector_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open vector file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_vector(ss.str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"campo - multi-camera placement simulation and optimization"};
    app.require_subcommand(1);

    std::string config_path, out_dir, x_text, x_file;
    uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
    int camera_index = 1, time_step = 1;

    auto add_common = [&](CLI::App* cmd, bool needs_config = true) {
        auto* opt = cmd->add_option("--config", config_path, "experiment config file (JSON)");
        if (needs_config) opt->required()->check(CLI::ExistingFile);
        cmd->add_option("--out", out_dir, "output directory (overrides config)");
        cmd->add_option("--seed", seed, "RNG seed (overrides config)")->each([&](const std::string&) {
            seed_set = true;
        });
        cmd->add_option("--threads", threads, "worker threads, 0 = auto (speed only, never output)");
    };

    auto* render = app.add_subcommand("render", "write depth and segmented images for one camera");
    add_common(render);
    render->add_option("--camera", camera_index, "camera index, 1-based")->default_val(1);
    render->add_option("--time", time_step, "time step, 1-based")->default_val(1);
    render->add_option("--x", x_text, "variable vector (comma separated)");

    auto* evaluate = app.add_subcommand("evaluate", "evaluate the objective at a variable vector");
    add_common(evaluate);
    evaluate->add_option("--x", x_text, "variable vector (comma separated)");
    evaluate->add_option("--x-file", x_file, "file with the variable vector")->check(CLI::ExistingFile);

    auto* scan = app.add_subcommand("scan", "exhaustive lattice scan of the domain");
    add_common(scan);

    auto* optimize = app.add_subcommand("optimize", "run the configured solver");
    add_common(optimize);

    auto* formats = app.add_subcommand("formats", "print the file-format reference");
    (void)formats;

    CLI11_PARSE(app, argc, argv);

    try {
        if (formats->parsed()) {
            campo::cmd_formats(std::cout);
            return 0;
        }

        campo::RunConfig config = campo::load_config(config_path);
        for (const auto& w : config.warnings) std::cerr << "warning: " << w << '\n';

        campo::RunOptions opts;
        opts.out_dir = out_dir;
        opts.threads = threads;
        if (seed_set) opts.seed = seed;

        if (render->parsed()) {
            std::optional<std::vector<double>> x;
            if (!x_text.empty()) x = parse_vector(x_text);
            campo::cmd_render(config, camera_index, time_step, x, opts, std::cout);
        } else if (evaluate->parsed()) {
            std::vector<double> x;
            if (!x_file.empty())
                x = read_vector_file(x_file);
            else if (!x_text.empty())
                x = parse_vector(x_text);
            else
                x = campo::default_vector(config);
            campo::cmd_evaluate(config, x, opts, std::cout);
        } else if (scan->parsed()) {
            campo::cmd_scan(config, opts, std::cout);
        } else if (optimize->parsed()) {
            campo::cmd_optimize(config, opts, std::cout);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
