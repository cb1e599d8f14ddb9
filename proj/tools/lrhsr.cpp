// lrhsr.cpp — command-line experiment runner

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lrhsr/runner.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_solver = 3;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<double> alpha, gamma, t_max;
    std::optional<long> N, trajectories;
    std::optional<int> dim;
    std::optional<std::string> bc;
};

void apply(lrhsr::ExperimentConfig& c, const Overrides& o) {
    if (o.seed) c.run.seed = *o.seed;
    if (o.alpha) {
        c.model.alpha = *o.alpha;
        c.run.alpha_list.clear();
    }
    if (o.gamma) c.model.gamma = *o.gamma;
    if (o.N) {
        c.model.N = *o.N;
        c.run.N_list.clear();
    }
    if (o.dim) {
        c.model.d = *o.dim;
        c.run.d_list.clear();
    }
    if (o.bc) c.model.bc = lrhsr::parse_boundary(*o.bc);
    if (o.t_max) {
        c.run.t_max = *o.t_max;
        c.run.times.clear();
    }
    if (o.trajectories) c.run.trajectories = *o.trajectories;
    lrhsr::validate(c);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Long-range exciton transport experiments"};
    std::string config_path, preset, out_dir = "out";
    Overrides o;
    bool list = false;
    app.add_option("--config", config_path, "INI experiment file")->check(CLI::ExistingFile);
    app.add_option("--preset", preset, "named figure preset");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", o.seed, "master random seed");
    app.add_option("--alpha", o.alpha, "power-law exponent");
    app.add_option("--gamma", o.gamma, "dephasing rate");
    app.add_option("--N", o.N, "sites per axis");
    app.add_option("--dim", o.dim, "lattice dimension");
    app.add_option("--bc", o.bc, "boundary: open or periodic");
    app.add_option("--t-max", o.t_max, "final time, in the configured time unit");
    app.add_option("--trajectories", o.trajectories, "KMC trajectories");
    app.add_flag("--list-presets", list, "print preset names and exit");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_config;
    }
    if (list) {
        for (const auto& n : lrhsr::preset_names()) std::cout << n << '\n';
        return exit_ok;
    }

    std::vector<lrhsr::ExperimentConfig> configs;
    try {
        if (config_path.empty() == preset.empty())
            throw lrhsr::ConfigError("config", "give exactly one of --config or --preset");
        if (!preset.empty()) {
            configs = lrhsr::figure_preset(preset);
        } else {
            std::ifstream in(config_path);
            configs.push_back(lrhsr::parse_config(in));
        }
        for (auto& c : configs) apply(c, o);
    } catch (const lrhsr::ConfigError& e) {
        std::cerr << "config error [" << e.key << "]: " << e.what() << '\n';
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    }

    try {
        std::vector<lrhsr::Artifact> all;
        for (const auto& c : configs) {
            const auto arts = lrhsr::run(c, out_dir);
            all.insert(all.end(), arts.begin(), arts.end());
            for (const auto& a : arts) std::cout << a.path << '\n';
        }
        lrhsr::write_manifest(out_dir, configs, all);
    } catch (const lrhsr::ConfigError& e) {
        std::cerr << "config error [" << e.key << "]: " << e.what() << '\n';
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return exit_solver;
    }
    return exit_ok;
}
