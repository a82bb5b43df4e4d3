// Experiment driver:
//   thinfilm run <config>       run one simulation, write artifacts
//   thinfilm sweep <config>     perturbation sweep over [sweep] values
//   thinfilm converge <config>  temporal self-convergence study
//   thinfilm check <series.csv> re-run diagnostics monitors on stored output
// Common flags: --override section.key=value (repeatable), --seed, --out.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "thinfilm/experiment.hpp"
#include "thinfilm/field_io.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

thinfilm::ExperimentConfig load(const std::string& config_path,
                                std::vector<std::string> overrides,
                                const std::string& seed, const std::string& out_dir) {
    if (!seed.empty()) overrides.push_back("init.seed=" + seed);
    if (!out_dir.empty()) overrides.push_back("output.dir=" + out_dir);
    return thinfilm::parse_config(slurp(config_path), overrides);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudo-spectral thin-film growth simulator"};
    app.require_subcommand(1);

    std::string config_path, series_path, seed, out_dir;
    std::vector<std::string> overrides;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("config", config_path, "experiment config file")->required();
        cmd->add_option("--override", overrides,
                        "section.key=value applied on top of the config (repeatable)");
        cmd->add_option("--seed", seed, "random seed for example5_random");
        cmd->add_option("--out", out_dir, "output directory");
    };

    CLI::App* run_cmd = app.add_subcommand("run", "run one experiment");
    add_common(run_cmd);
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "run the configured sweep");
    add_common(sweep_cmd);
    CLI::App* conv_cmd = app.add_subcommand("converge", "temporal convergence study");
    add_common(conv_cmd);
    CLI::App* check_cmd =
        app.add_subcommand("check", "re-run diagnostics monitors on a stored series");
    check_cmd->add_option("series", series_path, "path to series.csv")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            thinfilm::ExperimentConfig cfg = load(config_path, overrides, seed, out_dir);
            int status = thinfilm::run_experiment(cfg);
            std::cout << "run complete: artifacts in " << cfg.output_dir << "\n";
            return status;
        }
        if (sweep_cmd->parsed()) {
            thinfilm::ExperimentConfig cfg = load(config_path, overrides, seed, out_dir);
            if (!cfg.sweep)
                throw thinfilm::ConfigError("sweep: config has no [sweep] section");
            auto rows = thinfilm::perturbation_sweep(cfg, *cfg.sweep);
            std::printf("%-14s %-14s %-14s %s\n", cfg.sweep->parameter.c_str(),
                        "final_omega", "final_energy", "status");
            bool any_failed = false;
            for (const auto& r : rows) {
                std::printf("%-14g %-14.8g %-14.8g %s\n", r.value, r.final_omega,
                            r.final_energy, r.ok ? "ok" : r.error.c_str());
                any_failed |= !r.ok;
            }
            std::cout << "summary: " << cfg.output_dir << "/sweep_summary.csv\n";
            return any_failed ? 1 : 0;
        }
        if (conv_cmd->parsed()) {
            thinfilm::ExperimentConfig cfg = load(config_path, overrides, seed, out_dir);
            auto rows = thinfilm::convergence_study(cfg, cfg.converge.dt_ladder,
                                                    cfg.converge.reference_refinement);
            std::printf("%-12s %-16s %s\n", "dt", "l2_error", "observed_order");
            for (const auto& r : rows)
                std::printf("%-12g %-16.8e %.3f\n", r.dt, r.error, r.order);
            return 0;
        }
        return thinfilm::check_series(series_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
