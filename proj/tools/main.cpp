#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "twomass/config.hpp"
#include "twomass/report.hpp"
#include "twomass/simulator.hpp"

namespace fs = std::filesystem;
using namespace twomass;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitEstimation = 3;
constexpr int kExitOracle = 4;

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    bool amplitude_correction = false;
    long long seed = -1; // -1: keep the config's seed
    double beta_override = -1.0;
};

ExperimentConfig load_config(const CommonOpts& opts) {
    ExperimentConfig cfg = ExperimentConfig::load(opts.config_path);
    if (opts.amplitude_correction) cfg.ident.proposed.amplitude_correction = true;
    if (opts.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opts.seed);
    if (opts.beta_override >= 0.0) {
        cfg.plant.beta = opts.beta_override;
        cfg.plant.validate();
    }
    return cfg;
}

void write_report(const RunReport& r, const fs::path& dir) {
    fs::create_directories(dir);
    std::ofstream(dir / "report.txt") << r.to_text();
    std::ofstream(dir / "report.json") << r.to_json().dump(2) << "\n";
}

void write_trajectory(const Trajectory& traj, const fs::path& dir) {
    fs::create_directories(dir);
    std::ofstream samples(dir / "trajectory.csv");
    traj.write_samples_csv(samples);
    std::ofstream events(dir / "events.csv");
    traj.write_events_csv(events);
}

int cmd_analyze(const CommonOpts& opts) {
    RunReport r = analyze_report(load_config(opts));
    std::cout << r.to_text();
    write_report(r, opts.out_dir);
    return r.has_predictions && !r.conditions.all ? kExitOracle : 0;
}

int cmd_simulate(const CommonOpts& opts) {
    ExperimentConfig cfg = load_config(opts);
    Trajectory traj;
    RunReport r = simulate_report(cfg, &traj);
    std::cout << r.to_text();
    write_trajectory(traj, opts.out_dir);
    write_report(r, opts.out_dir);
    return r.oracle_checked && !r.oracle_ok ? kExitOracle : 0;
}

int cmd_identify(const CommonOpts& opts) {
    ExperimentConfig cfg = load_config(opts);
    Trajectory traj;
    try {
        RunReport r = identify_report(cfg, &traj);
        std::cout << r.to_text();
        write_trajectory(traj, opts.out_dir);
        write_report(r, opts.out_dir);
        return 0;
    } catch (const EstimationError& e) {
        std::cerr << "estimation failed: " << e.what() << "\n";
        write_trajectory(traj, opts.out_dir);
        std::ofstream(fs::path(opts.out_dir) / "report.txt")
            << "estimation failed:\n" << e.what() << "\n";
        return kExitEstimation;
    }
}

int cmd_reproduce_table2(const CommonOpts& opts, const std::string& preset_dir) {
    struct CaseRow {
        std::string name;
        bool ok = false;
        double mean = 0.0, rel_err = 0.0;
    };
    std::vector<CaseRow> rows;
    nlohmann::json table = nlohmann::json::array();
    double nominal = 0.0;
    bool any_fail = false;

    for (int c = 1; c <= 4; ++c) {
        CaseRow row;
        row.name = "Case " + std::to_string(c);
        fs::path preset = fs::path(preset_dir) / ("paper-case" + std::to_string(c) + ".json");
        CommonOpts co = opts;
        co.config_path = preset.string();
        fs::path case_dir = fs::path(opts.out_dir) / ("case" + std::to_string(c));
        try {
            ExperimentConfig cfg = load_config(co);
            nominal = 2.0 * cfg.plant.beta;
            Trajectory traj;
            RunReport r = identify_report(cfg, &traj);
            write_trajectory(traj, case_dir);
            write_report(r, case_dir);
            row.ok = true;
            row.mean = r.estimate.mean_2beta;
            row.rel_err = r.estimate_rel_err;
        } catch (const std::exception& e) {
            std::cerr << row.name << " failed: " << e.what() << "\n";
            any_fail = true;
        }
        rows.push_back(row);
        table.push_back({{"case", c},
                         {"ok", row.ok},
                         {"mean_2beta", row.mean},
                         {"rel_err", row.rel_err}});
    }

    std::cout << "2beta estimates [mrad] (nominal " << nominal * 1e3 << "):\n";
    for (const auto& row : rows) {
        std::cout << "  " << row.name << ": ";
        if (row.ok)
            std::cout << row.mean * 1e3 << "  (rel err " << row.rel_err * 1e2 << "%)\n";
        else
            std::cout << "FAILED\n";
    }
    fs::create_directories(opts.out_dir);
    std::ofstream(fs::path(opts.out_dir) / "table2.json")
        << nlohmann::json{{"nominal_2beta", nominal}, {"cases", table}}.dump(2) << "\n";
    return any_fail ? kExitEstimation : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-mass backlash simulation and identification toolkit"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string preset_dir = "presets";

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        if (needs_config)
            sub->add_option("--config", opts.config_path, "experiment config JSON")
                ->required();
        sub->add_option("--out", opts.out_dir, "output directory");
        sub->add_flag("--amplitude-correction", opts.amplitude_correction,
                      "subtract the analytic cycle amplitude from proposed-method readings");
        sub->add_option("--seed", opts.seed, "override the config seed");
        sub->add_option("--beta", opts.beta_override, "override the plant half-gap (rad)");
    };

    CLI::App* analyze = app.add_subcommand("analyze", "closed-form predictions only");
    add_common(analyze, true);
    CLI::App* simulate = app.add_subcommand("simulate", "run the simulation, write CSVs");
    add_common(simulate, true);
    CLI::App* identify =
        app.add_subcommand("identify", "simulate and run the configured estimator");
    add_common(identify, true);
    CLI::App* table2 =
        app.add_subcommand("reproduce-table2", "run the four bundled presets");
    add_common(table2, false);
    table2->add_option("--presets", preset_dir, "preset directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (analyze->parsed()) return cmd_analyze(opts);
        if (simulate->parsed()) return cmd_simulate(opts);
        if (identify->parsed()) return cmd_identify(opts);
        if (table2->parsed()) return cmd_reproduce_table2(opts, preset_dir);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const SimulationError& e) {
        std::cerr << "simulation failed at t=" << e.t_fail << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return 0;
}
