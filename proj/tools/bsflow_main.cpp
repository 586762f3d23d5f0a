#include "bsflow/errors.hpp"
#include "bsflow/harness.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace bsflow;

namespace {

ExperimentConfig load_or_preset(const std::string& config_path, const std::string& preset_name) {
    if (!config_path.empty()) {
        std::ifstream is(config_path);
        if (!is) throw ConfigError("cannot open config file: " + config_path);
        std::stringstream ss;
        ss << is.rdbuf();
        return ExperimentConfig::from_json(ss.str());
    }
    if (preset_name.empty()) throw ConfigError("need --config or --preset");
    return preset(preset_name);
}

std::vector<std::pair<int, double>> parse_rows(const std::string& spec) {
    // e.g. "3:1e-2,6:1e-3"
    std::vector<std::pair<int, double>> rows;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw ConfigError("row spec must look like 3:1e-2,...");
        rows.emplace_back(std::stoi(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
    }
    if (rows.empty()) throw ConfigError("empty row spec");
    return rows;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-phase flow with an interfacial fluid layer: front-tracking FEM driver"};
    app.require_subcommand(1);

    std::string config_path, preset_name, scheme, out_dir, rows_spec;
    int nf = 0, nc = 0, kgamma = 0, cadence = -1;
    double tau = 0.0, tmax = 0.0;
    std::string xfem_opt, numdiff_opt;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file");
        cmd->add_option("--preset", preset_name, "experiment preset name");
        cmd->add_option("--scheme", scheme, "gd | bgn");
        cmd->add_option("--nf", nf, "fine mesh subdivision");
        cmd->add_option("--nc", nc, "coarse mesh subdivision");
        cmd->add_option("--kgamma", kgamma, "interface vertex count");
        cmd->add_option("--tau", tau, "time step");
        cmd->add_option("--tmax", tmax, "final time");
        cmd->add_option("--xfem", xfem_opt, "on | off");
        cmd->add_option("--numdiff", numdiff_opt, "on | off");
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--cadence", cadence, "snapshot every N steps");
    };

    CLI::App* run = app.add_subcommand("run", "run one experiment");
    add_common(run);
    CLI::App* study = app.add_subcommand("study", "expanding-bubble convergence study");
    add_common(study);
    study->add_option("--rows", rows_spec, "rows as invh:tau pairs, e.g. 3:1e-2,6:1e-3")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        ExperimentConfig cfg = load_or_preset(config_path, preset_name);
        if (!scheme.empty()) cfg.scheme = scheme;
        if (nf > 0) cfg.nf = nf;
        if (nc > 0) cfg.nc = nc;
        if (kgamma > 0) cfg.kgamma = kgamma;
        if (tau > 0.0) cfg.tau = tau;
        if (tmax > 0.0) cfg.tmax = tmax;
        if (!xfem_opt.empty()) cfg.xfem = xfem_opt == "on";
        if (!numdiff_opt.empty()) cfg.numdiff = numdiff_opt == "on";
        if (!out_dir.empty()) cfg.out = out_dir;
        if (cadence >= 0) cfg.cadence = cadence;

        if (run->parsed()) {
            const RunResult res = run_experiment(cfg);
            if (res.exit_code != 0) std::cerr << "run failed: " << res.failure << "\n";
            std::cout << "steps=" << res.steps << " t=" << res.final_diag.t
                      << " area_drift=" << res.area_drift << "\n";
            return res.exit_code;
        }
        const std::string csv = convergence_study(cfg, parse_rows(rows_spec));
        std::cout << csv;
        return 0;
    } catch (const GeometricError& e) {
        std::cerr << "geometric failure: " << e.what() << "\n";
        return 2;
    } catch (const SolverError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
