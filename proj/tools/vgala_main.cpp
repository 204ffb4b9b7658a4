// Command line front end: one subcommand per experiment kind, flags
// overriding whatever the config file set.

#include "vgala/evaluation.hpp"
#include "vgala/experiment.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i)
        v[i] = lo + (hi - lo) * (n == 1 ? 0.0 : static_cast<double>(i) / (n - 1));
    return v;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"vgala: green energy and latency aware load balancing experiments"};
    app.require_subcommand(1);
    app.footer(
        "Defaults: kappa 4, theta from the scenario (0.8 in the bundled ones), epsilon 1e-3,\n"
        "sigma_armijo 0.3, xi 0.5, psi_tol_rel 1e-8, candidacy gate 140 dB uplink path loss\n"
        "and -123 dBm receiver sensitivity. A config file sets the same fields; flags win.");

    std::string config_path, scenario_path, out_dir;
    std::uint64_t seed = 0;
    double kappa = 0.0, theta = 0.0, mu = 0.0;
    int draws = 0, grid = 0;
    bool export_ratemap = false;

    std::vector<CLI::App*> subs;
    for (const auto& kind : vgala::kExperimentKinds) {
        CLI::App* sub = app.add_subcommand(kind, "");
        sub->add_option("--config", config_path, "experiment config file (JSON)");
        sub->add_option("--scenario", scenario_path, "scenario file (JSON)");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "random seed");
        sub->add_option("--kappa", kappa, "energy awareness exponent");
        sub->add_option("--theta", theta, "uniform energy-latency coefficient override");
        sub->add_option("--mu", mu, "uniform admission probability");
        sub->add_option("--draws", draws, "Monte Carlo draw count");
        sub->add_option("--grid", grid, "grid point count for the sweep");
        if (kind == "run")
            sub->add_flag("--export-ratemap", export_ratemap, "also write ratemap.csv");
        subs.push_back(sub);
    }

    CLI11_PARSE(app, argc, argv);

    CLI::App* sub = app.get_subcommands().front();
    const std::string kind = sub->get_name();

    vgala::ExperimentConfig cfg;
    try {
        if (sub->count("--config")) cfg = vgala::load_config(config_path);
        cfg.kind = kind;
        if (sub->count("--scenario")) cfg.scenario_path = scenario_path;
        if (cfg.scenario_path.empty()) {
            std::cerr << "error: scenario: a scenario file path is required "
                         "(--scenario or --config)\n";
            return 1;
        }
        if (sub->count("--out")) cfg.out_dir = out_dir;
        if (sub->count("--seed")) cfg.seed = seed;
        if (sub->count("--kappa")) cfg.optimizer.kappa = kappa;
        if (sub->count("--theta")) cfg.optimizer.theta_override = theta;
        if (sub->count("--mu")) cfg.admission_mu = mu;
        if (sub->count("--draws")) cfg.mc_draws = draws;
        if (sub->count("--grid")) {
            if (grid < 2) {
                std::cerr << "error: --grid: must be >= 2\n";
                return 1;
            }
            if (kind == "sweep-kappa")
                cfg.kappa_grid = linspace(0.0, 8.0, grid);
            else if (kind == "sweep-theta")
                cfg.theta_grid = linspace(0.0, 1.0, grid);
            else if (kind == "sweep-solar")
                cfg.efficiency_grid = vgala::default_efficiency_grid(grid);
            else
                cfg.cre_grid_points = grid;
        }
        if (export_ratemap) cfg.export_rate_map = true;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    return vgala::run_experiment(cfg);
}
