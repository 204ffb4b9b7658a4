// experiment.hpp
//
// Config-driven experiment runner behind the command line tool. A config
// names a scenario file, an experiment kind, optimizer overrides and an
// output directory; run_experiment() executes it and writes CSVs plus a
// manifest that reproduces the run bit-exactly.

#pragma once

#include "vgala/optimizer.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vgala {

// run          one optimization, trace + association + energy + metrics
// sweep-kappa  vGALA across the kappa grid
// sweep-theta  vGALA across the uniform-theta grid
// sweep-solar  vGALA and LA across the solar efficiency grid
// compare-cre  bias sweeps for the three CRE tunings, then a head-to-head
// oracle-check exhaustive minimum vs converged psi on a tiny scenario
// monte-carlo  frozen-price schemes evaluated on random user draws
extern const std::vector<std::string> kExperimentKinds;

struct ExperimentConfig {
    std::string scenario_path;
    std::string kind = "run";
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    OptimizerConfig optimizer;            // kappa = 4, theta override unset
    std::optional<double> admission_mu;   // uniform admission probability
    bool export_rate_map = false;

    std::vector<double> kappa_grid = {0, 1, 2, 3, 4, 5, 6, 7, 8};
    std::vector<double> theta_grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    std::vector<double> efficiency_grid;  // empty: default 10-point grid to 0.35

    int mc_draws = 500;
    double mc_mean_count = 0.0;           // 0: total arrival rate of the scenario
    double mc_mean_traffic_bits = 0.0;    // 0: traffic-weighted mean size

    int cre_grid_points = 49;
    double cre_log2_min = -6.0;
    double cre_log2_max = 6.0;

    void validate() const; // throws naming field and constraint
};

// Reads a config file (JSON), fills defaults, validates every field.
// A minimal file needs only {"scenario": "path"}.
ExperimentConfig load_config(const std::string& path);

// Re-emits a config so that load_config(save_config(c)) == c.
void save_config(const ExperimentConfig& cfg, const std::string& path);

// Executes the configured experiment. Returns 0 on success, 1 on an
// infeasible or failed run (message on stderr, with guidance to set
// admission_mu when the scenario is overloaded). Output files land in
// cfg.out_dir next to a manifest.json echoing the full config.
int run_experiment(const ExperimentConfig& cfg);

} // namespace vgala
