// baselines.hpp
//
// Reference schemes the optimizer is measured against:
//   LA   latency-aware association, vGALA with kappa = 0 (weights collapse
//        to 1 and psi reduces to the plain latency sum),
//   GA   green-energy-aware association, vGALA pushed to a large kappa with
//        theta = 1 so prices are dominated by the green capacity gap,
//   CRE  cell range expansion: each location picks argmax Z_j * r_j with a
//        tier-uniform bias, searched over a log grid per tuning criterion.
// Plus an exhaustive oracle that enumerates every discrete association on
// small instances and returns the true minimum.

#pragma once

#include "vgala/optimizer.hpp"
#include "vgala/scenario.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace vgala {

// LA: identical machinery with kappa = 0.
RunResult run_la(const Scenario& sc, const RateMap& rm, const OptimizerConfig& cfg,
                 const AdmissionField& admission = {});

// GA: kappa = kappa_large, theta_j = 1 for every station.
RunResult run_ga(const Scenario& sc, const RateMap& rm, const OptimizerConfig& cfg,
                 const AdmissionField& admission = {}, double kappa_large = 50.0);

// --- cell range expansion ---------------------------------------------------

// Per-station data rate bias. Two-tier scheme: macro stations stay at 1,
// small stations share one value.
struct CreBias {
    std::vector<double> z;

    static CreBias two_tier(const Scenario& sc, double small_bias);
    void validate(const Scenario& sc) const; // positive, tier-uniform, macro = 1
};

// argmax_j z_j * r_j over candidate stations, ties to the lowest index.
// Returns -1 if the cell has no candidate.
int cre_select(int cell, const CreBias& bias, const RateMap& rm);

std::vector<int> cre_association(const CreBias& bias, const RateMap& rm);

enum class CreCriterion { latency, on_grid, psi };

std::string cre_criterion_name(CreCriterion c);

struct CreSweepRow {
    double bias = 1.0;
    double latency_metric = 0.0;
    double on_grid_w = 0.0;
    double psi = 0.0;
};

struct CreSweepResult {
    CreBias best;
    double best_bias = 1.0;
    double best_value = 0.0;          // criterion value at best_bias
    std::vector<CreSweepRow> rows;    // one per grid point, ascending bias
};

// Grid search over the small-tier bias on a log2-spaced grid
// [2^log2_min, 2^log2_max]. Each point is evaluated on the loads induced by
// its association; the smallest bias attaining the minimum wins. cfg feeds
// the psi criterion (kappa, theta override) and the load clamp epsilon.
CreSweepResult sweep_cre_bias(const Scenario& sc, const RateMap& rm, CreCriterion criterion,
                              const OptimizerConfig& cfg = {}, int grid_points = 49,
                              double log2_min = -6.0, double log2_max = 6.0);

// (bias, latency_metric, on_grid_w, psi) rows.
void export_cre_sweep_csv(const std::vector<CreSweepRow>& rows, const std::string& path);

// --- exhaustive oracle ------------------------------------------------------

enum class OracleObjective { psi, on_grid };

struct OracleResult {
    double best_psi = 0.0;            // minimum objective value found
    std::vector<int> best_association; // -1 on cells without traffic
    long long enumerated = 0;          // product of candidate counts
};

// Enumerates every assignment of loaded cells to their candidate stations,
// evaluates the chosen objective at the induced (clamped) loads, and returns
// the minimum; the first assignment attaining it wins. Throws when the
// number of assignments exceeds the guard.
OracleResult exhaustive_oracle(const Scenario& sc, const RateMap& rm, const OptimizerConfig& cfg,
                               OracleObjective objective = OracleObjective::psi,
                               const AdmissionField& admission = {},
                               long long guard = 100000);

} // namespace vgala
