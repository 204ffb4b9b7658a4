// evaluation.hpp
//
// Everything downstream of a converged run: scalar metrics, Monte Carlo
// evaluation against randomly drawn user populations, and the kappa / theta
// / solar-efficiency sweeps. Sweeps hold the scenario fixed and vary one
// knob; Monte Carlo holds the prices or biases fixed and varies the users.

#pragma once

#include "vgala/baselines.hpp"
#include "vgala/optimizer.hpp"
#include "vgala/scenario.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace vgala {

// --- metrics ----------------------------------------------------------------

struct BsMetricsRow {
    int bs_id = 0;
    double rho = 0.0;
    double latency = 0.0;        // vartheta * rho / (1 - rho)
    double power_w = 0.0;
    double on_grid_w = 0.0;
    double green_capacity = 0.0; // rho_hat at the scenario's budgets
};

struct MetricsReport {
    double latency_metric = 0.0; // sum of per-station latency terms
    double on_grid_w = 0.0;
    std::vector<BsMetricsRow> per_bs;
    int iterations = 0;          // filled by the caller from the run
};

MetricsReport compute_metrics(const std::vector<double>& rho, const Scenario& sc,
                              double epsilon = 1e-3);

// (bs_id, rho, latency, power_w, on_grid_w, green_capacity) rows.
void export_metrics_csv(const MetricsReport& report, const std::string& path);

// --- Monte Carlo ------------------------------------------------------------

struct User {
    double x_m = 0.0;
    double y_m = 0.0;
    double traffic_bits = 0.0;
    int cell = 0; // containing grid cell
};

struct UserDraw {
    std::vector<User> users;
    std::uint64_t seed = 0;
};

// Poisson-many users, positions by traffic-density-weighted cell choice
// (uniform within the cell), sizes exponential with the given mean.
// Identical seeds reproduce the draw exactly.
UserDraw draw_users(const Scenario& sc, double mean_count, double mean_traffic_bits,
                    std::uint64_t seed);

// A scheme as seen by one user: the frozen per-cell station choice. The
// factories below capture the rate map by reference; it must outlive the
// selector.
struct SchemeSelector {
    std::string name;
    std::function<int(int cell)> select;
};

// Frozen vGALA / LA prices: argmax rate / phi over candidates.
SchemeSelector make_price_selector(const std::string& name, std::vector<double> phi,
                                   const RateMap& rm);
// Frozen CRE bias: argmax z * rate over candidates.
SchemeSelector make_bias_selector(const std::string& name, CreBias bias, const RateMap& rm);

struct MonteCarloStats {
    std::string scheme;
    int n_draws = 0;
    double mean_latency = 0.0;
    double se_latency = 0.0;     // standard error of the mean
    double mean_on_grid_w = 0.0;
    double se_on_grid_w = 0.0;
    long clamped_draws = 0;      // draws where some station load hit 1 - epsilon
};

// Each draw is one second of arrivals: a user of size nu served at rate r
// occupies its station for nu / r seconds, so station load is the sum of
// nu / r over its users, clamped into [0, 1 - epsilon]. All schemes see the
// same draws.
std::vector<MonteCarloStats> monte_carlo_compare(const Scenario& sc, const RateMap& rm,
                                                 const std::vector<SchemeSelector>& schemes,
                                                 int n_draws, double mean_count,
                                                 double mean_traffic_bits, std::uint64_t seed,
                                                 double epsilon = 1e-3);

// (scheme, n_draws, mean_latency, se_latency, mean_on_grid_w, se_on_grid_w,
//  clamped_draws) rows.
void export_monte_carlo_csv(const std::vector<MonteCarloStats>& stats, const std::string& path);

// --- sweeps -----------------------------------------------------------------

struct ParamSweepRow {
    double param_value = 0.0;
    std::string scheme;
    double latency_metric = 0.0;
    double on_grid_w = 0.0;
    int iterations = 0;
};

// One run per kappa value; scheme column is "vgala".
std::vector<ParamSweepRow> sweep_kappa(const Scenario& sc, const RateMap& rm,
                                       const std::vector<double>& kappas,
                                       const OptimizerConfig& cfg);

// One run per theta value, applied uniformly through the theta override.
std::vector<ParamSweepRow> sweep_theta(const Scenario& sc, const RateMap& rm,
                                       const std::vector<double>& thetas,
                                       const OptimizerConfig& cfg);

// True when the two associations agree on every cell that carries traffic.
// Cells with zero arrival rate have no users, so their entries are ignored.
bool associations_match_on_traffic(const std::vector<int>& a, const std::vector<int>& b,
                                   const Scenario& sc);

struct SolarSweepPoint {
    double efficiency = 0.0;
    int region = 0;                    // 1: all rho_hat floored, 4: all ceiled, 2/3 between
    bool association_equals_la = false;
    ParamSweepRow vgala;
    ParamSweepRow la;
};

// Rebuilds every station's green budget from its panel area at each
// efficiency, then runs vGALA and LA. Region 2 still burns on-grid power,
// region 3 does not.
std::vector<SolarSweepPoint> sweep_solar(const Scenario& sc, const RateMap& rm,
                                         const std::vector<double>& efficiencies,
                                         const OptimizerConfig& cfg);

std::vector<double> default_efficiency_grid(int points = 10, double max_efficiency = 0.35);

// (param_value, scheme, latency_metric, on_grid_w, iterations) rows.
void export_sweep_csv(const std::vector<ParamSweepRow>& rows, const std::string& path);

std::vector<ParamSweepRow> flatten_solar_sweep(const std::vector<SolarSweepPoint>& points);

} // namespace vgala
