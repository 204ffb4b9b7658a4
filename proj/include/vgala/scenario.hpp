// scenario.hpp
//
// The immutable world description for a load balancing run: area grid,
// base station roster, channel model, traffic field, and the precomputed
// per-location downlink rates with candidate masks.
//
// Propagation follows COST 231 Walfisch-Ikegami style path loss curves:
//   macro:  PL = 128.1 + 37.6 log10(d_km)   (d in kilometers)
//   small:  PL = 38 + 10 log10(d_m)         (d in meters)
// Shadowing and Rayleigh fading enter as fixed link margins by default;
// shadowing can optionally be a seeded log-normal field. Interference is
// static full-load power from same-tier stations (the two tiers use
// disjoint spectrum).

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vgala {

enum class Tier { macro, small };

std::string tier_name(Tier t);
Tier tier_from_name(const std::string& name);

struct LocationCell {
    double cx_m = 0.0;       // cell center
    double cy_m = 0.0;
    double lambda_aps = 0.0; // arrivals per second integrated over the cell
    double nu_bits = 0.0;    // mean traffic size per arrival
};

struct AreaGrid {
    double width_m = 0.0;
    double height_m = 0.0;
    double cell_size_m = 0.0;
    int n_rows = 0;
    int n_cols = 0;
    std::vector<LocationCell> cells; // row-major

    int n_cells() const { return n_rows * n_cols; }
    int cell_index(int row, int col) const { return row * n_cols + col; }
};

struct BaseStation {
    int id = 0;
    Tier tier = Tier::macro;
    double x_m = 0.0;
    double y_m = 0.0;
    double tx_power_dbm = 43.0;
    double bandwidth_hz = 10e6;
    double static_power_w = 750.0;     // power draw at zero load
    double load_power_coeff_w = 500.0; // watts per unit load
    double green_budget_w = 0.0;       // harvested power available this run
    double panel_area_m2 = 0.0;        // >0: budget derives from the solar model
    double theta = 0.8;                // energy-latency coefficient in [0,1]
    double vartheta_s = 1.0;           // latency scale of the M/G/1 indicator
};

struct ChannelParams {
    double shadowing_db = 5.0;
    double rayleigh_margin_db = 9.0;
    double antenna_gain_db = 15.0;
    double noise_dbm_per_hz = -174.0;
    double receiver_sensitivity_dbm = -123.0;
    double uplink_pathloss_threshold_db = 140.0; // candidacy gate alpha*
    bool lognormal_shadowing = false;            // per-link N(0, sigma) draw instead of the fixed margin
    double shadowing_sigma_db = 5.0;
};

struct SolarParams {
    double efficiency = 0.174;
    double irradiance_w_m2 = 1000.0;
};

struct Scenario {
    AreaGrid grid;
    std::vector<BaseStation> stations;
    ChannelParams channel;
    SolarParams solar;
    std::uint64_t seed = 0; // shadowing realization

    int n_bs() const { return static_cast<int>(stations.size()); }
    double total_offered_bps() const; // sum of lambda * nu over cells
};

// Per-location, per-station downlink rates. Non-candidate entries hold the
// sentinel rate zeta, small enough that they can never win a selection.
struct RateMap {
    int n_cells = 0;
    int n_bs = 0;
    double zeta = 1e-3; // bits/s assigned to non-candidate links
    std::vector<double> rates_bps;   // [cell * n_bs + j]
    std::vector<std::uint8_t> candidate;

    double rate(int cell, int j) const { return rates_bps[static_cast<std::size_t>(cell) * n_bs + j]; }
    bool is_candidate(int cell, int j) const { return candidate[static_cast<std::size_t>(cell) * n_bs + j] != 0; }
};

// --- propagation -----------------------------------------------------------

// Path loss in dB at the given distance. Non-positive distances are clamped
// to min_distance_m (a user co-located with a station).
double pathloss_db(Tier tier, double distance_m, double min_distance_m = 1.0);

// Downlink received power from station j at the cell center, after path loss,
// antenna gain and fading margins. Deterministic given scenario.seed.
double received_power_dbm(const Scenario& sc, int cell, int j);

// Uplink path loss used for the candidacy gate (channel reciprocity: same
// path loss curve, no margins).
double uplink_pathloss_db(const Scenario& sc, int cell, int j);

// Linear SINR for the (cell, station) link. Interference is the static
// full-load received power from every other same-tier station.
double sinr(const Scenario& sc, int cell, int j);

// Shannon rate W * log2(1 + SINR) for candidates; zeta otherwise. A link is
// a candidate when received power clears the receiver sensitivity and the
// uplink path loss stays below the threshold.
double rate_bps(const Scenario& sc, int cell, int j, double zeta = 1e-3);

// Offered load density of one cell on one station: lambda * nu / rate.
double traffic_density(const Scenario& sc, int cell, int j, const RateMap& rm);

// Builds the full rate/candidate matrix. Throws if any cell with traffic has
// no candidate station.
RateMap build_rate_map(const Scenario& sc, double zeta = 1e-3);

// --- construction ----------------------------------------------------------

// Grid with uniform traffic: total_arrival_rate spread proportionally to cell
// area, constant traffic size per arrival.
AreaGrid make_uniform_grid(double width_m, double height_m, double cell_size_m,
                           double total_arrival_rate, double nu_bits);

struct RandomScenarioParams {
    double width_m = 2000.0;
    double height_m = 2000.0;
    double cell_size_m = 20.0;
    int n_macro = 3;
    int n_small = 7;
    double total_arrival_rate = 200.0;
    double nu_bits = 250e3;
    double macro_budget_min_w = 750.0; // green generation capacity ranges
    double macro_budget_max_w = 1300.0;
    double small_budget_min_w = 37.0;
    double small_budget_max_w = 48.0;
    double theta = 0.8;
    double placement_margin_m = 100.0;
};

// Stations placed uniformly at random (seeded); panel areas sized so the
// green budget at the reference solar parameters lands in the given ranges.
Scenario make_random_scenario(const RandomScenarioParams& p, std::uint64_t seed);

// Recompute every station's green budget from its panel area and the
// scenario's solar parameters. Stations without a panel keep their explicit
// budget.
void apply_solar_budgets(Scenario& sc);

// --- serialization ---------------------------------------------------------

Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& sc, const std::string& path);

// (cell_index, bs_id, rate_bps, candidate) rows.
void export_rate_map_csv(const RateMap& rm, const Scenario& sc, const std::string& path);

} // namespace vgala
