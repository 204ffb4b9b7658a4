// optimizer.hpp
//
// The vGALA user association core. The network objective is
//
//     psi(rho) = sum_j w_j(rho_j) * vartheta_j * f(rho_j),
//     w_j(rho) = exp(kappa * theta_j * (rho - rho_hat_j)),
//
// with f(rho) = rho / (1 - rho) under the default M/G/1 latency model and
// rho_hat_j the green traffic capacity. Each iteration alternates a
// user-side selection (every location picks argmax rate / phi over its
// candidate stations, where phi = grad psi is the per-station access price)
// with a station-side damped update of the load vector, step size chosen by
// a backtracking line search under an Armijo-style sufficient decrease
// condition. psi is strongly convex and separable, so the iteration descends
// monotonically and the fixed point minimizes psi over all feasible discrete
// associations.

#pragma once

#include "vgala/scenario.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace vgala {

// --- configuration ---------------------------------------------------------

struct OptimizerConfig {
    double kappa = 4.0;
    double epsilon = 1e-3;        // load domain is [0, 1 - epsilon]
    double sigma_armijo = 0.3;    // sufficient-decrease constant, in (0, 0.5)
    double xi = 0.5;              // backtracking shrink factor, in (0, 1)
    int max_iters = 500;
    double psi_tol_rel = 1e-8;    // stop when |dpsi| < psi_tol_rel * psi(rho_1)
    int backtrack_cap = 60;       // depth beyond this is a numerical failure
    std::optional<double> theta_override; // use instead of per-station theta

    void validate() const; // throws naming the offending field
};

// Per-unit performance term f and its derivative. The default latency model
// and caller-supplied custom models run through the same evaluation path.
// d2f is optional; when absent the second derivative is differenced from df.
struct PerformanceModel {
    std::function<double(double)> f;
    std::function<double(double)> df;
    std::function<double(double)> d2f;
};

PerformanceModel latency_performance_model();

// Registers a custom model after checking f > 0 (on the loaded range),
// f' >= 0 and f'' >= 0 on a grid over [0, 1 - epsilon]. Throws naming the
// first violated grid point.
PerformanceModel make_custom_model(std::function<double(double)> f,
                                   std::function<double(double)> df,
                                   double epsilon, int grid_points = 257);

// Everything the objective needs besides the load vector.
struct ObjectiveParams {
    double kappa = 4.0;
    double epsilon = 1e-3;
    std::vector<double> theta;     // per station
    std::vector<double> vartheta;  // per station latency scale
    std::vector<double> rho_hat;   // per station green traffic capacity
    PerformanceModel model = latency_performance_model();

    int n_bs() const { return static_cast<int>(theta.size()); }
};

ObjectiveParams make_objective_params(const Scenario& sc, const OptimizerConfig& cfg);

// Per-location admission probabilities; scales the offered traffic to keep
// overloaded instances feasible. Constant within a run.
struct AdmissionField {
    std::vector<double> mu; // empty means admit everything

    static AdmissionField uniform(int n_cells, double mu_value);
    void validate() const;
};

// --- objective and prices --------------------------------------------------

// M/G/1 latency indicator vartheta * rho / (1 - rho). Throws on rho >= 1.
double latency_indicator(double rho, double vartheta);

// exp(kappa * theta * (rho - rho_hat))
double weight(double rho, double theta, double rho_hat, double kappa);

double objective_psi(const std::vector<double>& rho, const ObjectiveParams& p);

// phi_j = d psi / d rho_j, the access price of station j. For the latency
// model this is vartheta * e^{kappa theta (rho - rho_hat)}
// * (kappa theta rho (1 - rho) + 1) / (1 - rho)^2, strictly positive.
std::vector<double> operation_status(const std::vector<double>& rho, const ObjectiveParams& p);

// d^2 psi / d rho_j^2 via (w f)'' = w (a^2 f + 2 a f' + f''); analytic when
// the model carries d2f, otherwise f'' is differenced from df.
double psi_second_derivative(double rho, int j, const ObjectiveParams& p);

// min/max of the per-coordinate second derivative over a grid on
// [0, 1 - epsilon]; the strong convexity constants of the run.
struct ConvexityBounds {
    double q = 0.0;
    double big_q = 0.0;
};
ConvexityBounds estimate_convexity_bounds(const ObjectiveParams& p, int grid_points = 10000);

// --- one iteration ----------------------------------------------------------

// argmax over candidate stations of rate / price; ties to the lowest station
// index. Returns -1 if the cell has no candidate.
int select_bs(int cell, const std::vector<double>& phi, const RateMap& rm);

std::vector<int> build_association(const std::vector<double>& phi, const RateMap& rm);

// Load each station would carry under the association, admission-scaled and
// clamped to 1 - epsilon. Optionally reports which entries hit the clamp.
std::vector<double> perceived_loads(const std::vector<int>& assoc, const Scenario& sc,
                                    const RateMap& rm, const AdmissionField& admission,
                                    double epsilon,
                                    std::vector<std::uint8_t>* clamped_mask = nullptr);

// rho + (1 - delta) * (M - rho)
std::vector<double> mix_loads(const std::vector<double>& rho, const std::vector<double>& m,
                              double delta);

struct BacktrackResult {
    double delta = 0.0;
    int steps = 0;
};

// Smallest backtracking depth m >= 0 with delta = 1 - xi^m satisfying the
// sufficient decrease condition
//   psi(rho + (1-delta)(M-rho)) <= psi(rho) + sigma (1-delta) <phi, M-rho>.
// Throws past the depth cap (numerical breakdown; unreachable for a descent
// direction).
BacktrackResult backtrack_delta(const std::vector<double>& rho, const std::vector<double>& m,
                                const ObjectiveParams& p, const OptimizerConfig& cfg);

struct TraceRecord {
    int iter = 0;
    double psi = 0.0;
    double delta = 0.0;
    int backtrack_steps = 0;
    std::vector<double> rho;
};

struct VgalaState {
    std::vector<double> rho;
    std::vector<double> phi;
    std::vector<int> association;
    double psi = 0.0;
    int iter = 0;
    bool fixed_point = false;
    int clamp_events = 0; // iterations whose perceived loads hit 1 - epsilon
    std::vector<TraceRecord> trace;
};

struct RunContext {
    const Scenario& scenario;
    const RateMap& rate_map;
    const ObjectiveParams& params;
    const OptimizerConfig& config;
    const AdmissionField& admission;
};

// Initial state: every loaded cell on its highest-rate candidate, loads
// induced by that association (clamped), prices at that point.
VgalaState init_vgala(const RunContext& ctx);

// One user-side + station-side round. Returns false when the perceived loads
// already equal the iterate (exact fixed point, nothing appended).
bool step(VgalaState& state, const RunContext& ctx);

// --- full run ---------------------------------------------------------------

struct RunResult {
    std::vector<int> association;   // final discrete selection, -1 = uncovered
    std::vector<double> rho;        // converged load vector rho*
    std::vector<double> phi;        // prices at rho*
    std::vector<TraceRecord> trace;
    int iterations = 0;
    bool converged = false;
    bool fixed_point = false;       // terminated with M == rho exactly
    double psi_final = 0.0;         // psi(rho*)
    double psi_induced = 0.0;       // psi at the final association's loads
    std::vector<double> induced_loads;
    bool overloaded = false;        // some station clamped at 1 - epsilon
    std::vector<int> clamped_bs;    // station indices at the clamp
    int clamp_events = 0;           // iterations (incl. init) that hit the clamp
};

RunResult run_vgala(const Scenario& sc, const RateMap& rm, const OptimizerConfig& cfg,
                    const AdmissionField& admission = {},
                    const PerformanceModel* custom_model = nullptr);

// Worst-case iterations to bring psi within tol of the optimum, from the
// strong convexity constants: ceil(log(gap / tol) / log(1/z)) with
// z = 1 - min(2 q sigma, 2 q sigma xi / Q). Throws if the convexity
// estimate fails (q <= 0 or z >= 1).
double convergence_bound(double psi_initial, double psi_star, double q, double big_q,
                         const OptimizerConfig& cfg, double tol);

// --- exports ----------------------------------------------------------------

// (iter, psi, delta, backtrack_steps, rho_1..rho_n)
void export_trace_csv(const std::vector<TraceRecord>& trace, const std::string& path);

// (row, col, bs_id); bs_id -1 marks uncovered cells.
void export_association_csv(const std::vector<int>& assoc, const Scenario& sc,
                            const std::string& path);

} // namespace vgala
