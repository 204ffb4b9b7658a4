#include "vgala/optimizer.hpp"

#include "vgala/energy.hpp"
#include "vgala/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vgala {

// --- configuration ---------------------------------------------------------

void OptimizerConfig::validate() const {
    if (kappa < 0) throw std::runtime_error("optimizer.kappa: must be >= 0");
    if (!(epsilon > 0 && epsilon < 0.5))
        throw std::runtime_error("optimizer.epsilon: must be in (0, 0.5)");
    if (!(sigma_armijo > 0 && sigma_armijo < 0.5))
        throw std::runtime_error("optimizer.sigma_armijo: must be in (0, 0.5)");
    if (!(xi > 0 && xi < 1)) throw std::runtime_error("optimizer.xi: must be in (0, 1)");
    if (max_iters < 1) throw std::runtime_error("optimizer.max_iters: must be >= 1");
    if (psi_tol_rel <= 0) throw std::runtime_error("optimizer.psi_tol_rel: must be > 0");
    if (backtrack_cap < 1) throw std::runtime_error("optimizer.backtrack_cap: must be >= 1");
    if (theta_override && (*theta_override < 0 || *theta_override > 1))
        throw std::runtime_error("optimizer.theta_override: must be in [0, 1]");
}

PerformanceModel latency_performance_model() {
    PerformanceModel m;
    m.f = [](double rho) { return rho / (1.0 - rho); };
    m.df = [](double rho) { return 1.0 / ((1.0 - rho) * (1.0 - rho)); };
    m.d2f = [](double rho) { return 2.0 / std::pow(1.0 - rho, 3); };
    return m;
}

PerformanceModel make_custom_model(std::function<double(double)> f,
                                   std::function<double(double)> df,
                                   double epsilon, int grid_points) {
    const double hi = 1.0 - epsilon;
    std::vector<double> grid(grid_points);
    for (int i = 0; i < grid_points; ++i) grid[i] = hi * i / (grid_points - 1);

    const double slack = 1e-12;
    for (int i = 0; i < grid_points; ++i) {
        double rho = grid[i];
        // positivity is only required where traffic can sit (rho > 0)
        if (rho > 0.0 && !(f(rho) > 0.0))
            throw std::runtime_error("custom model rejected: f(" + format_double(rho) +
                                     ") = " + format_double(f(rho)) + " is not positive");
        if (df(rho) < -slack)
            throw std::runtime_error("custom model rejected: f'(" + format_double(rho) +
                                     ") = " + format_double(df(rho)) + " is negative");
        if (i > 0 && df(grid[i]) - df(grid[i - 1]) < -slack)
            throw std::runtime_error("custom model rejected: f' decreases at rho = " +
                                     format_double(rho) + " (f'' < 0)");
    }
    return PerformanceModel{std::move(f), std::move(df), nullptr};
}

ObjectiveParams make_objective_params(const Scenario& sc, const OptimizerConfig& cfg) {
    cfg.validate();
    ObjectiveParams p;
    p.kappa = cfg.kappa;
    p.epsilon = cfg.epsilon;
    p.theta.reserve(sc.stations.size());
    p.vartheta.reserve(sc.stations.size());
    for (const auto& b : sc.stations) {
        p.theta.push_back(cfg.theta_override ? *cfg.theta_override : b.theta);
        p.vartheta.push_back(b.vartheta_s);
    }
    p.rho_hat = green_capacities(sc, cfg.epsilon);
    return p;
}

AdmissionField AdmissionField::uniform(int n_cells, double mu_value) {
    AdmissionField a;
    a.mu.assign(n_cells, mu_value);
    a.validate();
    return a;
}

void AdmissionField::validate() const {
    for (double v : mu)
        if (!(v >= 0.0 && v <= 1.0))
            throw std::runtime_error("admission.mu: values must be in [0, 1]");
}

// --- objective and prices --------------------------------------------------

double latency_indicator(double rho, double vartheta) {
    if (!(rho >= 0.0 && rho < 1.0))
        throw std::domain_error("latency_indicator: rho must be in [0, 1)");
    return vartheta * rho / (1.0 - rho);
}

double weight(double rho, double theta, double rho_hat, double kappa) {
    return std::exp(kappa * theta * (rho - rho_hat));
}

namespace {

void check_domain(const std::vector<double>& rho, const ObjectiveParams& p) {
    if (static_cast<int>(rho.size()) != p.n_bs())
        throw std::invalid_argument("load vector size does not match station count");
    const double hi = 1.0 - p.epsilon;
    for (double r : rho)
        if (!(r >= 0.0 && r <= hi + 1e-15))
            throw std::domain_error("load component outside [0, 1 - epsilon]");
}

} // namespace

double objective_psi(const std::vector<double>& rho, const ObjectiveParams& p) {
    check_domain(rho, p);
    double total = 0.0;
    for (int j = 0; j < p.n_bs(); ++j)
        total += weight(rho[j], p.theta[j], p.rho_hat[j], p.kappa) * p.vartheta[j] *
                 p.model.f(rho[j]);
    return total;
}

std::vector<double> operation_status(const std::vector<double>& rho, const ObjectiveParams& p) {
    check_domain(rho, p);
    std::vector<double> phi(rho.size());
    for (int j = 0; j < p.n_bs(); ++j) {
        double a = p.kappa * p.theta[j];
        double w = weight(rho[j], p.theta[j], p.rho_hat[j], p.kappa);
        // product rule: w' f + w f'
        phi[j] = p.vartheta[j] * w * (a * p.model.f(rho[j]) + p.model.df(rho[j]));
    }
    return phi;
}

double psi_second_derivative(double rho, int j, const ObjectiveParams& p) {
    double a = p.kappa * p.theta[j];
    double w = weight(rho, p.theta[j], p.rho_hat[j], p.kappa);
    double d2f;
    if (p.model.d2f) {
        d2f = p.model.d2f(rho);
    } else {
        double h = 1e-6;
        double lo = std::max(rho - h, 0.0);
        double hi = std::min(rho + h, 1.0 - p.epsilon);
        d2f = (p.model.df(hi) - p.model.df(lo)) / (hi - lo);
    }
    return p.vartheta[j] * w * (a * a * p.model.f(rho) + 2.0 * a * p.model.df(rho) + d2f);
}

ConvexityBounds estimate_convexity_bounds(const ObjectiveParams& p, int grid_points) {
    ConvexityBounds b;
    b.q = std::numeric_limits<double>::infinity();
    b.big_q = 0.0;
    const double hi = 1.0 - p.epsilon;
    for (int j = 0; j < p.n_bs(); ++j) {
        for (int i = 0; i < grid_points; ++i) {
            double rho = hi * i / (grid_points - 1);
            double dd = psi_second_derivative(rho, j, p);
            b.q = std::min(b.q, dd);
            b.big_q = std::max(b.big_q, dd);
        }
    }
    return b;
}

// --- one iteration ----------------------------------------------------------

int select_bs(int cell, const std::vector<double>& phi, const RateMap& rm) {
    int best = -1;
    double best_score = -1.0;
    for (int j = 0; j < rm.n_bs; ++j) {
        if (!rm.is_candidate(cell, j)) continue;
        double score = rm.rate(cell, j) / phi[j];
        if (score > best_score) {
            best_score = score;
            best = j;
        }
    }
    return best;
}

std::vector<int> build_association(const std::vector<double>& phi, const RateMap& rm) {
    std::vector<int> assoc(rm.n_cells);
    for (int c = 0; c < rm.n_cells; ++c) assoc[c] = select_bs(c, phi, rm);
    return assoc;
}

std::vector<double> perceived_loads(const std::vector<int>& assoc, const Scenario& sc,
                                    const RateMap& rm, const AdmissionField& admission,
                                    double epsilon, std::vector<std::uint8_t>* clamped_mask) {
    std::vector<double> m(rm.n_bs, 0.0);
    for (int c = 0; c < rm.n_cells; ++c) {
        int j = assoc[c];
        if (j < 0) continue;
        const auto& cell = sc.grid.cells[c];
        if (cell.lambda_aps <= 0.0) continue;
        double mu = admission.mu.empty() ? 1.0 : admission.mu[c];
        m[j] += mu * cell.lambda_aps * cell.nu_bits / rm.rate(c, j);
    }
    if (clamped_mask) clamped_mask->assign(rm.n_bs, 0);
    const double hi = 1.0 - epsilon;
    for (int j = 0; j < rm.n_bs; ++j) {
        if (m[j] > hi) {
            m[j] = hi;
            if (clamped_mask) (*clamped_mask)[j] = 1;
        }
    }
    return m;
}

std::vector<double> mix_loads(const std::vector<double>& rho, const std::vector<double>& m,
                              double delta) {
    std::vector<double> next(rho.size());
    for (std::size_t j = 0; j < rho.size(); ++j)
        next[j] = delta * rho[j] + (1.0 - delta) * m[j];
    return next;
}

BacktrackResult backtrack_delta(const std::vector<double>& rho, const std::vector<double>& m,
                                const ObjectiveParams& p, const OptimizerConfig& cfg) {
    const double psi_here = objective_psi(rho, p);
    const std::vector<double> phi = operation_status(rho, p);
    double inner = 0.0;
    for (std::size_t j = 0; j < rho.size(); ++j) inner += phi[j] * (m[j] - rho[j]);

    BacktrackResult res;
    double stride = 1.0; // 1 - delta
    for (int depth = 0; depth <= cfg.backtrack_cap; ++depth) {
        double psi_next = objective_psi(mix_loads(rho, m, 1.0 - stride), p);
        if (psi_next <= psi_here + cfg.sigma_armijo * stride * inner) {
            res.delta = 1.0 - stride;
            res.steps = depth;
            return res;
        }
        stride *= cfg.xi;
    }
    throw std::runtime_error("backtracking line search exceeded depth cap (" +
                             std::to_string(cfg.backtrack_cap) +
                             "); search direction is not a descent direction");
}

VgalaState init_vgala(const RunContext& ctx) {
    VgalaState st;
    const RateMap& rm = ctx.rate_map;
    // Pre-balancing network state: every cell on its highest-rate candidate.
    st.association.resize(rm.n_cells);
    for (int c = 0; c < rm.n_cells; ++c) {
        int best = -1;
        double best_rate = -1.0;
        for (int j = 0; j < rm.n_bs; ++j) {
            if (!rm.is_candidate(c, j)) continue;
            if (rm.rate(c, j) > best_rate) {
                best_rate = rm.rate(c, j);
                best = j;
            }
        }
        st.association[c] = best;
    }
    std::vector<std::uint8_t> clamped;
    st.rho = perceived_loads(st.association, ctx.scenario, rm, ctx.admission,
                             ctx.params.epsilon, &clamped);
    if (std::find(clamped.begin(), clamped.end(), 1) != clamped.end()) ++st.clamp_events;
    st.phi = operation_status(st.rho, ctx.params);
    st.psi = objective_psi(st.rho, ctx.params);
    st.iter = 0;
    st.trace.push_back({0, st.psi, 0.0, 0, st.rho});
    return st;
}

bool step(VgalaState& state, const RunContext& ctx) {
    std::vector<int> assoc = build_association(state.phi, ctx.rate_map);
    std::vector<std::uint8_t> clamped;
    std::vector<double> m = perceived_loads(assoc, ctx.scenario, ctx.rate_map,
                                            ctx.admission, ctx.params.epsilon, &clamped);
    if (std::find(clamped.begin(), clamped.end(), 1) != clamped.end()) ++state.clamp_events;
    if (m == state.rho) {
        state.association = std::move(assoc);
        state.fixed_point = true;
        return false;
    }
    BacktrackResult bt = backtrack_delta(state.rho, m, ctx.params, ctx.config);
    state.rho = mix_loads(state.rho, m, bt.delta);
    state.phi = operation_status(state.rho, ctx.params);
    state.psi = objective_psi(state.rho, ctx.params);
    state.association = std::move(assoc);
    ++state.iter;
    state.trace.push_back({state.iter, state.psi, bt.delta, bt.steps, state.rho});
    return true;
}

// --- full run ---------------------------------------------------------------

RunResult run_vgala(const Scenario& sc, const RateMap& rm, const OptimizerConfig& cfg,
                    const AdmissionField& admission, const PerformanceModel* custom_model) {
    cfg.validate();
    admission.validate();
    if (!admission.mu.empty() && static_cast<int>(admission.mu.size()) != rm.n_cells)
        throw std::invalid_argument("admission field size does not match cell count");

    ObjectiveParams params = make_objective_params(sc, cfg);
    if (custom_model) params.model = *custom_model;

    RunContext ctx{sc, rm, params, cfg, admission};
    VgalaState st = init_vgala(ctx);
    const double psi_tol = cfg.psi_tol_rel * std::max(st.psi, 1e-300);

    RunResult out;
    for (int k = 0; k < cfg.max_iters; ++k) {
        double psi_prev = st.psi;
        if (!step(st, ctx)) {
            out.converged = true;
            out.fixed_point = true;
            break;
        }
        if (std::abs(psi_prev - st.psi) < psi_tol) {
            out.converged = true;
            break;
        }
    }

    // Determine the discrete association from the converged prices.
    st.phi = operation_status(st.rho, ctx.params);
    std::vector<int> assoc = build_association(st.phi, rm);
    std::vector<std::uint8_t> clamped;
    std::vector<double> induced =
        perceived_loads(assoc, sc, rm, admission, params.epsilon, &clamped);

    out.association = std::move(assoc);
    out.rho = st.rho;
    out.phi = st.phi;
    out.trace = std::move(st.trace);
    out.iterations = st.iter;
    out.psi_final = st.psi;
    out.psi_induced = objective_psi(induced, params);
    out.induced_loads = std::move(induced);
    for (int j = 0; j < rm.n_bs; ++j)
        if (clamped[j]) out.clamped_bs.push_back(j);
    out.overloaded = !out.clamped_bs.empty();
    out.clamp_events = st.clamp_events;
    return out;
}

double convergence_bound(double psi_initial, double psi_star, double q, double big_q,
                         const OptimizerConfig& cfg, double tol) {
    if (!(q > 0.0) || big_q < q)
        throw std::runtime_error("convergence_bound: invalid convexity estimate (q <= 0)");
    double z = 1.0 - std::min(2.0 * q * cfg.sigma_armijo,
                              2.0 * q * cfg.sigma_armijo * cfg.xi / big_q);
    if (z >= 1.0) throw std::runtime_error("convergence_bound: contraction factor >= 1");
    double gap = psi_initial - psi_star;
    if (gap <= tol) return 0.0;
    if (z <= 0.0) return 1.0; // one geometric step already lands inside tol
    return std::ceil(std::log(gap / tol) / std::log(1.0 / z));
}

// --- exports ----------------------------------------------------------------

void export_trace_csv(const std::vector<TraceRecord>& trace, const std::string& path) {
    std::size_t n_bs = trace.empty() ? 0 : trace.front().rho.size();
    std::vector<std::string> header = {"iter", "psi", "delta", "backtrack_steps"};
    for (std::size_t j = 0; j < n_bs; ++j) header.push_back("rho_" + std::to_string(j + 1));
    CsvWriter csv(path, header);
    for (const auto& rec : trace) {
        std::vector<std::string> row = {CsvWriter::cell(rec.iter), CsvWriter::cell(rec.psi),
                                        CsvWriter::cell(rec.delta),
                                        CsvWriter::cell(rec.backtrack_steps)};
        for (double r : rec.rho) row.push_back(CsvWriter::cell(r));
        csv.row(row);
    }
}

void export_association_csv(const std::vector<int>& assoc, const Scenario& sc,
                            const std::string& path) {
    CsvWriter csv(path, {"row", "col", "bs_id"});
    for (int r = 0; r < sc.grid.n_rows; ++r)
        for (int c = 0; c < sc.grid.n_cols; ++c) {
            int j = assoc[sc.grid.cell_index(r, c)];
            int id = j >= 0 ? sc.stations[j].id : -1;
            csv.row({CsvWriter::cell(r), CsvWriter::cell(c), CsvWriter::cell(id)});
        }
}

} // namespace vgala
