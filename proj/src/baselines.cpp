#include "vgala/baselines.hpp"

#include "vgala/energy.hpp"
#include "vgala/io.hpp"

#include <cmath>
#include <stdexcept>

namespace vgala {

RunResult run_la(const Scenario& sc, const RateMap& rm, const OptimizerConfig& cfg,
                 const AdmissionField& admission) {
    OptimizerConfig la = cfg;
    la.kappa = 0.0;
    return run_vgala(sc, rm, la, admission);
}

RunResult run_ga(const Scenario& sc, const RateMap& rm, const OptimizerConfig& cfg,
                 const AdmissionField& admission, double kappa_large) {
    OptimizerConfig ga = cfg;
    ga.kappa = kappa_large;
    ga.theta_override = 1.0;
    return run_vgala(sc, rm, ga, admission);
}

// --- cell range expansion ---------------------------------------------------

CreBias CreBias::two_tier(const Scenario& sc, double small_bias) {
    CreBias b;
    b.z.reserve(sc.stations.size());
    for (const auto& bs : sc.stations)
        b.z.push_back(bs.tier == Tier::small ? small_bias : 1.0);
    return b;
}

void CreBias::validate(const Scenario& sc) const {
    if (static_cast<int>(z.size()) != sc.n_bs())
        throw std::invalid_argument("cre bias: size does not match the station count");
    double small_value = 0.0;
    bool seen_small = false;
    for (int j = 0; j < sc.n_bs(); ++j) {
        if (!(z[j] > 0.0))
            throw std::invalid_argument("cre bias: z must be positive at station " +
                                        std::to_string(j));
        if (sc.stations[j].tier == Tier::macro) {
            if (z[j] != 1.0)
                throw std::invalid_argument("cre bias: macro stations must keep z = 1 (station " +
                                            std::to_string(j) + ")");
        } else {
            if (seen_small && z[j] != small_value)
                throw std::invalid_argument(
                    "cre bias: small-tier stations must share one value (station " +
                    std::to_string(j) + ")");
            small_value = z[j];
            seen_small = true;
        }
    }
}

int cre_select(int cell, const CreBias& bias, const RateMap& rm) {
    int best = -1;
    double best_score = 0.0;
    for (int j = 0; j < rm.n_bs; ++j) {
        if (!rm.is_candidate(cell, j)) continue;
        double score = bias.z[j] * rm.rate(cell, j);
        if (best < 0 || score > best_score) {
            best = j;
            best_score = score;
        }
    }
    return best;
}

std::vector<int> cre_association(const CreBias& bias, const RateMap& rm) {
    std::vector<int> assoc(rm.n_cells, -1);
    for (int c = 0; c < rm.n_cells; ++c) assoc[c] = cre_select(c, bias, rm);
    return assoc;
}

std::string cre_criterion_name(CreCriterion c) {
    switch (c) {
        case CreCriterion::latency: return "latency";
        case CreCriterion::on_grid: return "on_grid";
        case CreCriterion::psi: return "psi";
    }
    return "?";
}

namespace {

double criterion_value(CreCriterion criterion, const std::vector<double>& rho,
                       const Scenario& sc, const ObjectiveParams& params) {
    switch (criterion) {
        case CreCriterion::latency: {
            double s = 0.0;
            for (int j = 0; j < sc.n_bs(); ++j)
                s += latency_indicator(rho[j], sc.stations[j].vartheta_s);
            return s;
        }
        case CreCriterion::on_grid:
            return total_on_grid_power_w(sc, rho);
        case CreCriterion::psi:
            return objective_psi(rho, params);
    }
    return 0.0;
}

} // namespace

CreSweepResult sweep_cre_bias(const Scenario& sc, const RateMap& rm, CreCriterion criterion,
                              const OptimizerConfig& cfg, int grid_points, double log2_min,
                              double log2_max) {
    if (grid_points < 1) throw std::invalid_argument("cre sweep: grid_points must be >= 1");
    cfg.validate();
    ObjectiveParams params = make_objective_params(sc, cfg);
    AdmissionField no_admission;

    CreSweepResult result;
    result.rows.reserve(grid_points);
    int best_index = -1;
    for (int i = 0; i < grid_points; ++i) {
        double t = grid_points == 1 ? 0.0 : static_cast<double>(i) / (grid_points - 1);
        double bias_value = std::exp2(log2_min + t * (log2_max - log2_min));
        CreBias bias = CreBias::two_tier(sc, bias_value);
        std::vector<int> assoc = cre_association(bias, rm);
        std::vector<double> rho = perceived_loads(assoc, sc, rm, no_admission, cfg.epsilon);

        CreSweepRow row;
        row.bias = bias_value;
        row.latency_metric = criterion_value(CreCriterion::latency, rho, sc, params);
        row.on_grid_w = criterion_value(CreCriterion::on_grid, rho, sc, params);
        row.psi = criterion_value(CreCriterion::psi, rho, sc, params);
        result.rows.push_back(row);

        double value = criterion == CreCriterion::latency ? row.latency_metric
                       : criterion == CreCriterion::on_grid ? row.on_grid_w
                                                            : row.psi;
        if (best_index < 0 || value < result.best_value) {
            best_index = i;
            result.best_value = value;
            result.best_bias = bias_value;
        }
    }
    result.best = CreBias::two_tier(sc, result.best_bias);
    return result;
}

void export_cre_sweep_csv(const std::vector<CreSweepRow>& rows, const std::string& path) {
    CsvWriter csv(path, {"bias", "latency_metric", "on_grid_w", "psi"});
    for (const auto& r : rows) csv.row_values({r.bias, r.latency_metric, r.on_grid_w, r.psi});
}

// --- exhaustive oracle ------------------------------------------------------

OracleResult exhaustive_oracle(const Scenario& sc, const RateMap& rm, const OptimizerConfig& cfg,
                               OracleObjective objective, const AdmissionField& admission,
                               long long guard) {
    cfg.validate();
    admission.validate();
    ObjectiveParams params = make_objective_params(sc, cfg);
    int n_bs = sc.n_bs();

    // Loaded cells and their candidate lists; cells without traffic cannot
    // move psi and stay unassigned.
    std::vector<int> loaded;
    std::vector<std::vector<int>> cands;
    long long total = 1;
    for (int c = 0; c < rm.n_cells; ++c) {
        const auto& cell = sc.grid.cells[c];
        if (cell.lambda_aps * cell.nu_bits <= 0.0) continue;
        std::vector<int> list;
        for (int j = 0; j < n_bs; ++j)
            if (rm.is_candidate(c, j)) list.push_back(j);
        if (list.empty())
            throw std::runtime_error("oracle: cell " + std::to_string(c) +
                                     " carries traffic but has no candidate station");
        loaded.push_back(c);
        cands.push_back(std::move(list));
        if (total > guard / static_cast<long long>(cands.back().size()) + 1)
            total = guard + 1; // saturate to avoid overflow
        else
            total *= static_cast<long long>(cands.back().size());
        if (total > guard)
            throw std::runtime_error("oracle: instance too large (" + std::to_string(total) +
                                     "+ associations exceed the guard of " +
                                     std::to_string(guard) + ")");
    }

    int n_loaded = static_cast<int>(loaded.size());
    // Offered load density of each loaded cell on each of its candidates.
    std::vector<std::vector<double>> density(n_loaded);
    for (int i = 0; i < n_loaded; ++i) {
        int c = loaded[i];
        double mu = admission.mu.empty() ? 1.0 : admission.mu[c];
        const auto& cell = sc.grid.cells[c];
        density[i].reserve(cands[i].size());
        for (int j : cands[i])
            density[i].push_back(mu * cell.lambda_aps * cell.nu_bits / rm.rate(c, j));
    }

    OracleResult result;
    result.enumerated = total;
    result.best_association.assign(rm.n_cells, -1);

    std::vector<int> pick(n_loaded, 0); // odometer over candidate lists
    std::vector<double> rho(n_bs, 0.0);
    double best = 0.0;
    bool have_best = false;
    double cap = 1.0 - cfg.epsilon;
    for (;;) {
        std::fill(rho.begin(), rho.end(), 0.0);
        for (int i = 0; i < n_loaded; ++i) rho[cands[i][pick[i]]] += density[i][pick[i]];
        for (double& r : rho) r = std::min(r, cap);
        double value = objective == OracleObjective::psi ? objective_psi(rho, params)
                                                         : total_on_grid_power_w(sc, rho);
        if (!have_best || value < best) {
            have_best = true;
            best = value;
            for (int i = 0; i < n_loaded; ++i) result.best_association[loaded[i]] = cands[i][pick[i]];
        }
        int i = n_loaded - 1;
        while (i >= 0 && pick[i] + 1 == static_cast<int>(cands[i].size())) pick[i--] = 0;
        if (i < 0) break;
        ++pick[i];
    }
    result.best_psi = best;
    return result;
}

} // namespace vgala
