#include "vgala/evaluation.hpp"

#include "vgala/energy.hpp"
#include "vgala/io.hpp"
#include "vgala/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vgala {

// --- metrics ----------------------------------------------------------------

MetricsReport compute_metrics(const std::vector<double>& rho, const Scenario& sc,
                              double epsilon) {
    if (static_cast<int>(rho.size()) != sc.n_bs())
        throw std::invalid_argument("metrics: rho size does not match the station count");
    MetricsReport report;
    report.per_bs.reserve(rho.size());
    for (int j = 0; j < sc.n_bs(); ++j) {
        const auto& bs = sc.stations[j];
        BsMetricsRow row;
        row.bs_id = bs.id;
        row.rho = rho[j];
        row.latency = latency_indicator(rho[j], bs.vartheta_s);
        row.power_w = bs_power_w(bs, rho[j]);
        row.on_grid_w = on_grid_power_w(bs, rho[j]);
        row.green_capacity = green_capacity(bs, epsilon);
        report.per_bs.push_back(row);
        report.latency_metric += row.latency;
        report.on_grid_w += row.on_grid_w;
    }
    return report;
}

void export_metrics_csv(const MetricsReport& report, const std::string& path) {
    CsvWriter csv(path, {"bs_id", "rho", "latency", "power_w", "on_grid_w", "green_capacity"});
    for (const auto& r : report.per_bs)
        csv.row({CsvWriter::cell(r.bs_id), CsvWriter::cell(r.rho), CsvWriter::cell(r.latency),
                 CsvWriter::cell(r.power_w), CsvWriter::cell(r.on_grid_w),
                 CsvWriter::cell(r.green_capacity)});
}

// --- Monte Carlo ------------------------------------------------------------

UserDraw draw_users(const Scenario& sc, double mean_count, double mean_traffic_bits,
                    std::uint64_t seed) {
    if (mean_count <= 0.0) throw std::invalid_argument("draw_users: mean_count must be > 0");
    UserDraw draw;
    draw.seed = seed;

    // Cumulative traffic weight over cells; users land only where lambda > 0.
    const auto& grid = sc.grid;
    std::vector<double> cum(grid.cells.size(), 0.0);
    double total = 0.0;
    for (std::size_t c = 0; c < grid.cells.size(); ++c) {
        total += grid.cells[c].lambda_aps;
        cum[c] = total;
    }
    if (total <= 0.0) return draw;

    Rng rng(seed);
    std::uint64_t count = rng.poisson(mean_count);
    draw.users.reserve(count);
    for (std::uint64_t u = 0; u < count; ++u) {
        double t = rng.uniform(0.0, total);
        int c = static_cast<int>(std::upper_bound(cum.begin(), cum.end(), t) - cum.begin());
        if (c >= static_cast<int>(cum.size())) c = static_cast<int>(cum.size()) - 1;

        // Uniform position inside the cell's clipped extent.
        int row = c / grid.n_cols;
        int col = c % grid.n_cols;
        double x_lo = col * grid.cell_size_m;
        double x_hi = std::min(x_lo + grid.cell_size_m, grid.width_m);
        double y_lo = row * grid.cell_size_m;
        double y_hi = std::min(y_lo + grid.cell_size_m, grid.height_m);

        User user;
        user.x_m = rng.uniform(x_lo, x_hi);
        user.y_m = rng.uniform(y_lo, y_hi);
        user.traffic_bits = rng.exponential(mean_traffic_bits);
        user.cell = c;
        draw.users.push_back(user);
    }
    return draw;
}

SchemeSelector make_price_selector(const std::string& name, std::vector<double> phi,
                                   const RateMap& rm) {
    SchemeSelector s;
    s.name = name;
    s.select = [phi = std::move(phi), &rm](int cell) { return select_bs(cell, phi, rm); };
    return s;
}

SchemeSelector make_bias_selector(const std::string& name, CreBias bias, const RateMap& rm) {
    SchemeSelector s;
    s.name = name;
    s.select = [bias = std::move(bias), &rm](int cell) { return cre_select(cell, bias, rm); };
    return s;
}

std::vector<MonteCarloStats> monte_carlo_compare(const Scenario& sc, const RateMap& rm,
                                                 const std::vector<SchemeSelector>& schemes,
                                                 int n_draws, double mean_count,
                                                 double mean_traffic_bits, std::uint64_t seed,
                                                 double epsilon) {
    if (n_draws < 1) throw std::invalid_argument("monte carlo: n_draws must be >= 1");
    int n_bs = sc.n_bs();
    std::size_t n_schemes = schemes.size();

    std::vector<double> sum_lat(n_schemes, 0.0), sum_lat2(n_schemes, 0.0);
    std::vector<double> sum_grid(n_schemes, 0.0), sum_grid2(n_schemes, 0.0);
    std::vector<long> clamped(n_schemes, 0);

    std::vector<double> rho(n_bs);
    for (int d = 0; d < n_draws; ++d) {
        UserDraw draw = draw_users(sc, mean_count, mean_traffic_bits, derive_seed(seed, d + 1));
        for (std::size_t s = 0; s < n_schemes; ++s) {
            std::fill(rho.begin(), rho.end(), 0.0);
            for (const auto& user : draw.users) {
                int j = schemes[s].select(user.cell);
                if (j >= 0) rho[j] += user.traffic_bits / rm.rate(user.cell, j);
            }
            bool hit = false;
            for (double& r : rho) {
                if (r > 1.0 - epsilon) {
                    r = 1.0 - epsilon;
                    hit = true;
                }
            }
            if (hit) ++clamped[s];
            MetricsReport m = compute_metrics(rho, sc, epsilon);
            sum_lat[s] += m.latency_metric;
            sum_lat2[s] += m.latency_metric * m.latency_metric;
            sum_grid[s] += m.on_grid_w;
            sum_grid2[s] += m.on_grid_w * m.on_grid_w;
        }
    }

    auto standard_error = [n_draws](double sum, double sum2) {
        if (n_draws < 2) return 0.0;
        double mean = sum / n_draws;
        double var = (sum2 - n_draws * mean * mean) / (n_draws - 1);
        return std::sqrt(std::max(var, 0.0) / n_draws);
    };

    std::vector<MonteCarloStats> stats;
    stats.reserve(n_schemes);
    for (std::size_t s = 0; s < n_schemes; ++s) {
        MonteCarloStats st;
        st.scheme = schemes[s].name;
        st.n_draws = n_draws;
        st.mean_latency = sum_lat[s] / n_draws;
        st.se_latency = standard_error(sum_lat[s], sum_lat2[s]);
        st.mean_on_grid_w = sum_grid[s] / n_draws;
        st.se_on_grid_w = standard_error(sum_grid[s], sum_grid2[s]);
        st.clamped_draws = clamped[s];
        stats.push_back(st);
    }
    return stats;
}

void export_monte_carlo_csv(const std::vector<MonteCarloStats>& stats, const std::string& path) {
    CsvWriter csv(path, {"scheme", "n_draws", "mean_latency", "se_latency", "mean_on_grid_w",
                         "se_on_grid_w", "clamped_draws"});
    for (const auto& st : stats)
        csv.row({st.scheme, CsvWriter::cell(st.n_draws), CsvWriter::cell(st.mean_latency),
                 CsvWriter::cell(st.se_latency), CsvWriter::cell(st.mean_on_grid_w),
                 CsvWriter::cell(st.se_on_grid_w), CsvWriter::cell(st.clamped_draws)});
}

// --- sweeps -----------------------------------------------------------------

namespace {

ParamSweepRow summarize_run(double param_value, const std::string& scheme, const RunResult& res,
                            const Scenario& sc, double epsilon) {
    MetricsReport m = compute_metrics(res.rho, sc, epsilon);
    ParamSweepRow row;
    row.param_value = param_value;
    row.scheme = scheme;
    row.latency_metric = m.latency_metric;
    row.on_grid_w = m.on_grid_w;
    row.iterations = res.iterations;
    return row;
}

} // namespace

std::vector<ParamSweepRow> sweep_kappa(const Scenario& sc, const RateMap& rm,
                                       const std::vector<double>& kappas,
                                       const OptimizerConfig& cfg) {
    std::vector<ParamSweepRow> rows;
    rows.reserve(kappas.size());
    for (double kappa : kappas) {
        OptimizerConfig c = cfg;
        c.kappa = kappa;
        RunResult res = run_vgala(sc, rm, c);
        rows.push_back(summarize_run(kappa, "vgala", res, sc, c.epsilon));
    }
    return rows;
}

std::vector<ParamSweepRow> sweep_theta(const Scenario& sc, const RateMap& rm,
                                       const std::vector<double>& thetas,
                                       const OptimizerConfig& cfg) {
    std::vector<ParamSweepRow> rows;
    rows.reserve(thetas.size());
    for (double theta : thetas) {
        OptimizerConfig c = cfg;
        c.theta_override = theta;
        RunResult res = run_vgala(sc, rm, c);
        rows.push_back(summarize_run(theta, "vgala", res, sc, c.epsilon));
    }
    return rows;
}

bool associations_match_on_traffic(const std::vector<int>& a, const std::vector<int>& b,
                                   const Scenario& sc) {
    if (a.size() != b.size() || static_cast<int>(a.size()) != sc.grid.n_cells())
        throw std::invalid_argument("association compare: size does not match the grid");
    // Cells without traffic carry no users, so their argmax entry is irrelevant.
    for (std::size_t c = 0; c < a.size(); ++c)
        if (sc.grid.cells[c].lambda_aps > 0.0 && a[c] != b[c]) return false;
    return true;
}

std::vector<SolarSweepPoint> sweep_solar(const Scenario& sc, const RateMap& rm,
                                         const std::vector<double>& efficiencies,
                                         const OptimizerConfig& cfg) {
    for (std::size_t i = 1; i < efficiencies.size(); ++i)
        if (efficiencies[i] < efficiencies[i - 1])
            throw std::invalid_argument("solar sweep: efficiencies must be sorted ascending");

    std::vector<SolarSweepPoint> points;
    points.reserve(efficiencies.size());
    for (double eff : efficiencies) {
        Scenario tuned = sc;
        tuned.solar.efficiency = eff;
        apply_solar_budgets(tuned);

        RunResult vg = run_vgala(tuned, rm, cfg);
        RunResult la = run_la(tuned, rm, cfg);

        SolarSweepPoint point;
        point.efficiency = eff;
        point.vgala = summarize_run(eff, "vgala", vg, tuned, cfg.epsilon);
        point.la = summarize_run(eff, "la", la, tuned, cfg.epsilon);
        point.association_equals_la =
            associations_match_on_traffic(vg.association, la.association, tuned);

        std::vector<double> rho_hat = green_capacities(tuned, cfg.epsilon);
        bool all_floor = true, all_ceil = true;
        for (double rh : rho_hat) {
            if (rh != cfg.epsilon) all_floor = false;
            if (rh != 1.0 - cfg.epsilon) all_ceil = false;
        }
        if (all_floor)
            point.region = 1;
        else if (all_ceil)
            point.region = 4;
        else
            point.region = point.vgala.on_grid_w > 0.0 ? 2 : 3;
        points.push_back(point);
    }
    return points;
}

std::vector<double> default_efficiency_grid(int points, double max_efficiency) {
    if (points < 2) throw std::invalid_argument("efficiency grid: points must be >= 2");
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i)
        grid[i] = max_efficiency * static_cast<double>(i) / (points - 1);
    return grid;
}

void export_sweep_csv(const std::vector<ParamSweepRow>& rows, const std::string& path) {
    CsvWriter csv(path, {"param_value", "scheme", "latency_metric", "on_grid_w", "iterations"});
    for (const auto& r : rows)
        csv.row({CsvWriter::cell(r.param_value), r.scheme, CsvWriter::cell(r.latency_metric),
                 CsvWriter::cell(r.on_grid_w), CsvWriter::cell(r.iterations)});
}

std::vector<ParamSweepRow> flatten_solar_sweep(const std::vector<SolarSweepPoint>& points) {
    std::vector<ParamSweepRow> rows;
    rows.reserve(points.size() * 2);
    for (const auto& p : points) {
        rows.push_back(p.vgala);
        rows.push_back(p.la);
    }
    return rows;
}

} // namespace vgala
