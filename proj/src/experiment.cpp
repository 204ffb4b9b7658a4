#include "vgala/experiment.hpp"

#include "vgala/baselines.hpp"
#include "vgala/energy.hpp"
#include "vgala/evaluation.hpp"
#include "vgala/io.hpp"
#include "vgala/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <stdexcept>

namespace vgala {

using json = nlohmann::json;

const std::vector<std::string> kExperimentKinds = {
    "run", "sweep-kappa", "sweep-theta", "sweep-solar", "compare-cre", "oracle-check",
    "monte-carlo"};

namespace {

const char* kVersion = "1.0.0";

std::string join_kinds() {
    std::string s;
    for (const auto& k : kExperimentKinds) {
        if (!s.empty()) s += "|";
        s += k;
    }
    return s;
}

double as_number(const json& v, const std::string& field) {
    if (!v.is_number()) throw std::runtime_error(field + ": must be a number");
    return v.get<double>();
}

int as_int(const json& v, const std::string& field) {
    if (!v.is_number_integer()) throw std::runtime_error(field + ": must be an integer");
    return v.get<int>();
}

std::string as_string(const json& v, const std::string& field) {
    if (!v.is_string()) throw std::runtime_error(field + ": must be a string");
    return v.get<std::string>();
}

std::vector<double> as_number_array(const json& v, const std::string& field) {
    if (!v.is_array()) throw std::runtime_error(field + ": must be an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& e : v) out.push_back(as_number(e, field + " element"));
    return out;
}

void reject_unknown_keys(const json& obj, const std::vector<std::string>& known,
                         const std::string& where) {
    for (const auto& item : obj.items())
        if (std::find(known.begin(), known.end(), item.key()) == known.end())
            throw std::runtime_error(where + ": unknown field '" + item.key() + "'");
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
    return cfg.out_dir + "/" + name;
}

} // namespace

void ExperimentConfig::validate() const {
    if (scenario_path.empty()) throw std::runtime_error("scenario: a scenario file path is required");
    if (std::find(kExperimentKinds.begin(), kExperimentKinds.end(), kind) ==
        kExperimentKinds.end())
        throw std::runtime_error("kind: must be one of " + join_kinds());
    if (out_dir.empty()) throw std::runtime_error("out_dir: must not be empty");
    optimizer.validate();
    if (admission_mu && !(*admission_mu >= 0.0 && *admission_mu <= 1.0))
        throw std::runtime_error("admission_mu: must be in [0, 1]");
    for (double k : kappa_grid)
        if (k < 0) throw std::runtime_error("grids.kappa: values must be >= 0");
    for (double t : theta_grid)
        if (t < 0 || t > 1) throw std::runtime_error("grids.theta: values must be in [0, 1]");
    for (std::size_t i = 0; i < efficiency_grid.size(); ++i) {
        if (efficiency_grid[i] < 0)
            throw std::runtime_error("grids.efficiency: values must be >= 0");
        if (i > 0 && efficiency_grid[i] < efficiency_grid[i - 1])
            throw std::runtime_error("grids.efficiency: values must be sorted ascending");
    }
    if (kappa_grid.empty()) throw std::runtime_error("grids.kappa: must not be empty");
    if (theta_grid.empty()) throw std::runtime_error("grids.theta: must not be empty");
    if (mc_draws < 1) throw std::runtime_error("monte_carlo.draws: must be >= 1");
    if (mc_mean_count < 0) throw std::runtime_error("monte_carlo.mean_count: must be >= 0");
    if (mc_mean_traffic_bits < 0)
        throw std::runtime_error("monte_carlo.mean_traffic_bits: must be >= 0");
    if (cre_grid_points < 1) throw std::runtime_error("cre.grid_points: must be >= 1");
    if (cre_log2_min > cre_log2_max)
        throw std::runtime_error("cre.log2_min: must not exceed cre.log2_max");
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw std::runtime_error("config parse error in " + path + ": " + e.what());
    }
    if (!doc.is_object()) throw std::runtime_error("config: top level must be an object");
    reject_unknown_keys(doc,
                        {"scenario", "kind", "out_dir", "seed", "optimizer", "admission_mu",
                         "export_rate_map", "grids", "monte_carlo", "cre"},
                        "config");

    ExperimentConfig cfg;
    if (!doc.contains("scenario")) throw std::runtime_error("scenario: a scenario file path is required");
    cfg.scenario_path = as_string(doc.at("scenario"), "scenario");
    if (doc.contains("kind")) cfg.kind = as_string(doc.at("kind"), "kind");
    if (doc.contains("out_dir")) cfg.out_dir = as_string(doc.at("out_dir"), "out_dir");
    if (doc.contains("seed")) {
        if (!doc.at("seed").is_number_unsigned() && !doc.at("seed").is_number_integer())
            throw std::runtime_error("seed: must be a non-negative integer");
        cfg.seed = doc.at("seed").get<std::uint64_t>();
    }

    if (doc.contains("optimizer")) {
        const auto& o = doc.at("optimizer");
        if (!o.is_object()) throw std::runtime_error("optimizer: must be an object");
        reject_unknown_keys(o,
                            {"kappa", "theta", "epsilon", "sigma_armijo", "xi", "max_iters",
                             "psi_tol_rel", "backtrack_cap"},
                            "optimizer");
        if (o.contains("kappa")) cfg.optimizer.kappa = as_number(o.at("kappa"), "optimizer.kappa");
        if (o.contains("theta"))
            cfg.optimizer.theta_override = as_number(o.at("theta"), "optimizer.theta");
        if (o.contains("epsilon"))
            cfg.optimizer.epsilon = as_number(o.at("epsilon"), "optimizer.epsilon");
        if (o.contains("sigma_armijo"))
            cfg.optimizer.sigma_armijo = as_number(o.at("sigma_armijo"), "optimizer.sigma_armijo");
        if (o.contains("xi")) cfg.optimizer.xi = as_number(o.at("xi"), "optimizer.xi");
        if (o.contains("max_iters"))
            cfg.optimizer.max_iters = as_int(o.at("max_iters"), "optimizer.max_iters");
        if (o.contains("psi_tol_rel"))
            cfg.optimizer.psi_tol_rel = as_number(o.at("psi_tol_rel"), "optimizer.psi_tol_rel");
        if (o.contains("backtrack_cap"))
            cfg.optimizer.backtrack_cap = as_int(o.at("backtrack_cap"), "optimizer.backtrack_cap");
    }

    if (doc.contains("admission_mu"))
        cfg.admission_mu = as_number(doc.at("admission_mu"), "admission_mu");
    if (doc.contains("export_rate_map")) {
        if (!doc.at("export_rate_map").is_boolean())
            throw std::runtime_error("export_rate_map: must be a boolean");
        cfg.export_rate_map = doc.at("export_rate_map").get<bool>();
    }

    if (doc.contains("grids")) {
        const auto& g = doc.at("grids");
        if (!g.is_object()) throw std::runtime_error("grids: must be an object");
        reject_unknown_keys(g, {"kappa", "theta", "efficiency"}, "grids");
        if (g.contains("kappa")) cfg.kappa_grid = as_number_array(g.at("kappa"), "grids.kappa");
        if (g.contains("theta")) cfg.theta_grid = as_number_array(g.at("theta"), "grids.theta");
        if (g.contains("efficiency"))
            cfg.efficiency_grid = as_number_array(g.at("efficiency"), "grids.efficiency");
    }

    if (doc.contains("monte_carlo")) {
        const auto& m = doc.at("monte_carlo");
        if (!m.is_object()) throw std::runtime_error("monte_carlo: must be an object");
        reject_unknown_keys(m, {"draws", "mean_count", "mean_traffic_bits"}, "monte_carlo");
        if (m.contains("draws")) cfg.mc_draws = as_int(m.at("draws"), "monte_carlo.draws");
        if (m.contains("mean_count"))
            cfg.mc_mean_count = as_number(m.at("mean_count"), "monte_carlo.mean_count");
        if (m.contains("mean_traffic_bits"))
            cfg.mc_mean_traffic_bits =
                as_number(m.at("mean_traffic_bits"), "monte_carlo.mean_traffic_bits");
    }

    if (doc.contains("cre")) {
        const auto& c = doc.at("cre");
        if (!c.is_object()) throw std::runtime_error("cre: must be an object");
        reject_unknown_keys(c, {"grid_points", "log2_min", "log2_max"}, "cre");
        if (c.contains("grid_points"))
            cfg.cre_grid_points = as_int(c.at("grid_points"), "cre.grid_points");
        if (c.contains("log2_min")) cfg.cre_log2_min = as_number(c.at("log2_min"), "cre.log2_min");
        if (c.contains("log2_max")) cfg.cre_log2_max = as_number(c.at("log2_max"), "cre.log2_max");
    }

    cfg.validate();
    return cfg;
}

namespace {

json config_to_json(const ExperimentConfig& cfg) {
    json doc;
    doc["scenario"] = cfg.scenario_path;
    doc["kind"] = cfg.kind;
    doc["out_dir"] = cfg.out_dir;
    doc["seed"] = cfg.seed;
    json o;
    o["kappa"] = cfg.optimizer.kappa;
    if (cfg.optimizer.theta_override) o["theta"] = *cfg.optimizer.theta_override;
    o["epsilon"] = cfg.optimizer.epsilon;
    o["sigma_armijo"] = cfg.optimizer.sigma_armijo;
    o["xi"] = cfg.optimizer.xi;
    o["max_iters"] = cfg.optimizer.max_iters;
    o["psi_tol_rel"] = cfg.optimizer.psi_tol_rel;
    o["backtrack_cap"] = cfg.optimizer.backtrack_cap;
    doc["optimizer"] = o;
    if (cfg.admission_mu) doc["admission_mu"] = *cfg.admission_mu;
    doc["export_rate_map"] = cfg.export_rate_map;
    doc["grids"] = {{"kappa", cfg.kappa_grid}, {"theta", cfg.theta_grid}};
    if (!cfg.efficiency_grid.empty()) doc["grids"]["efficiency"] = cfg.efficiency_grid;
    doc["monte_carlo"] = {{"draws", cfg.mc_draws},
                          {"mean_count", cfg.mc_mean_count},
                          {"mean_traffic_bits", cfg.mc_mean_traffic_bits}};
    doc["cre"] = {{"grid_points", cfg.cre_grid_points},
                  {"log2_min", cfg.cre_log2_min},
                  {"log2_max", cfg.cre_log2_max}};
    return doc;
}

void write_manifest(const ExperimentConfig& cfg) {
    json doc;
    doc["tool"] = "vgala";
    doc["version"] = kVersion;
    doc["config"] = config_to_json(cfg);
    std::ofstream out(out_path(cfg, "manifest.json"));
    if (!out) throw std::runtime_error("cannot write manifest in " + cfg.out_dir);
    out << doc.dump(2) << '\n';
}

AdmissionField make_admission(const ExperimentConfig& cfg, const Scenario& sc) {
    if (!cfg.admission_mu) return {};
    return AdmissionField::uniform(sc.grid.n_cells(), *cfg.admission_mu);
}

// Nonzero when the run ended in a state the config cannot justify: clamped
// stations without (or despite) admission control, or no convergence.
int check_run_health(const RunResult& res, const ExperimentConfig& cfg) {
    if (res.overloaded) {
        std::cerr << "error: stations";
        for (int j : res.clamped_bs) std::cerr << " " << j;
        std::cerr << " are clamped at full load; the offered traffic exceeds capacity."
                  << (cfg.admission_mu ? " Lower admission_mu to shed more load.\n"
                                       : " Set admission_mu below 1 to shed load.\n");
        return 1;
    }
    if (!res.converged) {
        std::cerr << "error: no convergence within " << cfg.optimizer.max_iters
                  << " iterations; raise max_iters or loosen psi_tol_rel\n";
        return 1;
    }
    return 0;
}

int experiment_run(const ExperimentConfig& cfg, const Scenario& sc, const RateMap& rm) {
    RunResult res = run_vgala(sc, rm, cfg.optimizer, make_admission(cfg, sc));
    export_trace_csv(res.trace, out_path(cfg, "trace.csv"));
    export_association_csv(res.association, sc, out_path(cfg, "association.csv"));
    export_energy_csv(sc, res.rho, cfg.optimizer.epsilon, out_path(cfg, "energy.csv"));
    MetricsReport m = compute_metrics(res.rho, sc, cfg.optimizer.epsilon);
    m.iterations = res.iterations;
    export_metrics_csv(m, out_path(cfg, "metrics.csv"));
    if (cfg.export_rate_map) export_rate_map_csv(rm, sc, out_path(cfg, "ratemap.csv"));
    std::cout << "run: iterations=" << res.iterations << " psi=" << format_double(res.psi_final)
              << " latency=" << format_double(m.latency_metric)
              << " on_grid_w=" << format_double(m.on_grid_w) << "\n";
    return check_run_health(res, cfg);
}

int experiment_sweep_kappa(const ExperimentConfig& cfg, const Scenario& sc, const RateMap& rm) {
    auto rows = sweep_kappa(sc, rm, cfg.kappa_grid, cfg.optimizer);
    export_sweep_csv(rows, out_path(cfg, "sweep_kappa.csv"));
    std::cout << "sweep-kappa: " << rows.size() << " points -> sweep_kappa.csv\n";
    return 0;
}

int experiment_sweep_theta(const ExperimentConfig& cfg, const Scenario& sc, const RateMap& rm) {
    auto rows = sweep_theta(sc, rm, cfg.theta_grid, cfg.optimizer);
    export_sweep_csv(rows, out_path(cfg, "sweep_theta.csv"));
    std::cout << "sweep-theta: " << rows.size() << " points -> sweep_theta.csv\n";
    return 0;
}

int experiment_sweep_solar(const ExperimentConfig& cfg, const Scenario& sc, const RateMap& rm) {
    std::vector<double> grid =
        cfg.efficiency_grid.empty() ? default_efficiency_grid() : cfg.efficiency_grid;
    auto points = sweep_solar(sc, rm, grid, cfg.optimizer);
    export_sweep_csv(flatten_solar_sweep(points), out_path(cfg, "sweep_solar.csv"));
    for (const auto& p : points)
        std::cout << "efficiency=" << format_double(p.efficiency) << " region=R" << p.region
                  << " on_grid_w=" << format_double(p.vgala.on_grid_w)
                  << (p.association_equals_la ? " association=la" : "") << "\n";
    return 0;
}

int experiment_compare_cre(const ExperimentConfig& cfg, const Scenario& sc, const RateMap& rm) {
    CsvWriter summary(out_path(cfg, "cre_compare.csv"),
                      {"scheme", "bias", "latency_metric", "on_grid_w", "psi"});
    ObjectiveParams params = make_objective_params(sc, cfg.optimizer);
    AdmissionField none;

    for (CreCriterion crit :
         {CreCriterion::latency, CreCriterion::on_grid, CreCriterion::psi}) {
        std::string name = cre_criterion_name(crit);
        CreSweepResult sweep = sweep_cre_bias(sc, rm, crit, cfg.optimizer, cfg.cre_grid_points,
                                              cfg.cre_log2_min, cfg.cre_log2_max);
        export_cre_sweep_csv(sweep.rows, out_path(cfg, "cre_sweep_" + name + ".csv"));
        std::vector<int> assoc = cre_association(sweep.best, rm);
        std::vector<double> rho = perceived_loads(assoc, sc, rm, none, cfg.optimizer.epsilon);
        MetricsReport m = compute_metrics(rho, sc, cfg.optimizer.epsilon);
        summary.row({"cre_" + name, CsvWriter::cell(sweep.best_bias),
                     CsvWriter::cell(m.latency_metric), CsvWriter::cell(m.on_grid_w),
                     CsvWriter::cell(objective_psi(rho, params))});
        std::cout << "cre_" << name << ": bias=" << format_double(sweep.best_bias)
                  << " latency=" << format_double(m.latency_metric)
                  << " on_grid_w=" << format_double(m.on_grid_w) << "\n";
    }

    RunResult vg = run_vgala(sc, rm, cfg.optimizer, make_admission(cfg, sc));
    MetricsReport m = compute_metrics(vg.induced_loads, sc, cfg.optimizer.epsilon);
    summary.row({"vgala", CsvWriter::cell(0), CsvWriter::cell(m.latency_metric),
                 CsvWriter::cell(m.on_grid_w), CsvWriter::cell(vg.psi_induced)});
    std::cout << "vgala: latency=" << format_double(m.latency_metric)
              << " on_grid_w=" << format_double(m.on_grid_w) << "\n";
    return check_run_health(vg, cfg);
}

int experiment_oracle_check(const ExperimentConfig& cfg, const Scenario& sc, const RateMap& rm) {
    OracleResult oracle = exhaustive_oracle(sc, rm, cfg.optimizer, OracleObjective::psi,
                                            make_admission(cfg, sc));
    RunResult res = run_vgala(sc, rm, cfg.optimizer, make_admission(cfg, sc));
    double rel = std::abs(res.psi_induced - oracle.best_psi) /
                 std::max(std::abs(oracle.best_psi), 1e-300);
    bool pass = rel <= 1e-4;
    std::cout << (pass ? "PASS" : "FAIL") << " oracle_psi=" << format_double(oracle.best_psi)
              << " vgala_psi=" << format_double(res.psi_induced)
              << " rel_diff=" << format_double(rel) << " enumerated=" << oracle.enumerated
              << "\n";
    CsvWriter csv(out_path(cfg, "oracle_check.csv"),
                  {"oracle_psi", "vgala_psi", "rel_diff", "enumerated"});
    csv.row({CsvWriter::cell(oracle.best_psi), CsvWriter::cell(res.psi_induced),
             CsvWriter::cell(rel), CsvWriter::cell(static_cast<std::size_t>(oracle.enumerated))});
    return pass ? 0 : 1;
}

int experiment_monte_carlo(const ExperimentConfig& cfg, const Scenario& sc, const RateMap& rm) {
    AdmissionField admission = make_admission(cfg, sc);
    RunResult vg = run_vgala(sc, rm, cfg.optimizer, admission);
    RunResult la = run_la(sc, rm, cfg.optimizer, admission);

    std::vector<SchemeSelector> schemes;
    schemes.push_back(make_price_selector("vgala", vg.phi, rm));
    schemes.push_back(make_price_selector("la", la.phi, rm));
    for (CreCriterion crit :
         {CreCriterion::latency, CreCriterion::on_grid, CreCriterion::psi}) {
        CreSweepResult sweep = sweep_cre_bias(sc, rm, crit, cfg.optimizer, cfg.cre_grid_points,
                                              cfg.cre_log2_min, cfg.cre_log2_max);
        schemes.push_back(
            make_bias_selector("cre_" + cre_criterion_name(crit), sweep.best, rm));
    }

    double total_lambda = 0.0;
    for (const auto& c : sc.grid.cells) total_lambda += c.lambda_aps;
    double mean_count = cfg.mc_mean_count > 0 ? cfg.mc_mean_count : total_lambda;
    double mean_traffic = cfg.mc_mean_traffic_bits > 0
                              ? cfg.mc_mean_traffic_bits
                              : sc.total_offered_bps() / std::max(total_lambda, 1e-300);

    auto stats = monte_carlo_compare(sc, rm, schemes, cfg.mc_draws, mean_count, mean_traffic,
                                     cfg.seed, cfg.optimizer.epsilon);
    export_monte_carlo_csv(stats, out_path(cfg, "monte_carlo.csv"));
    for (const auto& st : stats)
        std::cout << st.scheme << ": latency=" << format_double(st.mean_latency) << " (se "
                  << format_double(st.se_latency)
                  << ") on_grid_w=" << format_double(st.mean_on_grid_w) << " (se "
                  << format_double(st.se_on_grid_w) << ") clamped=" << st.clamped_draws << "/"
                  << st.n_draws << "\n";
    return check_run_health(vg, cfg);
}

} // namespace

void save_config(const ExperimentConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config file: " + path);
    out << config_to_json(cfg).dump(2) << '\n';
}

int run_experiment(const ExperimentConfig& cfg) {
    try {
        cfg.validate();
        Scenario sc = load_scenario(cfg.scenario_path);
        ensure_directory(cfg.out_dir);
        write_manifest(cfg);
        RateMap rm = build_rate_map(sc);
        if (cfg.kind == "run") return experiment_run(cfg, sc, rm);
        if (cfg.kind == "sweep-kappa") return experiment_sweep_kappa(cfg, sc, rm);
        if (cfg.kind == "sweep-theta") return experiment_sweep_theta(cfg, sc, rm);
        if (cfg.kind == "sweep-solar") return experiment_sweep_solar(cfg, sc, rm);
        if (cfg.kind == "compare-cre") return experiment_compare_cre(cfg, sc, rm);
        if (cfg.kind == "oracle-check") return experiment_oracle_check(cfg, sc, rm);
        if (cfg.kind == "monte-carlo") return experiment_monte_carlo(cfg, sc, rm);
        throw std::runtime_error("kind: must be one of " + join_kinds());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace vgala
