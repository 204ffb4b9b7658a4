#include "vgala/scenario.hpp"

#include "vgala/io.hpp"
#include "vgala/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

using nlohmann::json;

namespace vgala {

std::string tier_name(Tier t) { return t == Tier::macro ? "macro" : "small"; }

Tier tier_from_name(const std::string& name) {
    if (name == "macro") return Tier::macro;
    if (name == "small") return Tier::small;
    throw std::runtime_error("unknown tier '" + name + "' (expected macro|small)");
}

double Scenario::total_offered_bps() const {
    double total = 0.0;
    for (const auto& c : grid.cells) total += c.lambda_aps * c.nu_bits;
    return total;
}

// --- propagation -----------------------------------------------------------

double pathloss_db(Tier tier, double distance_m, double min_distance_m) {
    double d = std::max(distance_m, min_distance_m);
    if (tier == Tier::macro) return 128.1 + 37.6 * std::log10(d / 1000.0);
    return 38.0 + 10.0 * std::log10(d);
}

namespace {

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

double link_distance_m(const Scenario& sc, int cell, int j) {
    const auto& c = sc.grid.cells[cell];
    const auto& b = sc.stations[j];
    return std::hypot(c.cx_m - b.x_m, c.cy_m - b.y_m);
}

double min_link_distance_m(const Scenario& sc) { return sc.grid.cell_size_m / 2.0; }

double shadowing_loss_db(const Scenario& sc, int cell, int j) {
    if (!sc.channel.lognormal_shadowing) return sc.channel.shadowing_db;
    Rng rng(derive_seed(sc.seed, static_cast<std::uint64_t>(cell) + 1,
                        static_cast<std::uint64_t>(j) + 1));
    return rng.normal(0.0, sc.channel.shadowing_sigma_db);
}

} // namespace

double received_power_dbm(const Scenario& sc, int cell, int j) {
    const auto& b = sc.stations[j];
    double pl = pathloss_db(b.tier, link_distance_m(sc, cell, j), min_link_distance_m(sc));
    return b.tx_power_dbm - pl + sc.channel.antenna_gain_db -
           shadowing_loss_db(sc, cell, j) - sc.channel.rayleigh_margin_db;
}

double uplink_pathloss_db(const Scenario& sc, int cell, int j) {
    const auto& b = sc.stations[j];
    return pathloss_db(b.tier, link_distance_m(sc, cell, j), min_link_distance_m(sc));
}

double sinr(const Scenario& sc, int cell, int j) {
    const auto& b = sc.stations[j];
    double signal_mw = dbm_to_mw(received_power_dbm(sc, cell, j));
    double noise_mw = dbm_to_mw(sc.channel.noise_dbm_per_hz) * b.bandwidth_hz;
    double interference_mw = 0.0;
    for (int k = 0; k < sc.n_bs(); ++k) {
        if (k == j || sc.stations[k].tier != b.tier) continue;
        interference_mw += dbm_to_mw(received_power_dbm(sc, cell, k));
    }
    return signal_mw / (noise_mw + interference_mw);
}

double rate_bps(const Scenario& sc, int cell, int j, double zeta) {
    bool candidate = received_power_dbm(sc, cell, j) >= sc.channel.receiver_sensitivity_dbm &&
                     uplink_pathloss_db(sc, cell, j) <= sc.channel.uplink_pathloss_threshold_db;
    if (!candidate) return zeta;
    double r = sc.stations[j].bandwidth_hz * std::log2(1.0 + sinr(sc, cell, j));
    return r > zeta ? r : zeta;
}

double traffic_density(const Scenario& sc, int cell, int j, const RateMap& rm) {
    const auto& c = sc.grid.cells[cell];
    return c.lambda_aps * c.nu_bits / rm.rate(cell, j);
}

RateMap build_rate_map(const Scenario& sc, double zeta) {
    if (sc.n_bs() == 0) throw std::runtime_error("scenario has no stations");
    RateMap rm;
    rm.n_cells = sc.grid.n_cells();
    rm.n_bs = sc.n_bs();
    rm.zeta = zeta;
    rm.rates_bps.resize(static_cast<std::size_t>(rm.n_cells) * rm.n_bs);
    rm.candidate.resize(rm.rates_bps.size());

    for (int c = 0; c < rm.n_cells; ++c) {
        bool any = false;
        for (int j = 0; j < rm.n_bs; ++j) {
            double r = rate_bps(sc, c, j, zeta);
            std::size_t idx = static_cast<std::size_t>(c) * rm.n_bs + j;
            rm.rates_bps[idx] = r;
            rm.candidate[idx] = r > zeta ? 1 : 0;
            any = any || r > zeta;
        }
        if (!any && sc.grid.cells[c].lambda_aps > 0.0)
            throw std::runtime_error("cell " + std::to_string(c) +
                                     " carries traffic but has no candidate station");
    }
    return rm;
}

// --- construction ----------------------------------------------------------

AreaGrid make_uniform_grid(double width_m, double height_m, double cell_size_m,
                           double total_arrival_rate, double nu_bits) {
    if (width_m <= 0 || height_m <= 0 || cell_size_m <= 0)
        throw std::runtime_error("area dimensions and cell size must be positive");
    AreaGrid g;
    g.width_m = width_m;
    g.height_m = height_m;
    g.cell_size_m = cell_size_m;
    g.n_cols = static_cast<int>(std::ceil(width_m / cell_size_m));
    g.n_rows = static_cast<int>(std::ceil(height_m / cell_size_m));
    g.cells.resize(static_cast<std::size_t>(g.n_rows) * g.n_cols);

    const double total_area = width_m * height_m;
    for (int r = 0; r < g.n_rows; ++r) {
        // Edge cells are clipped to the area, so centers stay strictly inside
        // and the per-cell arrival rates integrate exactly to the total.
        double y0 = r * cell_size_m;
        double y1 = std::min(y0 + cell_size_m, height_m);
        for (int c = 0; c < g.n_cols; ++c) {
            double x0 = c * cell_size_m;
            double x1 = std::min(x0 + cell_size_m, width_m);
            auto& cell = g.cells[g.cell_index(r, c)];
            cell.cx_m = 0.5 * (x0 + x1);
            cell.cy_m = 0.5 * (y0 + y1);
            cell.lambda_aps = total_arrival_rate * ((x1 - x0) * (y1 - y0)) / total_area;
            cell.nu_bits = nu_bits;
        }
    }
    return g;
}

Scenario make_random_scenario(const RandomScenarioParams& p, std::uint64_t seed) {
    Scenario sc;
    sc.seed = seed;
    sc.grid = make_uniform_grid(p.width_m, p.height_m, p.cell_size_m,
                                p.total_arrival_rate, p.nu_bits);

    Rng rng(derive_seed(seed, 0x5ca1ab1eULL));
    const double ref_w_per_m2 = sc.solar.efficiency * sc.solar.irradiance_w_m2;
    auto place = [&](Tier tier, int id) {
        BaseStation b;
        b.id = id;
        b.tier = tier;
        b.x_m = rng.uniform(p.placement_margin_m, p.width_m - p.placement_margin_m);
        b.y_m = rng.uniform(p.placement_margin_m, p.height_m - p.placement_margin_m);
        b.theta = p.theta;
        if (tier == Tier::macro) {
            b.tx_power_dbm = 43.0;
            b.static_power_w = 750.0;
            b.load_power_coeff_w = 500.0;
            b.panel_area_m2 = rng.uniform(p.macro_budget_min_w, p.macro_budget_max_w) / ref_w_per_m2;
        } else {
            b.tx_power_dbm = 30.0;
            b.static_power_w = 37.0;
            b.load_power_coeff_w = 4.0;
            b.panel_area_m2 = rng.uniform(p.small_budget_min_w, p.small_budget_max_w) / ref_w_per_m2;
        }
        return b;
    };
    int id = 1;
    for (int i = 0; i < p.n_macro; ++i) sc.stations.push_back(place(Tier::macro, id++));
    for (int i = 0; i < p.n_small; ++i) sc.stations.push_back(place(Tier::small, id++));
    apply_solar_budgets(sc);
    return sc;
}

void apply_solar_budgets(Scenario& sc) {
    for (auto& b : sc.stations) {
        if (b.panel_area_m2 > 0.0)
            b.green_budget_w = b.panel_area_m2 * sc.solar.efficiency * sc.solar.irradiance_w_m2;
    }
}

// --- serialization ---------------------------------------------------------

namespace {

void check_positive(double v, const std::string& field) {
    if (!(v > 0.0)) throw std::runtime_error(field + ": must be > 0");
}

} // namespace

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);
    json doc = json::parse(in);

    Scenario sc;
    const auto& area = doc.at("area");
    double width = area.at("width_m").get<double>();
    double height = area.at("height_m").get<double>();
    double cell = area.at("cell_size_m").get<double>();
    check_positive(width, "area.width_m");
    check_positive(height, "area.height_m");
    check_positive(cell, "area.cell_size_m");

    const auto& traffic = doc.at("traffic");
    double rate = traffic.at("arrival_rate_per_s").get<double>();
    double nu = traffic.at("mean_traffic_bits").get<double>();
    if (rate < 0) throw std::runtime_error("traffic.arrival_rate_per_s: must be >= 0");
    check_positive(nu, "traffic.mean_traffic_bits");
    sc.grid = make_uniform_grid(width, height, cell, rate, nu);

    // Optional per-cell overrides: rows of [row, col, lambda, nu].
    if (traffic.contains("cells")) {
        for (const auto& row : traffic.at("cells")) {
            int r = row.at(0).get<int>();
            int c = row.at(1).get<int>();
            if (r < 0 || r >= sc.grid.n_rows || c < 0 || c >= sc.grid.n_cols)
                throw std::runtime_error("traffic.cells: index out of grid");
            auto& lc = sc.grid.cells[sc.grid.cell_index(r, c)];
            lc.lambda_aps = row.at(2).get<double>();
            lc.nu_bits = row.at(3).get<double>();
            if (lc.lambda_aps < 0) throw std::runtime_error("traffic.cells: lambda must be >= 0");
            check_positive(lc.nu_bits, "traffic.cells nu");
        }
    }

    if (doc.contains("channel")) {
        const auto& ch = doc.at("channel");
        auto get = [&](const char* key, double dflt) {
            return ch.contains(key) ? ch.at(key).get<double>() : dflt;
        };
        sc.channel.shadowing_db = get("shadowing_db", sc.channel.shadowing_db);
        sc.channel.rayleigh_margin_db = get("rayleigh_margin_db", sc.channel.rayleigh_margin_db);
        sc.channel.antenna_gain_db = get("antenna_gain_db", sc.channel.antenna_gain_db);
        sc.channel.noise_dbm_per_hz = get("noise_dbm_per_hz", sc.channel.noise_dbm_per_hz);
        sc.channel.receiver_sensitivity_dbm =
            get("receiver_sensitivity_dbm", sc.channel.receiver_sensitivity_dbm);
        sc.channel.uplink_pathloss_threshold_db =
            get("uplink_pathloss_threshold_db", sc.channel.uplink_pathloss_threshold_db);
        sc.channel.shadowing_sigma_db = get("shadowing_sigma_db", sc.channel.shadowing_sigma_db);
        if (ch.contains("lognormal_shadowing"))
            sc.channel.lognormal_shadowing = ch.at("lognormal_shadowing").get<bool>();
        if (!std::isfinite(sc.channel.receiver_sensitivity_dbm) ||
            !std::isfinite(sc.channel.uplink_pathloss_threshold_db))
            throw std::runtime_error("channel: sensitivity and threshold must be finite");
    }

    if (doc.contains("solar")) {
        const auto& so = doc.at("solar");
        if (so.contains("efficiency")) sc.solar.efficiency = so.at("efficiency").get<double>();
        if (so.contains("irradiance_w_m2"))
            sc.solar.irradiance_w_m2 = so.at("irradiance_w_m2").get<double>();
        if (sc.solar.efficiency < 0 || sc.solar.irradiance_w_m2 < 0)
            throw std::runtime_error("solar: efficiency and irradiance must be >= 0");
    }

    if (doc.contains("seed")) sc.seed = doc.at("seed").get<std::uint64_t>();

    for (const auto& s : doc.at("stations")) {
        BaseStation b;
        b.id = s.at("id").get<int>();
        b.tier = tier_from_name(s.at("tier").get<std::string>());
        b.x_m = s.at("x_m").get<double>();
        b.y_m = s.at("y_m").get<double>();
        b.tx_power_dbm = s.at("tx_power_dbm").get<double>();
        b.bandwidth_hz = s.at("bandwidth_hz").get<double>();
        b.static_power_w = s.at("static_power_w").get<double>();
        b.load_power_coeff_w = s.at("load_power_coeff_w").get<double>();
        if (s.contains("green_budget_w")) b.green_budget_w = s.at("green_budget_w").get<double>();
        if (s.contains("panel_area_m2")) b.panel_area_m2 = s.at("panel_area_m2").get<double>();
        if (s.contains("theta")) b.theta = s.at("theta").get<double>();
        if (s.contains("vartheta_s")) b.vartheta_s = s.at("vartheta_s").get<double>();

        check_positive(b.bandwidth_hz, "stations.bandwidth_hz");
        check_positive(b.load_power_coeff_w, "stations.load_power_coeff_w");
        check_positive(b.vartheta_s, "stations.vartheta_s");
        if (b.static_power_w < 0) throw std::runtime_error("stations.static_power_w: must be >= 0");
        if (b.green_budget_w < 0) throw std::runtime_error("stations.green_budget_w: must be >= 0");
        if (b.panel_area_m2 < 0) throw std::runtime_error("stations.panel_area_m2: must be >= 0");
        if (b.theta < 0 || b.theta > 1)
            throw std::runtime_error("stations.theta: must be in [0,1]");
        sc.stations.push_back(b);
    }
    if (sc.stations.empty()) throw std::runtime_error("stations: at least one required");

    apply_solar_budgets(sc);
    return sc;
}

void save_scenario(const Scenario& sc, const std::string& path) {
    json doc;
    doc["area"] = {{"width_m", sc.grid.width_m},
                   {"height_m", sc.grid.height_m},
                   {"cell_size_m", sc.grid.cell_size_m}};
    // The uniform base field plus explicit per-cell rows for anything else.
    // Round-trips exactly for grids built by make_uniform_grid.
    doc["traffic"] = {{"arrival_rate_per_s", 0.0}, {"mean_traffic_bits", 1.0}};
    json cells = json::array();
    for (int r = 0; r < sc.grid.n_rows; ++r)
        for (int c = 0; c < sc.grid.n_cols; ++c) {
            const auto& lc = sc.grid.cells[sc.grid.cell_index(r, c)];
            cells.push_back({r, c, lc.lambda_aps, lc.nu_bits});
        }
    doc["traffic"]["cells"] = cells;
    doc["channel"] = {{"shadowing_db", sc.channel.shadowing_db},
                      {"rayleigh_margin_db", sc.channel.rayleigh_margin_db},
                      {"antenna_gain_db", sc.channel.antenna_gain_db},
                      {"noise_dbm_per_hz", sc.channel.noise_dbm_per_hz},
                      {"receiver_sensitivity_dbm", sc.channel.receiver_sensitivity_dbm},
                      {"uplink_pathloss_threshold_db", sc.channel.uplink_pathloss_threshold_db},
                      {"lognormal_shadowing", sc.channel.lognormal_shadowing},
                      {"shadowing_sigma_db", sc.channel.shadowing_sigma_db}};
    doc["solar"] = {{"efficiency", sc.solar.efficiency},
                    {"irradiance_w_m2", sc.solar.irradiance_w_m2}};
    doc["seed"] = sc.seed;
    json stations = json::array();
    for (const auto& b : sc.stations) {
        json s = {{"id", b.id},
                  {"tier", tier_name(b.tier)},
                  {"x_m", b.x_m},
                  {"y_m", b.y_m},
                  {"tx_power_dbm", b.tx_power_dbm},
                  {"bandwidth_hz", b.bandwidth_hz},
                  {"static_power_w", b.static_power_w},
                  {"load_power_coeff_w", b.load_power_coeff_w},
                  {"theta", b.theta},
                  {"vartheta_s", b.vartheta_s}};
        if (b.panel_area_m2 > 0)
            s["panel_area_m2"] = b.panel_area_m2;
        else
            s["green_budget_w"] = b.green_budget_w;
        stations.push_back(s);
    }
    doc["stations"] = stations;

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write scenario file: " + path);
    out << doc.dump(2) << '\n';
}

void export_rate_map_csv(const RateMap& rm, const Scenario& sc, const std::string& path) {
    CsvWriter csv(path, {"cell_index", "bs_id", "rate_bps", "candidate"});
    for (int c = 0; c < rm.n_cells; ++c)
        for (int j = 0; j < rm.n_bs; ++j)
            csv.row({CsvWriter::cell(c), CsvWriter::cell(sc.stations[j].id),
                     CsvWriter::cell(rm.rate(c, j)), CsvWriter::cell(rm.is_candidate(c, j) ? 1 : 0)});
}

} // namespace vgala
