#include <doctest.h>

#include "vgala/evaluation.hpp"
#include "vgala/energy.hpp"

#include <cmath>
#include <vector>

using namespace vgala;

namespace {

Scenario two_station_scenario() {
    Scenario sc;
    sc.grid = make_uniform_grid(800, 200, 400, 10.0, 250e3);
    double xs[] = {200, 600};
    double budgets[] = {900, 700};
    for (int i = 0; i < 2; ++i) {
        BaseStation b;
        b.id = i + 1;
        b.tier = Tier::macro;
        b.x_m = xs[i];
        b.y_m = 100;
        b.green_budget_w = budgets[i];
        sc.stations.push_back(b);
    }
    return sc;
}

Scenario paneled_random(std::uint64_t seed) {
    RandomScenarioParams p;
    p.n_macro = 2;
    p.n_small = 3;
    p.cell_size_m = 200;
    p.total_arrival_rate = 60;
    return make_random_scenario(p, seed);
}

} // namespace

TEST_CASE("metrics report the latency sum, grid power and capacities") {
    Scenario sc = two_station_scenario();
    MetricsReport rep = compute_metrics({0.5, 0.1}, sc);
    CHECK(rep.latency_metric == doctest::Approx(1.0 + 0.1 / 0.9).epsilon(1e-12));
    CHECK(rep.on_grid_w == doctest::Approx(200.0).epsilon(1e-12)); // 100 + 100
    REQUIRE(rep.per_bs.size() == 2);
    CHECK(rep.per_bs[0].rho == 0.5);
    CHECK(rep.per_bs[0].power_w == doctest::Approx(1000.0));
    CHECK(rep.per_bs[0].green_capacity == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(rep.per_bs[1].green_capacity == 1e-3); // budget below the static floor
}

TEST_CASE("association comparison ignores cells without traffic") {
    Scenario sc = two_station_scenario();
    sc.grid.cells[1].lambda_aps = 0.0;
    std::vector<int> a = {0, 0};
    std::vector<int> b = {0, 1}; // differs only on the emptied cell
    CHECK(associations_match_on_traffic(a, b, sc));
    std::vector<int> c = {1, 0};
    CHECK(!associations_match_on_traffic(a, c, sc));
}

TEST_CASE("user draws are reproducible and land inside their cells") {
    Scenario sc = two_station_scenario();
    UserDraw d1 = draw_users(sc, 50.0, 250e3, 99);
    UserDraw d2 = draw_users(sc, 50.0, 250e3, 99);
    UserDraw d3 = draw_users(sc, 50.0, 250e3, 100);
    REQUIRE(d1.users.size() == d2.users.size());
    bool same = true;
    for (std::size_t i = 0; i < d1.users.size(); ++i)
        same = same && d1.users[i].x_m == d2.users[i].x_m &&
               d1.users[i].traffic_bits == d2.users[i].traffic_bits;
    CHECK(same);
    bool moved = d1.users.size() != d3.users.size();
    for (std::size_t i = 0; !moved && i < std::min(d1.users.size(), d3.users.size()); ++i)
        moved = d1.users[i].x_m != d3.users[i].x_m;
    CHECK(moved); // a different seed produces a different draw

    for (const auto& u : d1.users) {
        CHECK(u.traffic_bits > 0);
        CHECK(u.x_m >= 0);
        CHECK(u.x_m <= 800);
        REQUIRE(u.cell >= 0);
        REQUIRE(u.cell < sc.grid.n_cells());
        const auto& cell = sc.grid.cells[u.cell];
        CHECK(std::fabs(u.x_m - cell.cx_m) <= 200.0 + 1e-9);
        CHECK(std::fabs(u.y_m - cell.cy_m) <= 200.0 + 1e-9);
    }
}

TEST_CASE("pooled user draws hit the configured means") {
    Scenario sc = two_station_scenario();
    const double mean_count = 100.0, mean_bits = 250e3;
    const int reps = 200;
    double count = 0, bits = 0;
    std::size_t n_users = 0;
    for (int s = 0; s < reps; ++s) {
        UserDraw d = draw_users(sc, mean_count, mean_bits, 1000 + s);
        count += static_cast<double>(d.users.size());
        for (const auto& u : d.users) bits += u.traffic_bits;
        n_users += d.users.size();
    }
    // Poisson count: three sigma on the pooled mean is 3*sqrt(mean/reps)
    CHECK(std::fabs(count / reps - mean_count) < 3.0 * std::sqrt(mean_count / reps));
    // exponential sizes: relative three sigma is 3/sqrt(n)
    CHECK(std::fabs(bits / static_cast<double>(n_users) - mean_bits) <
          3.0 * mean_bits / std::sqrt(static_cast<double>(n_users)));
}

TEST_CASE("monte carlo comparison is deterministic and shares draws") {
    Scenario sc = paneled_random(5);
    RateMap rm = build_rate_map(sc);
    OptimizerConfig cfg;
    RunResult run = run_vgala(sc, rm, cfg);
    std::vector<SchemeSelector> schemes;
    schemes.push_back(make_price_selector("a", run.phi, rm));
    schemes.push_back(make_price_selector("b", run.phi, rm)); // same prices, same choices
    auto s1 = monte_carlo_compare(sc, rm, schemes, 40, 60.0, 250e3, 7);
    auto s2 = monte_carlo_compare(sc, rm, schemes, 40, 60.0, 250e3, 7);
    REQUIRE(s1.size() == 2);
    CHECK(s1[0].mean_latency == s2[0].mean_latency);
    CHECK(s1[0].se_latency == s2[0].se_latency);
    CHECK(s1[0].mean_on_grid_w == s2[0].mean_on_grid_w);
    // identical selectors see identical draws
    CHECK(s1[0].mean_latency == s1[1].mean_latency);
    CHECK(s1[0].clamped_draws == s1[1].clamped_draws);
    CHECK(s1[0].n_draws == 40);
    CHECK(s1[0].se_latency >= 0);

    CreBias unit = CreBias::two_tier(sc, 1.0);
    SchemeSelector cre = make_bias_selector("cre", unit, rm);
    for (int c = 0; c < sc.grid.n_cells(); ++c)
        if (sc.grid.cells[c].lambda_aps > 0) CHECK(cre.select(c) >= 0);
}

TEST_CASE("parameter sweeps carry one row per grid point") {
    Scenario sc = paneled_random(6);
    RateMap rm = build_rate_map(sc);
    OptimizerConfig cfg;
    std::vector<double> kappas = {0, 2, 4};
    auto rows = sweep_kappa(sc, rm, kappas, cfg);
    REQUIRE(rows.size() == 3);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].param_value == kappas[i]);
        CHECK(rows[i].scheme == "vgala");
        CHECK(rows[i].latency_metric > 0);
    }
    auto trows = sweep_theta(sc, rm, {0.0, 0.5, 1.0}, cfg);
    REQUIRE(trows.size() == 3);
    CHECK(trows[0].param_value == 0.0);
}

TEST_CASE("solar sweep spans the all-grid and all-green regimes") {
    Scenario sc = paneled_random(7);
    RateMap rm = build_rate_map(sc);
    OptimizerConfig cfg;
    std::vector<double> effs = default_efficiency_grid(5, 0.35);
    auto points = sweep_solar(sc, rm, effs, cfg);
    REQUIRE(points.size() == 5);
    CHECK(points.front().region == 1);      // zero efficiency: every budget is zero
    CHECK(points.front().vgala.on_grid_w > 0);
    CHECK(points.back().region == 4);       // 0.35 doubles every budget past the peak draw
    CHECK(points.back().vgala.on_grid_w == 0.0);
    CHECK(points.back().la.on_grid_w == 0.0);
    auto flat = flatten_solar_sweep(points);
    CHECK(flat.size() == 10);
    CHECK(flat[0].scheme == "vgala");
    CHECK(flat[1].scheme == "la");
}
