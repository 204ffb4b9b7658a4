#include <doctest.h>

#include "vgala/scenario.hpp"

#include <cmath>
#include <cstdio>

using namespace vgala;

namespace {

// Three macros on a line, all channel margins zeroed so received power is
// tx - pathloss exactly. The single cell's center lands at (200, 100).
Scenario oracle_scenario() {
    Scenario sc;
    sc.grid = make_uniform_grid(400, 200, 400, 5.0, 250e3);
    sc.channel.shadowing_db = 0;
    sc.channel.rayleigh_margin_db = 0;
    sc.channel.antenna_gain_db = 0;
    double xs[] = {0, 600, 1500};
    for (int i = 0; i < 3; ++i) {
        BaseStation b;
        b.id = i + 1;
        b.tier = Tier::macro;
        b.x_m = xs[i];
        b.y_m = 0;
        b.green_budget_w = 800;
        sc.stations.push_back(b);
    }
    return sc;
}

} // namespace

TEST_CASE("pathloss formulas and the minimum-distance clamp") {
    CHECK(pathloss_db(Tier::macro, 1000.0) == doctest::Approx(128.1).epsilon(1e-12));
    CHECK(pathloss_db(Tier::small, 100.0) == doctest::Approx(58.0).epsilon(1e-12));
    CHECK(pathloss_db(Tier::small, 1.0) == doctest::Approx(38.0).epsilon(1e-12));
    // below the clamp the loss stops shrinking
    CHECK(pathloss_db(Tier::macro, 0.25) == pathloss_db(Tier::macro, 1.0));
}

TEST_CASE("sinr and rate against hand-computed values") {
    // Distances are sqrt(200^2+100^2), sqrt(400^2+100^2), sqrt(1300^2+100^2);
    // noise is -174 dBm/Hz over 10 MHz = 3.981071705534985e-11 mW. The SINR
    // and Shannon rates below were computed outside this codebase.
    Scenario sc = oracle_scenario();
    CHECK(sinr(sc, 0, 0) == doctest::Approx(9.846804219317054).epsilon(1e-10));
    CHECK(sinr(sc, 0, 1) == doctest::Approx(0.10005214652739339).epsilon(1e-10));
    CHECK(sinr(sc, 0, 2) == doctest::Approx(0.001200422596523179).epsilon(1e-10));
    CHECK(rate_bps(sc, 0, 0) == doctest::Approx(34391981.40683864).epsilon(1e-10));
    CHECK(rate_bps(sc, 0, 1) == doctest::Approx(1375719.1443476737).epsilon(1e-10));
    CHECK(rate_bps(sc, 0, 2) == doctest::Approx(17308.05085925678).epsilon(1e-10));
}

TEST_CASE("uplink pathloss is the downlink loss by reciprocity") {
    Scenario sc = oracle_scenario();
    CHECK(uplink_pathloss_db(sc, 0, 1) ==
          doctest::Approx(pathloss_db(Tier::macro, std::sqrt(400.0 * 400 + 100 * 100)))
              .epsilon(1e-12));
}

TEST_CASE("candidacy gates cut off distant stations") {
    Scenario sc = oracle_scenario();
    // A macro 12 km out fails the 140 dB uplink gate; its rate is the floor.
    BaseStation far;
    far.id = 4;
    far.tier = Tier::macro;
    far.x_m = 12000;
    far.y_m = 0;
    sc.stations.push_back(far);
    CHECK(rate_bps(sc, 0, 3) == 1e-3);
    RateMap rm = build_rate_map(sc);
    CHECK(rm.is_candidate(0, 0));
    CHECK(rm.is_candidate(0, 2));
    CHECK(!rm.is_candidate(0, 3));
    // density plumbing: arrival rate times mean size over the map's own rate
    CHECK(traffic_density(sc, 0, 0, rm) ==
          doctest::Approx(5.0 * 250e3 / rm.rate(0, 0)).epsilon(1e-15));
}

TEST_CASE("a loaded cell with no candidate fails the build") {
    Scenario sc;
    sc.grid = make_uniform_grid(400, 400, 400, 3.0, 250e3);
    BaseStation b;
    b.id = 1;
    b.tier = Tier::macro;
    b.x_m = 50000;
    b.y_m = 0;
    sc.stations.push_back(b);
    CHECK_THROWS(build_rate_map(sc));
    // unloaded cells may stay uncovered
    sc.grid.cells[0].lambda_aps = 0.0;
    CHECK_NOTHROW(build_rate_map(sc));
}

TEST_CASE("uniform grid clips edge cells and integrates the arrival rate") {
    AreaGrid g = make_uniform_grid(500, 300, 200, 15.0, 1e3);
    CHECK(g.n_cols == 3);
    CHECK(g.n_rows == 2);
    CHECK(g.cells[g.cell_index(0, 0)].cx_m == doctest::Approx(100.0));
    CHECK(g.cells[g.cell_index(0, 2)].cx_m == doctest::Approx(450.0)); // clipped column
    CHECK(g.cells[g.cell_index(1, 0)].cy_m == doctest::Approx(250.0)); // clipped row
    double sum = 0;
    for (const auto& c : g.cells) sum += c.lambda_aps;
    CHECK(sum == doctest::Approx(15.0).epsilon(1e-12));
    // full-size cell carries area fraction 200*200 / (500*300)
    CHECK(g.cells[g.cell_index(0, 0)].lambda_aps ==
          doctest::Approx(15.0 * 40000.0 / 150000.0).epsilon(1e-12));
}

TEST_CASE("interference is co-tier only") {
    Scenario sc;
    sc.grid = make_uniform_grid(400, 400, 400, 2.0, 250e3);
    BaseStation s;
    s.id = 1;
    s.tier = Tier::small;
    s.tx_power_dbm = 30;
    s.static_power_w = 37;
    s.load_power_coeff_w = 4;
    s.x_m = 100;
    s.y_m = 100;
    s.green_budget_w = 40;
    sc.stations.push_back(s);
    double alone = sinr(sc, 0, 0);

    BaseStation m;
    m.id = 2;
    m.tier = Tier::macro;
    m.x_m = 300;
    m.y_m = 300;
    m.green_budget_w = 800;
    sc.stations.push_back(m);
    CHECK(sinr(sc, 0, 0) == alone); // the macro does not enter the small's SINR

    BaseStation s2 = s;
    s2.id = 3;
    s2.x_m = 320;
    sc.stations.push_back(s2);
    CHECK(sinr(sc, 0, 0) < alone); // a second small does
}

TEST_CASE("random scenarios are seed-deterministic") {
    RandomScenarioParams p;
    p.n_macro = 2;
    p.n_small = 3;
    p.cell_size_m = 200;
    Scenario a = make_random_scenario(p, 31);
    Scenario b = make_random_scenario(p, 31);
    Scenario c = make_random_scenario(p, 32);
    REQUIRE(a.n_bs() == 5);
    bool same = true, diff = false;
    for (int j = 0; j < a.n_bs(); ++j) {
        same = same && a.stations[j].x_m == b.stations[j].x_m &&
               a.stations[j].green_budget_w == b.stations[j].green_budget_w;
        diff = diff || a.stations[j].x_m != c.stations[j].x_m;
    }
    CHECK(same);
    CHECK(diff);
}

TEST_CASE("save and load round-trip a scenario exactly") {
    RandomScenarioParams p;
    p.n_macro = 1;
    p.n_small = 2;
    p.cell_size_m = 250;
    Scenario a = make_random_scenario(p, 99);
    a.grid.cells[3].lambda_aps = 0.125; // a non-uniform entry
    std::string path = "test_scenario_tmp.json";
    save_scenario(a, path);
    Scenario b = load_scenario(path);
    std::remove(path.c_str());

    REQUIRE(b.n_bs() == a.n_bs());
    REQUIRE(b.grid.n_cells() == a.grid.n_cells());
    for (int j = 0; j < a.n_bs(); ++j) {
        CHECK(b.stations[j].x_m == a.stations[j].x_m);
        CHECK(b.stations[j].y_m == a.stations[j].y_m);
        CHECK(b.stations[j].tier == a.stations[j].tier);
        CHECK(b.stations[j].green_budget_w == a.stations[j].green_budget_w);
        CHECK(b.stations[j].panel_area_m2 == a.stations[j].panel_area_m2);
        CHECK(b.stations[j].theta == a.stations[j].theta);
    }
    for (int c = 0; c < a.grid.n_cells(); ++c) {
        CHECK(b.grid.cells[c].lambda_aps == a.grid.cells[c].lambda_aps);
        CHECK(b.grid.cells[c].nu_bits == a.grid.cells[c].nu_bits);
    }
    CHECK(b.channel.uplink_pathloss_threshold_db == a.channel.uplink_pathloss_threshold_db);
    CHECK(b.seed == a.seed);
}
