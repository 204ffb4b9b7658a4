#include <doctest.h>

#include "vgala/energy.hpp"
#include "vgala/evaluation.hpp"

#include <vector>

using namespace vgala;

namespace {

BaseStation macro_with_budget(double budget) {
    BaseStation b;
    b.id = 1;
    b.tier = Tier::macro;
    b.green_budget_w = budget;
    return b;
}

} // namespace

TEST_CASE("station power is a static floor plus a linear load term") {
    BaseStation b = macro_with_budget(0);
    CHECK(bs_power_w(b, 0.0) == 750.0);
    CHECK(bs_power_w(b, 0.5) == 1000.0);
    CHECK(bs_power_w(b, 1.0) == 1250.0);
    b.static_power_w = 37;
    b.load_power_coeff_w = 4;
    CHECK(bs_power_w(b, 0.25) == 38.0);
}

TEST_CASE("on-grid power is the shortfall past the harvest, never negative") {
    BaseStation b = macro_with_budget(900);
    CHECK(on_grid_power_w(b, 0.0) == 0.0);   // 750 < 900
    CHECK(on_grid_power_w(b, 0.3) == 0.0);   // exactly at the budget
    CHECK(on_grid_power_w(b, 0.5) == 100.0); // 1000 - 900
}

TEST_CASE("green capacity inverts the power model and clamps") {
    const double eps = 1e-3;
    CHECK(green_capacity(macro_with_budget(850), eps) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(green_capacity(macro_with_budget(1100), eps) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(green_capacity(macro_with_budget(0), eps) == eps);      // below the floor
    CHECK(green_capacity(macro_with_budget(500), eps) == eps);    // still below
    CHECK(green_capacity(macro_with_budget(5000), eps) == 1 - eps);
    BaseStation s;
    s.static_power_w = 37;
    s.load_power_coeff_w = 4;
    s.green_budget_w = 38.0;
    CHECK(green_capacity(s, eps) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("solar budgets derive from panel area times efficiency and irradiance") {
    CHECK(solar_budget_w(10.0, 0.174, 1000.0) == doctest::Approx(1740.0).epsilon(1e-12));
    CHECK(solar_budget_w(10.0, 0.0, 1000.0) == 0.0);

    Scenario sc;
    sc.grid = make_uniform_grid(400, 400, 400, 1.0, 250e3);
    BaseStation panel = macro_with_budget(0);
    panel.panel_area_m2 = 5.0;
    sc.stations.push_back(panel);
    BaseStation fixed = macro_with_budget(123.0); // no panel: budget stays
    fixed.id = 2;
    sc.stations.push_back(fixed);
    apply_solar_budgets(sc);
    CHECK(sc.stations[0].green_budget_w == doctest::Approx(5.0 * 174.0).epsilon(1e-12));
    CHECK(sc.stations[1].green_budget_w == 123.0);

    sc.solar.efficiency = 0.0;
    apply_solar_budgets(sc);
    CHECK(sc.stations[0].green_budget_w == 0.0);
    CHECK(sc.stations[1].green_budget_w == 123.0);
}

TEST_CASE("total on-grid power sums the per-station shortfalls") {
    Scenario sc;
    sc.grid = make_uniform_grid(400, 400, 400, 1.0, 250e3);
    sc.stations.push_back(macro_with_budget(900));
    BaseStation b2 = macro_with_budget(700);
    b2.id = 2;
    sc.stations.push_back(b2);
    std::vector<double> rho = {0.5, 0.1};
    // station 1: 1000 - 900 = 100; station 2: 800 - 700 = 100
    CHECK(total_on_grid_power_w(sc, rho) == doctest::Approx(200.0).epsilon(1e-12));
    CHECK(green_capacities(sc, 1e-3).size() == 2);
    CHECK(green_capacities(sc, 1e-3)[0] == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("the default efficiency grid is a closed linspace") {
    std::vector<double> g = default_efficiency_grid(10, 0.35);
    REQUIRE(g.size() == 10);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == doctest::Approx(0.35).epsilon(1e-15));
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
    CHECK(g[1] == doctest::Approx(0.35 / 9.0).epsilon(1e-12));
}
