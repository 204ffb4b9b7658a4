#include <doctest.h>

#include "vgala/optimizer.hpp"
#include "vgala/rng.hpp"
#include "vgala/scenario.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace vgala;

namespace {

ObjectiveParams one_station(double kappa, double theta, double vartheta, double rho_hat) {
    ObjectiveParams p;
    p.kappa = kappa;
    p.theta = {theta};
    p.vartheta = {vartheta};
    p.rho_hat = {rho_hat};
    return p;
}

// Quadratic performance model: with kappa = 0 and vartheta = 1 the objective
// reduces to sum rho_j^2, which makes line search arithmetic checkable by hand.
ObjectiveParams quadratic(int n_bs) {
    ObjectiveParams p;
    p.kappa = 0;
    p.theta.assign(n_bs, 1.0);
    p.vartheta.assign(n_bs, 1.0);
    p.rho_hat.assign(n_bs, 0.5);
    p.model = make_custom_model([](double r) { return r * r; }, [](double r) { return 2 * r; },
                                1e-3);
    return p;
}

Scenario single_bs_scenario() {
    Scenario sc;
    sc.grid = make_uniform_grid(400, 200, 400, 5.0, 250e3);
    sc.channel.shadowing_db = 0;
    sc.channel.rayleigh_margin_db = 0;
    sc.channel.antenna_gain_db = 0;
    BaseStation b;
    b.id = 1;
    b.tier = Tier::macro;
    b.x_m = 0;
    b.y_m = 0;
    b.green_budget_w = 900;
    sc.stations.push_back(b);
    return sc;
}

} // namespace

TEST_CASE("weight and latency indicator") {
    CHECK(weight(0.5, 0.8, 0.2, 4.0) == doctest::Approx(std::exp(0.96)).epsilon(1e-14));
    CHECK(weight(0.2, 1.0, 0.2, 7.0) == 1.0);
    CHECK(latency_indicator(0.5, 2.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(latency_indicator(0.9, 1.0) == doctest::Approx(9.0).epsilon(1e-12));
    CHECK_THROWS(latency_indicator(1.0, 1.0));
}

TEST_CASE("objective value matches the closed form") {
    ObjectiveParams p;
    p.kappa = 4;
    p.theta = {0.8, 0.5};
    p.vartheta = {1.0, 2.0};
    p.rho_hat = {0.3, 0.7};
    double expected = std::exp(4 * 0.8 * (0.2 - 0.3)) * (0.2 / 0.8) +
                      std::exp(4 * 0.5 * (0.6 - 0.7)) * 2.0 * (0.6 / 0.4);
    CHECK(objective_psi({0.2, 0.6}, p) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("prices match values computed outside this codebase") {
    CHECK(operation_status({0.3}, one_station(3.2, 1, 1.0, 0.5))[0] ==
          doctest::Approx(1.799250883673423).epsilon(1e-12));
    CHECK(operation_status({0.7}, one_station(8.0, 1, 0.5, 0.2))[0] ==
          doctest::Approx(812.9057893823692).epsilon(1e-12));
    CHECK(operation_status({0.05}, one_station(0.0, 1, 2.0, 0.9))[0] ==
          doctest::Approx(2.21606648199446).epsilon(1e-12));
}

TEST_CASE("prices agree with central finite differences of the objective") {
    Rng rng(2024);
    for (int trial = 0; trial < 25; ++trial) {
        int n = 1 + static_cast<int>(rng.uniform_index(3));
        ObjectiveParams p;
        p.kappa = rng.uniform(0.0, 8.0);
        for (int j = 0; j < n; ++j) {
            p.theta.push_back(rng.uniform(0.0, 1.0));
            p.vartheta.push_back(rng.uniform(0.5, 2.0));
            p.rho_hat.push_back(rng.uniform(1e-3, 1.0 - 1e-3));
        }
        std::vector<double> rho(n);
        for (int j = 0; j < n; ++j) rho[j] = rng.uniform(0.02, 0.95);

        std::vector<double> phi = operation_status(rho, p);
        const double h = 1e-6;
        for (int j = 0; j < n; ++j) {
            std::vector<double> up = rho, dn = rho;
            up[j] += h;
            dn[j] -= h;
            double fd = (objective_psi(up, p) - objective_psi(dn, p)) / (2 * h);
            CHECK(std::fabs(phi[j] - fd) / std::max(std::fabs(fd), 1.0) < 1e-5);
        }
    }
}

TEST_CASE("second derivative: frozen values and the differenced fallback") {
    CHECK(psi_second_derivative(0.3, 0, one_station(3.2, 1, 1.0, 0.5)) ==
          doctest::Approx(12.275736582689433).epsilon(1e-12));
    CHECK(psi_second_derivative(0.0, 0, one_station(4.0, 1, 1.0, 1.0)) ==
          doctest::Approx(0.1831563888873418).epsilon(1e-12));
    CHECK(psi_second_derivative(0.8, 0, one_station(1.0, 1, 1.3, 0.1)) ==
          doctest::Approx(795.8350699923328).epsilon(1e-12));

    // without d2f the curvature comes from differencing df
    ObjectiveParams p = one_station(2.0, 1, 1.0, 0.5);
    ObjectiveParams fd = p;
    fd.model.d2f = nullptr;
    CHECK(psi_second_derivative(0.4, 0, fd) ==
          doctest::Approx(psi_second_derivative(0.4, 0, p)).epsilon(1e-6));
}

TEST_CASE("convexity bounds bracket the latency model curvature") {
    // kappa = 0, vartheta = 1: psi'' = f'' = 2/(1-rho)^3 on [0, 1-eps]
    ObjectiveParams p = one_station(0.0, 1, 1.0, 0.5);
    ConvexityBounds cb = estimate_convexity_bounds(p);
    CHECK(cb.q == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(cb.big_q == doctest::Approx(2e9).epsilon(1e-6));
    CHECK(cb.q <= cb.big_q);
}

TEST_CASE("custom models are screened for shape") {
    CHECK_THROWS(make_custom_model([](double r) { return -r; }, [](double) { return -1.0; },
                                   1e-3));
    // increasing but concave
    CHECK_THROWS(make_custom_model([](double r) { return std::sqrt(r); },
                                   [](double r) { return 0.5 / std::sqrt(r + 1e-9); }, 1e-3));
    CHECK_NOTHROW(make_custom_model([](double r) { return r * r + r; },
                                    [](double r) { return 2 * r + 1; }, 1e-3));
}

TEST_CASE("line search accepts the full step when decrease suffices") {
    // psi = rho^2: from 0.5 toward 0.3, psi(M) = 0.09 <= 0.25 + 0.3*1*(-0.2) = 0.19.
    OptimizerConfig cfg;
    BacktrackResult bt = backtrack_delta({0.5}, {0.3}, quadratic(1), cfg);
    CHECK(bt.delta == 0.0);
    CHECK(bt.steps == 0);
}

TEST_CASE("line search halves once when the full swap overshoots") {
    // Swapping (0.9, 0.1) to (0.1, 0.9) keeps psi at 0.82, failing sufficient
    // decrease at full stride; the midpoint (0.5, 0.5) passes on step one.
    OptimizerConfig cfg;
    BacktrackResult bt = backtrack_delta({0.9, 0.1}, {0.1, 0.9}, quadratic(2), cfg);
    CHECK(bt.delta == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(bt.steps == 1);
}

TEST_CASE("line search refuses an ascent direction") {
    // Moving a single load upward increases psi = rho^2; no depth suffices.
    // The cap stays well above the halvings any genuine descent step needs but
    // below the regime where strides underflow into exact no-ops.
    OptimizerConfig cfg;
    cfg.backtrack_cap = 20;
    CHECK_THROWS(backtrack_delta({0.1}, {0.9}, quadratic(1), cfg));
}

TEST_CASE("mix_loads interpolates toward the target") {
    std::vector<double> next = mix_loads({0.5, 0.2}, {0.3, 0.4}, 0.25);
    CHECK(next[0] == doctest::Approx(0.35).epsilon(1e-15));
    CHECK(next[1] == doctest::Approx(0.35).epsilon(1e-15));
    next = mix_loads({0.5}, {0.3}, 1.0); // degenerate stride keeps rho
    CHECK(next[0] == 0.5);
}

TEST_CASE("admission field construction and validation") {
    AdmissionField a = AdmissionField::uniform(3, 0.5);
    REQUIRE(a.mu.size() == 3);
    CHECK(a.mu[1] == 0.5);
    CHECK_NOTHROW(a.validate());
    a.mu[2] = 1.5;
    CHECK_THROWS(a.validate());
    AdmissionField none;
    CHECK_NOTHROW(none.validate());
}

TEST_CASE("a single-station instance is an immediate fixed point") {
    Scenario sc = single_bs_scenario();
    RateMap rm = build_rate_map(sc);
    OptimizerConfig cfg;
    RunResult r = run_vgala(sc, rm, cfg);
    CHECK(r.fixed_point);
    CHECK(r.converged);
    CHECK(r.iterations == 0);
    REQUIRE(r.association.size() == 1);
    CHECK(r.association[0] == 0);
    // the only feasible load: all traffic on the lone station
    CHECK(r.rho[0] == doctest::Approx(5.0 * 250e3 / rm.rate(0, 0)).epsilon(1e-12));
    CHECK(r.psi_final == r.psi_induced);
    CHECK(!r.overloaded);
    CHECK(r.clamp_events == 0);
}

TEST_CASE("runs are deterministic") {
    RandomScenarioParams p;
    p.n_macro = 2;
    p.n_small = 2;
    p.cell_size_m = 200;
    p.total_arrival_rate = 60;
    Scenario sc = make_random_scenario(p, 512);
    RateMap rm = build_rate_map(sc);
    OptimizerConfig cfg;
    RunResult a = run_vgala(sc, rm, cfg);
    RunResult b = run_vgala(sc, rm, cfg);
    CHECK(a.iterations == b.iterations);
    CHECK(a.psi_final == b.psi_final);
    CHECK(a.rho == b.rho);
    CHECK(a.association == b.association);
}

TEST_CASE("the iteration bound formula") {
    OptimizerConfig cfg; // sigma 0.3, xi 0.5
    // z = 1 - min(2*1*0.3, 2*1*0.3*0.5/4) = 0.925; ceil(ln(1e6)/ln(1/z)) = 178
    CHECK(convergence_bound(2.0, 1.0, 1.0, 4.0, cfg, 1e-6) == 178.0);
    // already within tolerance
    CHECK(convergence_bound(1.0 + 1e-9, 1.0, 1.0, 4.0, cfg, 1e-6) == 0.0);
    // larger gap, larger bound
    CHECK(convergence_bound(10.0, 1.0, 1.0, 4.0, cfg, 1e-6) >
          convergence_bound(2.0, 1.0, 1.0, 4.0, cfg, 1e-6));
    CHECK_THROWS(convergence_bound(2.0, 1.0, 0.0, 4.0, cfg, 1e-6));
}

TEST_CASE("config validation names the offending field") {
    OptimizerConfig cfg;
    cfg.sigma_armijo = 0.7;
    CHECK_THROWS_WITH_AS(cfg.validate(),
                         doctest::Contains("sigma_armijo"), std::runtime_error);
    cfg = OptimizerConfig{};
    cfg.xi = 1.0;
    CHECK_THROWS(cfg.validate());
    cfg = OptimizerConfig{};
    cfg.epsilon = 0.6;
    CHECK_THROWS(cfg.validate());
    CHECK_NOTHROW(OptimizerConfig{}.validate());
}
