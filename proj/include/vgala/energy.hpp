// energy.hpp
//
// Station power model: linear load-dependent draw on top of a static floor,
// on-grid consumption as the shortfall past the harvested budget, and the
// green traffic capacity (the load a station can carry purely on harvested
// power, clamped into (0, 1)).

#pragma once

#include "vgala/scenario.hpp"

#include <string>
#include <vector>

namespace vgala {

// p = beta * rho + p_static
double bs_power_w(const BaseStation& bs, double rho);

// max(p - green_budget, 0); residual harvested power is discarded.
double on_grid_power_w(const BaseStation& bs, double rho);

// max(eps, min((e - p_static) / beta, 1 - eps))
double green_capacity(const BaseStation& bs, double epsilon);

// Harvested power from a panel under the given conditions.
double solar_budget_w(double panel_area_m2, double efficiency, double irradiance_w_m2);

std::vector<double> green_capacities(const Scenario& sc, double epsilon);

double total_on_grid_power_w(const Scenario& sc, const std::vector<double>& rho);

// (bs_id, rho, power_w, on_grid_w, green_capacity) rows.
void export_energy_csv(const Scenario& sc, const std::vector<double>& rho,
                       double epsilon, const std::string& path);

} // namespace vgala
