#include "vgala/energy.hpp"

#include "vgala/io.hpp"

#include <algorithm>

namespace vgala {

double bs_power_w(const BaseStation& bs, double rho) {
    return bs.load_power_coeff_w * rho + bs.static_power_w;
}

double on_grid_power_w(const BaseStation& bs, double rho) {
    return std::max(bs_power_w(bs, rho) - bs.green_budget_w, 0.0);
}

double green_capacity(const BaseStation& bs, double epsilon) {
    double unclamped = (bs.green_budget_w - bs.static_power_w) / bs.load_power_coeff_w;
    return std::max(epsilon, std::min(unclamped, 1.0 - epsilon));
}

double solar_budget_w(double panel_area_m2, double efficiency, double irradiance_w_m2) {
    return panel_area_m2 * efficiency * irradiance_w_m2;
}

std::vector<double> green_capacities(const Scenario& sc, double epsilon) {
    std::vector<double> caps;
    caps.reserve(sc.stations.size());
    for (const auto& b : sc.stations) caps.push_back(green_capacity(b, epsilon));
    return caps;
}

double total_on_grid_power_w(const Scenario& sc, const std::vector<double>& rho) {
    double total = 0.0;
    for (int j = 0; j < sc.n_bs(); ++j) total += on_grid_power_w(sc.stations[j], rho[j]);
    return total;
}

void export_energy_csv(const Scenario& sc, const std::vector<double>& rho,
                       double epsilon, const std::string& path) {
    CsvWriter csv(path, {"bs_id", "rho", "power_w", "on_grid_w", "green_capacity"});
    for (int j = 0; j < sc.n_bs(); ++j) {
        const auto& b = sc.stations[j];
        csv.row({CsvWriter::cell(b.id), CsvWriter::cell(rho[j]),
                 CsvWriter::cell(bs_power_w(b, rho[j])),
                 CsvWriter::cell(on_grid_power_w(b, rho[j])),
                 CsvWriter::cell(green_capacity(b, epsilon))});
    }
}

} // namespace vgala
