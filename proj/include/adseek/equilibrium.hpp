#pragma once

// Free-flow fixed point: the common speed v0(rho, v*) at which every driver's
// control input vanishes.

#include <span>
#include <string>
#include <vector>

#include "adseek/model.hpp"
#include "adseek/ring.hpp"

namespace adseek {

struct EquilibriumOptions {
    double residual_tol = 1e-8;   // |u_bar| at the solution [m/s^2]
    double width_tol = 1e-10;     // final bracket width [m/s]
    int scan_points = 64;         // intervals scanned for sign changes
    double bracket_factor = 1.05; // upper bracket end as a multiple of v*
};

struct EquilibriumPoint {
    double density = 0.0;  // [1/m]
    double v_star = 0.0;   // [m/s]
    double v0 = 0.0;       // [m/s]
    double residual = 0.0; // |u_bar(v0)| [m/s^2]
    int sign_changes = 0;  // roots found by the scan; the fastest one is returned
};

/// View of a driver at the free-flow fixed point with headway 1/rho.
DriverView equilibrium_view(double rho, double v0);

/// Stationary control at the fixed point as a function of the common speed.
double stationary_control(double rho, double v0, const ModelParams& p);

/// Throws InvalidDensity if 1/rho <= L, NoSignChange if the scan finds no root.
EquilibriumPoint equilibrium_velocity(double rho, const ModelParams& p,
                                      const EquilibriumOptions& opt = {});

/// Equally spaced ring state at speed v0 with C = N / rho.
RingState fixed_point(double rho, int n_vehicles, const ModelParams& p,
                      const EquilibriumOptions& opt = {});

/// Same, from an already solved equilibrium.
RingState fixed_point(const EquilibriumPoint& eq, int n_vehicles);

struct EquilibriumRow {
    double rho = 0.0;
    double v0 = 0.0;
    double residual = 0.0;
    std::string flags;  // empty when ok; otherwise the failure reason
    bool ok() const { return flags.empty() || flags.rfind("multiple", 0) == 0; }
};

/// Tabulates v0 over the grid. Failed points carry a non-empty flag and NaN v0.
std::vector<EquilibriumRow> equilibrium_curve(std::span<const double> rho_grid,
                                              const ModelParams& p,
                                              const EquilibriumOptions& opt = {});

}  // namespace adseek
