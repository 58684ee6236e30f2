#include "adseek/equilibrium.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "adseek/errors.hpp"

namespace adseek {

DriverView equilibrium_view(double rho, double v0) {
    const double headway = 1.0 / rho;
    return DriverView{{0.0, v0, 0.0}, {headway, v0, 0.0}, headway};
}

double stationary_control(double rho, double v0, const ModelParams& p) {
    return control(equilibrium_view(rho, v0), p);
}

EquilibriumPoint equilibrium_velocity(double rho, const ModelParams& p,
                                      const EquilibriumOptions& opt) {
    p.validate();
    if (!(rho > 0.0) || !std::isfinite(rho)) {
        throw InvalidDensity("equilibrium_velocity: density must be positive");
    }
    if (1.0 / rho <= p.vehicle_length) {
        throw InvalidDensity("equilibrium_velocity: headway 1/rho does not exceed vehicle length");
    }

    const auto grid = p.action_grid();
    auto f = [&](double v) { return control(equilibrium_view(rho, v), p, grid); };

    const double hi_end = opt.bracket_factor * p.v_star;
    const int n = opt.scan_points;
    std::vector<double> vs(static_cast<std::size_t>(n) + 1), fs(vs.size());
    for (int k = 0; k <= n; ++k) {
        vs[static_cast<std::size_t>(k)] = hi_end * k / n;
        fs[static_cast<std::size_t>(k)] = f(vs[static_cast<std::size_t>(k)]);
    }

    // Each scan interval holding a sign change (or an exact zero at its left
    // end) counts once; the fastest one is the free-flow branch.
    int changes = 0;
    int chosen = -1;
    for (int k = 0; k < n; ++k) {
        const double a = fs[static_cast<std::size_t>(k)];
        const double b = fs[static_cast<std::size_t>(k) + 1];
        if (a == 0.0 || (a < 0.0) != (b < 0.0)) {
            ++changes;
            chosen = k;
        }
    }
    if (fs.back() == 0.0) {
        ++changes;
        chosen = n;
    }
    if (chosen < 0) {
        std::ostringstream msg;
        msg << "equilibrium_velocity: no sign change of the stationary control on [0, " << hi_end
            << "] at rho=" << rho << " (u(0)=" << fs.front() << ", u(" << hi_end
            << ")=" << fs.back() << ")";
        throw NoSignChange(msg.str(), 0.0, hi_end, fs.front(), fs.back());
    }

    EquilibriumPoint out;
    out.density = rho;
    out.v_star = p.v_star;
    out.sign_changes = changes;

    const auto c = static_cast<std::size_t>(chosen);
    if (fs[c] == 0.0) {
        out.v0 = vs[c];
        out.residual = 0.0;
        return out;
    }

    double lo = vs[c], hi = vs[c + 1];
    double f_lo = fs[c];
    double mid = 0.5 * (lo + hi);
    double f_mid = f(mid);
    for (int iter = 0; iter < 200; ++iter) {
        if (hi - lo <= opt.width_tol && std::abs(f_mid) <= opt.residual_tol) {
            break;
        }
        if (f_mid == 0.0) {
            break;
        }
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        const double next = 0.5 * (lo + hi);
        if (next == mid) {
            break;
        }
        mid = next;
        f_mid = f(mid);
    }
    out.v0 = mid;
    out.residual = std::abs(f_mid);
    if (out.residual > opt.residual_tol) {
        throw NumericalError("equilibrium_velocity: bisection stalled above residual tolerance");
    }
    return out;
}

RingState fixed_point(const EquilibriumPoint& eq, int n_vehicles) {
    RingState s;
    s.vehicles.resize(static_cast<std::size_t>(n_vehicles));
    const double c = n_vehicles / eq.density;
    for (std::size_t i = 0; i < s.vehicles.size(); ++i) {
        double x = static_cast<double>(i) / eq.density;
        if (x >= c) {
            x -= c;
        }
        s.vehicles[i] = {x, eq.v0, 0.0, 0.0};
    }
    return s;
}

RingState fixed_point(double rho, int n_vehicles, const ModelParams& p,
                      const EquilibriumOptions& opt) {
    if (n_vehicles < 2) {
        throw InvalidArgument("fixed_point: need at least 2 vehicles");
    }
    return fixed_point(equilibrium_velocity(rho, p, opt), n_vehicles);
}

std::vector<EquilibriumRow> equilibrium_curve(std::span<const double> rho_grid,
                                              const ModelParams& p,
                                              const EquilibriumOptions& opt) {
    std::vector<EquilibriumRow> rows;
    rows.reserve(rho_grid.size());
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (double rho : rho_grid) {
        EquilibriumRow row{rho, nan, nan, {}};
        try {
            const auto eq = equilibrium_velocity(rho, p, opt);
            row.v0 = eq.v0;
            row.residual = eq.residual;
            if (eq.sign_changes > 1) {
                row.flags = "multiple_roots=" + std::to_string(eq.sign_changes);
            }
        } catch (const InvalidDensity&) {
            row.flags = "invalid_density";
        } catch (const NoSignChange&) {
            row.flags = "no_sign_change";
        } catch (const NumericalError&) {
            row.flags = "bisection_stalled";
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace adseek
