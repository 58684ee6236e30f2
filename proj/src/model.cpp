#include "adseek/model.hpp"

#include <algorithm>
#include <string>

#include "adseek/errors.hpp"

namespace adseek {

namespace {

constexpr double kExpFloor = -700.0;

double clamped_exp(double exponent) {
    return exponent < kExpFloor ? 0.0 : std::exp(exponent);
}

// F(x) = exp(-x^2 - 2x)
double collision_shape(double x) {
    return clamped_exp(-x * x - 2.0 * x);
}

void require(bool ok, const std::string& what) {
    if (!ok) {
        throw InvalidArgument("ModelParams: " + what);
    }
}

}  // namespace

void ModelParams::validate() const {
    require(std::isfinite(v_star) && v_star > 0.0, "v_star must be positive");
    require(kappa1 > 0.0, "kappa1 must be positive");
    require(dt > 0.0, "dt must be positive");
    require(gamma >= 0.0 && gamma < 1.0, "gamma must lie in [0, 1)");
    require(horizon >= 0, "horizon must be non-negative");
    require(lambda > 0.0, "lambda must be positive");
    require(u_min < u_max, "u_min must be below u_max");
    require(grid_points >= 2, "grid_points must be at least 2");
    require(vehicle_length > 0.0, "vehicle_length must be positive");
}

std::vector<double> ModelParams::action_grid() const {
    std::vector<double> grid(static_cast<std::size_t>(grid_points));
    const double spacing = (u_max - u_min) / (grid_points - 1);
    for (int k = 0; k < grid_points; ++k) {
        grid[static_cast<std::size_t>(k)] = u_min + k * spacing;
    }
    grid.back() = u_max;
    return grid;
}

std::vector<AnticipatedState> anticipate_ego(const KinematicState& ego, double u, int horizon,
                                             double dt) {
    std::vector<AnticipatedState> out(static_cast<std::size_t>(horizon) + 2);
    out[0] = {ego.x, ego.v, ego.a};
    for (std::size_t h = 0; h + 1 < out.size(); ++h) {
        const auto& s = out[h];
        out[h + 1] = {s.x_hat + s.v_hat * dt, s.v_hat + s.a_hat * dt, u};
    }
    return out;
}

std::vector<AnticipatedState> anticipate_leader(const KinematicState& leader, int horizon,
                                                double dt) {
    return anticipate_ego(leader, 0.0, horizon, dt);
}

double utility_forward(double u, const DriverView& view, const ModelParams& p) {
    const double speed = view.ego.v + view.ego.a * p.dt + u * p.dt;
    const double z = (speed - p.v_star) / (p.kappa1 * p.v_star);
    return clamped_exp(-z * z);
}

double utility_backward(double u, const DriverView& view, const ModelParams& p) {
    const double speed = view.ego.v + view.ego.a * p.dt + u * p.dt;
    return clamped_exp(-p.kappa_v2 * (speed + p.kappa_02));
}

double utility_collision(double u, const DriverView& view, const ModelParams& p) {
    // Rollouts are carried inline (no allocation); index h+1 of the anticipated
    // sequence is what enters the h-th term.
    const double dt = p.dt;
    const double half_len = 0.5 * p.vehicle_length;

    double xi = 0.0, vi = view.ego.v, ai = view.ego.a;
    double xj = view.gap, vj = view.leader.v, aj = view.leader.a;

    double worst = 0.0;
    for (int h = 0; h <= p.horizon; ++h) {
        xi += vi * dt;
        vi += ai * dt;
        ai = u;
        xj += vj * dt;
        vj += aj * dt;
        aj = 0.0;

        const double dx = (xj + vj * dt - half_len) - (xi + vi * dt + half_len);
        if (dx <= 0.0) {
            return 1.0;
        }
        const double ego_speed = vi + u * dt;
        const double scale = p.kappa_c3 + p.kappa_v3 * std::abs(ego_speed) +
                             p.kappa_d3 * std::max(ego_speed - vj, 0.0);
        worst = std::max(worst, collision_shape(dx / scale));
    }
    return worst;
}

double effective_utility(double u, const DriverView& view, const ModelParams& p) {
    return p.w1 * utility_forward(u, view, p) + p.w2 * utility_backward(u, view, p) +
           p.w3 * utility_collision(u, view, p);
}

double control(const DriverView& view, const ModelParams& p) {
    return control(view, p, p.action_grid());
}

double control(const DriverView& view, const ModelParams& p, const std::vector<double>& grid) {
    // Small fixed-size buffer; grids beyond it fall back to the heap.
    constexpr std::size_t kStack = 128;
    double stack_buf[kStack];
    std::vector<double> heap_buf;
    double* logits = stack_buf;
    if (grid.size() > kStack) {
        heap_buf.resize(grid.size());
        logits = heap_buf.data();
    }

    double peak = -INFINITY;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        logits[k] = p.lambda * effective_utility(grid[k], view, p);
        peak = std::max(peak, logits[k]);
    }
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double w = clamped_exp(logits[k] - peak);
        num += grid[k] * w;
        den += w;
    }
    const double mean = num / den;
    return std::clamp(mean, grid.front(), grid.back());
}

}  // namespace adseek
