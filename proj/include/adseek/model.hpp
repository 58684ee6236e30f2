#pragma once

// The adaptiveSeek driving policy for a single driver following a single
// leader: anticipation rollout, utility components and the Boltzmann
// averaged control input.

#include <cmath>
#include <vector>

namespace adseek {

/// Behavioral constants shared by all drivers, with calibrated defaults.
struct ModelParams {
    double v_star = 10.49;        // ideal speed [m/s]
    double kappa1 = 0.7;          // forward reward width, relative to v_star
    double w1 = 1.0;
    double kappa_v2 = 10.0;       // backward penalty slope [s/m]
    double kappa_02 = 0.25;       // backward penalty offset [m/s]
    double w2 = -1.0;
    double kappa_c3 = 0.6;        // collision scale, constant part [m]
    double kappa_v3 = 0.3;        // collision scale, speed part [s]
    double kappa_d3 = 1.0;        // collision scale, closing-speed part [s]
    double w3 = -10.0;
    double dt = 1.0 / 6.0;        // [s]
    double gamma = std::sqrt(0.7);
    int horizon = 7;              // H
    double lambda = 200.0;        // softmax sharpness
    double u_min = -6.0;          // [m/s^2]
    double u_max = 4.0;           // [m/s^2]
    int grid_points = 41;
    double vehicle_length = 3.9;  // [m]

    /// Throws InvalidArgument when an invariant is violated.
    void validate() const;

    /// Uniform action grid including both endpoints.
    std::vector<double> action_grid() const;

    bool operator==(const ModelParams&) const = default;
};

struct KinematicState {
    double x = 0.0;  // [m]
    double v = 0.0;  // [m/s]
    double a = 0.0;  // [m/s^2]
};

/// What driver i sees: its own state, its leader's, and the center-to-center
/// gap (already unwrapped, > 0).
struct DriverView {
    KinematicState ego;
    KinematicState leader;
    double gap = 0.0;
};

struct AnticipatedState {
    double x_hat = 0.0;
    double v_hat = 0.0;
    double a_hat = 0.0;
};

/// Mental rollout of the ego vehicle under constant action u. Returns
/// horizon+2 states (h = 0..H+1); element 0 is the current state.
std::vector<AnticipatedState> anticipate_ego(const KinematicState& ego, double u, int horizon,
                                             double dt);

/// Rollout of the leader assuming it applies zero action.
std::vector<AnticipatedState> anticipate_leader(const KinematicState& leader, int horizon,
                                                double dt);

/// exp(-((v + a dt + u dt - v*)/(kappa1 v*))^2).
double utility_forward(double u, const DriverView& view, const ModelParams& p);

/// exp(-kappa_v2 (v + a dt + u dt + kappa_02)); exponents below -700 give 0.
double utility_backward(double u, const DriverView& view, const ModelParams& p);

/// Perceived front-collision risk, the maximum over the anticipation horizon.
/// Positions are unwrapped: the ego starts at 0 and the leader at view.gap.
double utility_collision(double u, const DriverView& view, const ModelParams& p);

double effective_utility(double u, const DriverView& view, const ModelParams& p);

/// Boltzmann-weighted average of the action grid under exp(lambda U_eff).
double control(const DriverView& view, const ModelParams& p);

/// Control with a precomputed action grid; used on hot paths.
double control(const DriverView& view, const ModelParams& p, const std::vector<double>& grid);

}  // namespace adseek
