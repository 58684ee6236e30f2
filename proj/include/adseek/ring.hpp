#pragma once

// Synchronous N-vehicle simulation of the adaptiveSeek map on a ring road.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "adseek/model.hpp"

namespace adseek {

struct RingConfig {
    int n_vehicles = 28;
    double circumference = 314.0;  // [m]
    ModelParams params{};

    double density() const { return n_vehicles / circumference; }

    /// Throws InvalidArgument / InvalidDensity.
    void validate() const;
};

struct VehicleState {
    double x = 0.0;             // [m], in [0, C)
    double v = 0.0;             // [m/s]
    double a = 0.0;             // [m/s^2]
    double prev_control = 0.0;  // control applied at the previous step [m/s^2]
};

/// Full map state. Vehicle i follows vehicle (i + 1) mod N. Indices are
/// zero-based.
struct RingState {
    std::int64_t time_index = 0;
    std::vector<VehicleState> vehicles;
    bool kick_spent = false;  // a kick, once deactivated, never fires again
};

/// Exogenous braking applied to one vehicle while t*dt lies in
/// [start_time, start_time + duration) and the vehicle still moves forward.
struct KickSchedule {
    int vehicle_index = 0;
    double control_override = -1.0;  // [m/s^2]
    double start_time = 0.0;         // [s]
    double duration = 6.0;           // [s]
};

/// Center-to-center distance from vehicle i to its leader, mod C, in (0, C].
double gap_to_leader(const RingState& state, const RingConfig& cfg, std::size_t i);

/// True if any bumper-to-bumper gap is <= 0.
bool has_overlap(const RingState& state, const RingConfig& cfg);

/// Equally spaced vehicles at a common speed; throws InvalidDensity when the
/// spacing does not exceed the vehicle length.
RingState init_uniform(const RingConfig& cfg, double v_init);

/// Default protocol speed v* - 1.
RingState init_uniform(const RingConfig& cfg);

/// Controls of all drivers computed from `state` (kick not applied).
std::vector<double> compute_controls(const RingState& state, const RingConfig& cfg);

/// One synchronous step of the map.
RingState step(const RingState& state, const RingConfig& cfg,
               const std::optional<KickSchedule>& kick);

struct TrajectorySample {
    std::int64_t t = 0;
    std::vector<double> x, v, a, u_bar;
    bool overlap = false;
};

/// Recorded states. Sample t holds the state at time t together with the
/// control computed from it.
struct Trajectory {
    int n_vehicles = 0;
    double circumference = 0.0;
    std::vector<TrajectorySample> samples;

    bool any_overlap() const;
    std::int64_t first_time() const;
    std::int64_t last_time() const;
};

/// Runs `steps` map iterations from `initial`, recording every
/// `record_every`-th state.
Trajectory run(const RingConfig& cfg, const RingState& initial, std::int64_t steps,
               const std::optional<KickSchedule>& kick, int record_every = 1);

/// Runs from init_uniform(cfg) (speed v* - 1).
Trajectory run(const RingConfig& cfg, std::int64_t steps, const std::optional<KickSchedule>& kick,
               int record_every = 1);

struct OrderParameters {
    double amplitude_A = 0.0;      // mean_t(max_i v - min_i v) [m/s]
    double mean_velocity_V = 0.0;  // mean_{i,t} v [m/s]
    std::int64_t t_start = 0;
    std::int64_t t_end = 0;
};

/// Order parameters over samples with t in [t_start, t_end). Throws
/// InvalidArgument when the window holds no samples.
OrderParameters order_parameters(const Trajectory& traj, std::int64_t t_start, std::int64_t t_end);

enum class FlowClass { FreeFlow, StopAndGo, Ambiguous };

std::string to_string(FlowClass c);

struct ClassifyThresholds {
    double a_free_flow = 0.05;       // A below -> FreeFlow [m/s]
    double a_stop_and_go = 1.0;      // A above -> StopAndGo [m/s]
    double transient_fraction = 0.5;
};

struct Classification {
    FlowClass flow = FlowClass::Ambiguous;
    OrderParameters order;
};

/// Discards the transient fraction of the trajectory and classifies the rest.
Classification classify(const Trajectory& traj, const ClassifyThresholds& th = {});

/// CSV export with header `t,vehicle,x,v,a,u_bar,overlap`.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace adseek
