#include "adseek/ring.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>

#include "adseek/errors.hpp"

namespace adseek {

namespace {

double wrap(double x, double c) {
    double r = std::fmod(x, c);
    if (r < 0.0) {
        r += c;
    }
    // fmod of a value just below 0 can round up to exactly c
    return r >= c ? 0.0 : r;
}

}  // namespace

void RingConfig::validate() const {
    params.validate();
    if (n_vehicles < 2) {
        throw InvalidArgument("RingConfig: need at least 2 vehicles");
    }
    if (!(circumference > 0.0)) {
        throw InvalidArgument("RingConfig: circumference must be positive");
    }
    if (circumference / n_vehicles <= params.vehicle_length) {
        throw InvalidDensity("RingConfig: vehicles do not fit on the ring (C/N <= L)");
    }
}

double gap_to_leader(const RingState& state, const RingConfig& cfg, std::size_t i) {
    const std::size_t n = state.vehicles.size();
    const double c = cfg.circumference;
    const double d = wrap(state.vehicles[(i + 1) % n].x - state.vehicles[i].x, c);
    // coincident positions are a full lap apart, never zero
    return d > 0.0 ? d : c;
}

bool has_overlap(const RingState& state, const RingConfig& cfg) {
    const double len = cfg.params.vehicle_length;
    for (std::size_t i = 0; i < state.vehicles.size(); ++i) {
        if (gap_to_leader(state, cfg, i) - len <= 0.0) {
            return true;
        }
    }
    return false;
}

RingState init_uniform(const RingConfig& cfg, double v_init) {
    cfg.validate();
    RingState s;
    s.vehicles.resize(static_cast<std::size_t>(cfg.n_vehicles));
    const double spacing = cfg.circumference / cfg.n_vehicles;
    for (std::size_t i = 0; i < s.vehicles.size(); ++i) {
        s.vehicles[i] = {static_cast<double>(i) * spacing, v_init, 0.0, 0.0};
    }
    return s;
}

RingState init_uniform(const RingConfig& cfg) {
    return init_uniform(cfg, cfg.params.v_star - 1.0);
}

std::vector<double> compute_controls(const RingState& state, const RingConfig& cfg) {
    const std::size_t n = state.vehicles.size();
    const auto grid = cfg.params.action_grid();
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& ego = state.vehicles[i];
        const auto& lead = state.vehicles[(i + 1) % n];
        DriverView view{{ego.x, ego.v, ego.a}, {lead.x, lead.v, lead.a},
                        gap_to_leader(state, cfg, i)};
        u[i] = control(view, cfg.params, grid);
    }
    return u;
}

RingState step(const RingState& state, const RingConfig& cfg,
               const std::optional<KickSchedule>& kick) {
    const auto& p = cfg.params;
    auto u = compute_controls(state, cfg);

    RingState next = state;
    if (kick && !state.kick_spent) {
        const auto k = static_cast<std::size_t>(kick->vehicle_index);
        const double now = static_cast<double>(state.time_index) * p.dt;
        const bool in_window = now >= kick->start_time && now < kick->start_time + kick->duration;
        if (in_window && state.vehicles.at(k).v > 0.0) {
            u[k] = kick->control_override;
        } else if (now >= kick->start_time) {
            next.kick_spent = true;
        }
    }

    for (std::size_t i = 0; i < next.vehicles.size(); ++i) {
        const auto& cur = state.vehicles[i];
        auto& nv = next.vehicles[i];
        nv.x = wrap(cur.x + cur.v * p.dt, cfg.circumference);
        nv.v = cur.v + cur.a * p.dt;
        nv.a = p.gamma * cur.a + (u[i] - p.gamma * cur.prev_control);
        nv.prev_control = u[i];
    }
    next.time_index = state.time_index + 1;
    return next;
}

bool Trajectory::any_overlap() const {
    return std::any_of(samples.begin(), samples.end(),
                       [](const TrajectorySample& s) { return s.overlap; });
}

std::int64_t Trajectory::first_time() const {
    return samples.empty() ? 0 : samples.front().t;
}

std::int64_t Trajectory::last_time() const {
    return samples.empty() ? 0 : samples.back().t;
}

Trajectory run(const RingConfig& cfg, const RingState& initial, std::int64_t steps,
               const std::optional<KickSchedule>& kick, int record_every) {
    cfg.validate();
    if (steps < 1) {
        throw InvalidArgument("run: steps must be >= 1");
    }
    if (record_every < 1) {
        throw InvalidArgument("run: record_every must be >= 1");
    }
    if (static_cast<int>(initial.vehicles.size()) != cfg.n_vehicles) {
        throw InvalidArgument("run: initial state size does not match n_vehicles");
    }
    if (kick && (kick->vehicle_index < 0 || kick->vehicle_index >= cfg.n_vehicles ||
                 kick->duration < 0.0)) {
        throw InvalidArgument("run: invalid kick schedule");
    }

    Trajectory traj;
    traj.n_vehicles = cfg.n_vehicles;
    traj.circumference = cfg.circumference;
    traj.samples.reserve(static_cast<std::size_t>(steps / record_every + 1));

    RingState state = initial;
    for (std::int64_t s = 0; s < steps; ++s) {
        RingState next = step(state, cfg, kick);
        if ((state.time_index - initial.time_index) % record_every == 0) {
            TrajectorySample rec;
            rec.t = state.time_index;
            const std::size_t n = state.vehicles.size();
            rec.x.resize(n);
            rec.v.resize(n);
            rec.a.resize(n);
            rec.u_bar.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                rec.x[i] = state.vehicles[i].x;
                rec.v[i] = state.vehicles[i].v;
                rec.a[i] = state.vehicles[i].a;
                rec.u_bar[i] = next.vehicles[i].prev_control;
            }
            rec.overlap = has_overlap(state, cfg);
            traj.samples.push_back(std::move(rec));
        }
        state = std::move(next);
    }
    return traj;
}

Trajectory run(const RingConfig& cfg, std::int64_t steps, const std::optional<KickSchedule>& kick,
               int record_every) {
    return run(cfg, init_uniform(cfg), steps, kick, record_every);
}

OrderParameters order_parameters(const Trajectory& traj, std::int64_t t_start,
                                 std::int64_t t_end) {
    double spread_sum = 0.0;
    double v_sum = 0.0;
    std::size_t n_times = 0;
    std::size_t n_values = 0;
    for (const auto& s : traj.samples) {
        if (s.t < t_start || s.t >= t_end || s.v.empty()) {
            continue;
        }
        const auto [lo, hi] = std::minmax_element(s.v.begin(), s.v.end());
        spread_sum += *hi - *lo;
        for (double v : s.v) {
            v_sum += v;
        }
        ++n_times;
        n_values += s.v.size();
    }
    if (n_times == 0) {
        throw InvalidArgument("order_parameters: empty window");
    }
    return {spread_sum / static_cast<double>(n_times), v_sum / static_cast<double>(n_values),
            t_start, t_end};
}

std::string to_string(FlowClass c) {
    switch (c) {
        case FlowClass::FreeFlow:
            return "FreeFlow";
        case FlowClass::StopAndGo:
            return "StopAndGo";
        case FlowClass::Ambiguous:
            return "Ambiguous";
    }
    return "Ambiguous";
}

Classification classify(const Trajectory& traj, const ClassifyThresholds& th) {
    if (traj.samples.empty()) {
        throw InvalidArgument("classify: empty trajectory");
    }
    const std::int64_t t0 = traj.first_time();
    const std::int64_t t1 = traj.last_time() + 1;
    const auto skip = static_cast<std::int64_t>(std::floor(th.transient_fraction * (t1 - t0)));
    Classification out;
    out.order = order_parameters(traj, t0 + skip, t1);
    if (out.order.amplitude_A < th.a_free_flow) {
        out.flow = FlowClass::FreeFlow;
    } else if (out.order.amplitude_A > th.a_stop_and_go) {
        out.flow = FlowClass::StopAndGo;
    } else {
        out.flow = FlowClass::Ambiguous;
    }
    return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "t,vehicle,x,v,a,u_bar,overlap\n";
    os << std::setprecision(9);
    for (const auto& s : traj.samples) {
        for (std::size_t i = 0; i < s.v.size(); ++i) {
            os << s.t << ',' << i << ',' << s.x[i] << ',' << s.v[i] << ',' << s.a[i] << ','
               << s.u_bar[i] << ',' << (s.overlap ? 1 : 0) << '\n';
        }
    }
}

}  // namespace adseek
