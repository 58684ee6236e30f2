#pragma once

// Simulation-driven bifurcation analysis: the 1D diagram over density, the
// stop-and-go onset/offset densities, the (rho, v*) phase diagram and the
// variable-speed-advisory curve derived from it.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "adseek/model.hpp"
#include "adseek/ring.hpp"
#include "adseek/stability.hpp"

namespace adseek {

struct SimSettings {
    std::int64_t steps = 12000;
    ClassifyThresholds thresholds{};
    /// Kick strengths tried in order; the widest stop-and-go verdict wins.
    std::vector<double> kick_strengths{-1.0, -2.0, -4.0};
    double kick_duration = 6.0;  // [s]
    double kick_start = 0.0;     // [s]
    int kick_vehicle = 0;
    unsigned jobs = 0;           // 0: hardware concurrency
};

/// How a density is turned into an integer vehicle count and circumference.
enum class DensityAnchor {
    Generic,  // N = round(314 rho) clamped to [20, 50]
    Low,      // N = 28 (near the lower critical densities)
    High,     // N = 42 (near the upper critical densities)
};

struct DensityRealization {
    int n_vehicles = 0;
    double circumference = 0.0;
    double rho() const { return n_vehicles / circumference; }
};

DensityRealization realize_density(double rho, DensityAnchor anchor);

struct ProtocolResult {
    FlowClass flow = FlowClass::Ambiguous;
    OrderParameters order;
    std::optional<double> kick;  // strength that produced the verdict (kicked protocol)
    bool overlap = false;
};

/// Kicked protocol: uniform start at v* - 1, each kick strength tried in turn
/// until one yields StopAndGo. Without a stop-and-go verdict the result is
/// the worst remaining class (Ambiguous over FreeFlow) and the order
/// parameters of the first kick.
ProtocolResult run_kicked(const RingConfig& cfg, const SimSettings& s);

/// Unkicked start exactly at the free-flow fixed point.
ProtocolResult run_from_fixed_point(const RingConfig& cfg, const SimSettings& s);

/// Every kick strength must classify FreeFlow; returns the worst verdict.
ProtocolResult run_kicked_all(const RingConfig& cfg, const SimSettings& s);

struct BranchPoint {
    double rho = 0.0;
    FlowClass branch = FlowClass::FreeFlow;
    double A = 0.0;
    double V = 0.0;
    int n_vehicles = 0;
    double circumference = 0.0;
    std::string flags;
};

std::vector<BranchPoint> bifurcation_1d(double v_star, std::span<const double> rho_grid,
                                        const ModelParams& base, const SimSettings& s,
                                        DensityAnchor anchor = DensityAnchor::Generic);

struct OnsetOptions {
    double tol = 0.002;        // final bracket width [1/m]
    double scan_step = 0.01;   // coarse scan spacing [1/m]
};

struct SgBoundaries {
    double rho_sg1 = 0.0;
    double rho_sg2 = 0.0;
    int simulations = 0;
};

/// Onset and offset densities of the stop-and-go branch within the bracket.
/// Throws NotFound if no scanned density yields StopAndGo, and NotFound when
/// the bracket ends themselves are stop-and-go (no boundary inside).
SgBoundaries sg_onset(double v_star, std::pair<double, double> rho_bracket,
                      const ModelParams& base, const SimSettings& s,
                      const OnsetOptions& opt = {});

/// Only the onset, searched downward from a density known to be stop-and-go.
double sg_onset_below(double v_star, double rho_sg, double rho_floor, const ModelParams& base,
                      const SimSettings& s, const OnsetOptions& opt = {});

/// First linear-stability loss for N = n_vehicles, scanning density upward
/// from rho_lo in steps of rho_step, then bisecting.
CriticalDensity find_rho_ff1(const ModelParams& p, int n_vehicles = 28, double rho_lo = 0.04,
                             double rho_hi = 0.2, double rho_step = 0.005);

struct PhasePoint {
    double v_star = 0.0;
    double rho_sg1 = 0.0;
    double rho_ff1 = 0.0;
    std::string flags;
};

/// Default v* grid: 7.0 to 10.49 in 0.25 steps with the endpoint included.
std::vector<double> default_v_star_grid();

std::vector<PhasePoint> phase_2d(std::span<const double> v_star_grid, const ModelParams& base,
                                 const SimSettings& s, const OnsetOptions& opt = {});

struct VsaOptions {
    double margin = 0.1;      // subtracted from v*_c [m/s]
    double v_star_min = 1.0;  // lowest advisory considered [m/s]
    double tol = 0.02;        // bisection width on v* [m/s]
};

struct VsaRecord {
    double rho = 0.0;
    double v_star_c = 0.0;
    double V_with_vsa = 0.0;
    double V_without_vsa = 0.0;
    double A_with = 0.0;
    double A_without = 0.0;
    FlowClass flow_with = FlowClass::Ambiguous;
    FlowClass flow_without = FlowClass::Ambiguous;
    std::string flags;
};

/// Critical ideal speed per density: the largest v* at which a kicked run at
/// that density does not settle into stop-and-go.
std::vector<VsaRecord> vsa_curve(std::span<const double> rho_grid, const ModelParams& base,
                                 const SimSettings& s, const VsaOptions& opt = {});

/// vsa_curve plus kicked runs with and without the advisory (v*_c - margin).
std::vector<VsaRecord> vsa_comparison(std::span<const double> rho_grid, const ModelParams& base,
                                      const SimSettings& s, const VsaOptions& opt = {});

}  // namespace adseek
