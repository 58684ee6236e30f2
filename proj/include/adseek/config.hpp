#pragma once

// Run configuration: built-in defaults, overridden by a JSON config file, then
// by command-line `key=value` overrides. All keys live in one flat namespace.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "adseek/model.hpp"
#include "adseek/ring.hpp"
#include "adseek/stability.hpp"
#include "adseek/sweeps.hpp"

namespace adseek {

struct RunConfig {
    ModelParams model{};

    // ring geometry; rho, when set, overrides circumference as C = N / rho
    int n_vehicles = 28;
    double circumference = 314.0;
    std::optional<double> rho;

    // simulate
    std::int64_t steps = 12000;
    int record_every = 1;
    bool kick_enabled = true;
    double kick_strength = -1.0;
    std::string start = "uniform";  // "uniform" or "fixed_point"

    SimSettings sim{};

    // equilibrium curve
    double rho_min = 0.05;
    double rho_max = 0.17;
    int rho_points = 50;
    double residual_tol = 1e-8;

    // spectrum / critical density
    double fd_step = 1e-3;
    double zero_tol = 1e-6;
    double c_lo = 300.0;
    double c_hi = 330.0;
    double modulus_tol = 1e-4;
    double c_width_tol = 1e-3;

    // sweeps
    std::vector<double> rho_grid{0.06, 0.07, 0.08, 0.085, 0.09, 0.1, 0.11, 0.12,
                                 0.13, 0.14, 0.145, 0.15, 0.16};
    double onset_lo = 0.05;
    double onset_hi = 0.2;
    double onset_tol = 0.002;
    double scan_step = 0.01;
    std::vector<double> v_star_grid = default_v_star_grid();
    std::vector<double> vsa_rho_grid{0.07, 0.085, 0.1, 0.115, 0.13};
    double vsa_margin = 0.1;
    double vsa_v_min = 1.0;
    double vsa_tol = 0.02;

    std::int64_t seed = 1;  // reserved; the map is deterministic

    RingConfig ring() const;
    OnsetOptions onset_options() const;
    VsaOptions vsa_options() const;
    CriticalOptions critical_options() const;

    void validate() const;
};

/// All recognised keys with their units, in canonical order.
std::vector<std::pair<std::string, std::string>> config_keys();

/// Applies one override; `value` is parsed as JSON when possible, otherwise
/// taken as a string. Throws ConfigError naming the key on unknown keys or
/// type mismatches.
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

/// Defaults <- file (if given) <- overrides ("key=value" strings).
RunConfig parse_config(const std::optional<std::filesystem::path>& path,
                       const std::vector<std::string>& overrides = {});

/// Resolved configuration as pretty-printed JSON with every key.
std::string config_to_json(const RunConfig& cfg);

/// Writes resolved_config.json into `dir`.
void write_config_snapshot(const RunConfig& cfg, const std::filesystem::path& dir);

}  // namespace adseek
