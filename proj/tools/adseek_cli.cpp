// Command-line front end. Every subcommand resolves the configuration, writes
// resolved_config.json into the output directory and then its own tables.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "adseek/config.hpp"
#include "adseek/equilibrium.hpp"
#include "adseek/errors.hpp"
#include "adseek/ring.hpp"
#include "adseek/stability.hpp"
#include "adseek/sweeps.hpp"
#include "adseek/table.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace adseek;

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kNumerical = 3, kIo = 4 };

void write_json(const json& doc, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << doc.dump(2) << '\n';
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

json nan_safe(double v) {
    return std::isfinite(v) ? json(v) : json(nullptr);
}

json modes_json(const std::set<int>& modes) {
    return json(std::vector<int>(modes.begin(), modes.end()));
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> g;
    for (int i = 0; i < n; ++i) {
        g.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
    }
    return g;
}

void cmd_simulate(const RunConfig& cfg, const fs::path& out) {
    const RingConfig ring = cfg.ring();
    ring.validate();
    const RingState initial = cfg.start == "fixed_point"
                                  ? fixed_point(ring.density(), ring.n_vehicles, ring.params)
                                  : init_uniform(ring);
    std::optional<KickSchedule> kick;
    if (cfg.kick_enabled) {
        kick = KickSchedule{cfg.sim.kick_vehicle, cfg.kick_strength, cfg.sim.kick_start,
                            cfg.sim.kick_duration};
    }
    const Trajectory traj = run(ring, initial, cfg.steps, kick, cfg.record_every);

    const fs::path csv = out / "trajectory.csv";
    std::ofstream os(csv, std::ios::binary);
    if (!os) {
        throw IoError("cannot open " + csv.string() + " for writing");
    }
    write_trajectory_csv(os, traj);
    os.flush();
    if (!os) {
        throw IoError("failed writing " + csv.string());
    }

    const auto c = classify(traj, cfg.sim.thresholds);
    json doc{{"n_vehicles", ring.n_vehicles},
             {"circumference", ring.circumference},
             {"rho", ring.density()},
             {"v_star", ring.params.v_star},
             {"steps", cfg.steps},
             {"flow", to_string(c.flow)},
             {"A", c.order.amplitude_A},
             {"V", c.order.mean_velocity_V},
             {"window", {c.order.t_start, c.order.t_end}},
             {"overlap", traj.any_overlap()}};
    write_json(doc, out / "simulate.json");
    std::cout << "simulate: " << to_string(c.flow) << " A=" << c.order.amplitude_A
              << " V=" << c.order.mean_velocity_V << '\n';
}

void cmd_equilibrium(const RunConfig& cfg, const fs::path& out) {
    EquilibriumOptions opt;
    opt.residual_tol = cfg.residual_tol;
    const auto grid = linspace(cfg.rho_min, cfg.rho_max, cfg.rho_points);
    const auto rows = equilibrium_curve(grid, cfg.model, opt);
    Table t{{{"rho", "1/m"}, {"v0", "m/s"}, {"residual", "m/s^2"}, {"flags", ""}}, {}};
    int failed = 0;
    for (const auto& r : rows) {
        t.add_row({r.rho, r.v0, r.residual, r.flags});
        failed += r.ok() ? 0 : 1;
    }
    emit_table(t, out / "equilibrium.csv");
    std::cout << "equilibrium: " << rows.size() << " rows, " << failed << " without a solution\n";
}

void cmd_spectrum(const RunConfig& cfg, const fs::path& out) {
    const RingConfig ring = cfg.ring();
    ring.validate();
    const SlopePair betas = slope_vectors(ring.density(), ring.params, cfg.fd_step);
    RootOptions ropt;
    ropt.zero_tol = cfg.zero_tol;
    const auto spectra = nontrivial_spectrum(ring.n_vehicles, betas, ring.params.dt, ropt);

    Table t{{{"k", ""}, {"re", ""}, {"im", ""}, {"modulus", ""}, {"is_filtered", ""}}, {}};
    for (const auto& m : spectra) {
        for (std::size_t j = 0; j < m.roots.size(); ++j) {
            const cplx z = m.roots[j];
            t.add_row({static_cast<long long>(m.mode_k), z.real(), z.imag(), std::abs(z),
                       static_cast<long long>(m.is_filtered[j] ? 1 : 0)});
        }
    }
    emit_table(t, out / "spectrum.csv");

    const auto sr = spectral_radius(spectra);
    json beta = {{"ego", {betas.ego.beta_x, betas.ego.beta_v, betas.ego.beta_a}},
                 {"leader", {betas.leader.beta_x, betas.leader.beta_v, betas.leader.beta_a}}};
    json doc{{"n_vehicles", ring.n_vehicles},
             {"circumference", ring.circumference},
             {"rho", ring.density()},
             {"v0", betas.equilibrium.v0},
             {"beta_xva", beta},
             {"max_modulus", sr.max_modulus},
             {"arg_mode", sr.arg_mode},
             {"extremal_modes", modes_json(extremal_modes(spectra))}};
    write_json(doc, out / "spectrum.json");
    std::cout << "spectrum: max|z|=" << sr.max_modulus << " at k=" << sr.arg_mode << '\n';
}

void cmd_critical_density(const RunConfig& cfg, const fs::path& out) {
    const auto cd =
        critical_density(cfg.n_vehicles, {cfg.c_lo, cfg.c_hi}, cfg.model, cfg.critical_options());
    json doc{{"n_vehicles", cd.n_vehicles},
             {"v_star", cd.v_star},
             {"rho_star", cd.rho_star},
             {"c_star", cd.c_star},
             {"max_modulus", cd.max_modulus},
             {"crossing_modes", modes_json(cd.crossing_modes)},
             {"direction", to_string(cd.direction)},
             {"bracket", {cd.bracket.first, cd.bracket.second}},
             {"iterations", cd.iterations}};
    write_json(doc, out / "critical_density.json");
    std::cout << "critical-density: rho*=" << cd.rho_star << " (" << to_string(cd.direction)
              << ")\n";
}

void cmd_bifurcation_1d(const RunConfig& cfg, const fs::path& out) {
    const auto pts = bifurcation_1d(cfg.model.v_star, cfg.rho_grid, cfg.model, cfg.sim);
    Table t{{{"rho", "1/m"},
             {"branch", ""},
             {"A", "m/s"},
             {"V", "m/s"},
             {"N", ""},
             {"C", "m"},
             {"flags", ""}},
            {}};
    for (const auto& p : pts) {
        t.add_row({p.rho, to_string(p.branch), p.A, p.V, static_cast<long long>(p.n_vehicles),
                   p.circumference, p.flags});
    }
    emit_table(t, out / "bifurcation_1d.csv");
    std::cout << "bifurcation-1d: " << pts.size() << " branch points\n";
}

void cmd_sg_onset(const RunConfig& cfg, const fs::path& out) {
    const auto b = sg_onset(cfg.model.v_star, {cfg.onset_lo, cfg.onset_hi}, cfg.model, cfg.sim,
                            cfg.onset_options());
    json doc{{"v_star", cfg.model.v_star},
             {"rho_sg1", b.rho_sg1},
             {"rho_sg2", b.rho_sg2},
             {"tol", cfg.onset_tol},
             {"simulations", b.simulations}};
    write_json(doc, out / "sg_onset.json");
    std::cout << "sg-onset: rho_sg1=" << b.rho_sg1 << " rho_sg2=" << b.rho_sg2 << '\n';
}

void cmd_phase_2d(const RunConfig& cfg, const fs::path& out) {
    const auto pts = phase_2d(cfg.v_star_grid, cfg.model, cfg.sim, cfg.onset_options());
    Table t{{{"v_star", "m/s"}, {"rho_sg1", "1/m"}, {"rho_ff1", "1/m"}, {"flags", ""}}, {}};
    for (const auto& p : pts) {
        t.add_row({p.v_star, p.rho_sg1, p.rho_ff1, p.flags});
    }
    emit_table(t, out / "phase_2d.csv");
    std::cout << "phase-2d: " << pts.size() << " rows\n";
}

void cmd_vsa_curve(const RunConfig& cfg, const fs::path& out) {
    const auto recs = vsa_curve(cfg.vsa_rho_grid, cfg.model, cfg.sim, cfg.vsa_options());
    Table t{{{"rho", "1/m"}, {"v_star_c", "m/s"}, {"flags", ""}}, {}};
    for (const auto& r : recs) {
        t.add_row({r.rho, r.v_star_c, r.flags});
    }
    emit_table(t, out / "vsa_curve.csv");
    std::cout << "vsa-curve: " << recs.size() << " rows\n";
}

void cmd_vsa_compare(const RunConfig& cfg, const fs::path& out) {
    const auto recs = vsa_comparison(cfg.vsa_rho_grid, cfg.model, cfg.sim, cfg.vsa_options());
    Table t{{{"rho", "1/m"},
             {"v_star_c", "m/s"},
             {"V_with", "m/s"},
             {"V_without", "m/s"},
             {"A_with", "m/s"},
             {"A_without", "m/s"},
             {"flags", ""}},
            {}};
    for (const auto& r : recs) {
        t.add_row({r.rho, r.v_star_c, r.V_with_vsa, r.V_without_vsa, r.A_with, r.A_without,
                   r.flags});
    }
    emit_table(t, out / "vsa.csv");
    std::cout << "vsa-compare: " << recs.size() << " rows\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ring-road simulation and stability analysis of the adaptiveSeek driver model"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir = "out";
    unsigned jobs = 0;
    bool list_keys = false;

    app.add_option("--config", config_path, "JSON file with flat key/value overrides");
    app.add_option("--set", overrides, "Override one key, e.g. --set v_star=9.0")
        ->allow_extra_args(false);
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_option("--jobs", jobs, "Worker threads for sweeps (0: all cores)");
    app.add_flag("--list-keys", list_keys, "Print every config key with its unit and exit");
    app.fallthrough();

    using Handler = void (*)(const RunConfig&, const fs::path&);
    const std::vector<std::tuple<std::string, std::string, Handler>> commands{
        {"simulate", "Run the ring map and write trajectory.csv", cmd_simulate},
        {"equilibrium", "Equilibrium speed over a density grid", cmd_equilibrium},
        {"spectrum", "Characteristic roots of the linearized map", cmd_spectrum},
        {"critical-density", "Density where the fixed point loses stability",
         cmd_critical_density},
        {"bifurcation-1d", "Branch points (A, V) over a density grid", cmd_bifurcation_1d},
        {"sg-onset", "Onset and offset densities of stop-and-go waves", cmd_sg_onset},
        {"phase-2d", "Stop-and-go onset and linear instability versus v_star", cmd_phase_2d},
        {"vsa-curve", "Critical ideal speed per density", cmd_vsa_curve},
        {"vsa-compare", "Runs with and without the speed advisory", cmd_vsa_compare},
    };
    Handler chosen = nullptr;
    for (const auto& [name, help, fn] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->callback([&chosen, fn = fn] { chosen = fn; });
    }

    // --list-keys works without a subcommand
    for (int i = 1; i < argc; ++i) {
        if (std::string(argv[i]) == "--list-keys") {
            for (const auto& [key, unit] : config_keys()) {
                std::cout << key << (unit.empty() ? "" : " [" + unit + "]") << '\n';
            }
            return kOk;
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        std::optional<fs::path> path;
        if (!config_path.empty()) {
            path = config_path;
        }
        RunConfig cfg = parse_config(path, overrides);
        cfg.sim.jobs = jobs;

        const fs::path out{out_dir};
        std::error_code ec;
        fs::create_directories(out, ec);
        if (ec) {
            throw IoError("cannot create output directory " + out.string() + ": " + ec.message());
        }
        write_config_snapshot(cfg, out);
        chosen(cfg, out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const InvalidArgument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIo;
    }
    return kOk;
}
