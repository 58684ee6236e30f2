// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "adseek/equilibrium.hpp"
#include "adseek/errors.hpp"
#include "adseek/ring.hpp"
#include "adseek/stability.hpp"
#include "adseek/sweeps.hpp"

using namespace adseek;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

int failures = 0;

void criterion(int id, const std::string& title, const std::function<void(Outcome&)>& body) {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(out);
    } catch (const std::exception& e) {
        out.pass = false;
        out.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s [%d] %s:%s (%.1f s)\n", out.pass ? "PASS" : "FAIL", id, title.c_str(),
                out.detail.str().c_str(), secs);
    std::fflush(stdout);
    failures += out.pass ? 0 : 1;
}

bool within(double x, double target, double tol) {
    return std::abs(x - target) <= tol;
}

double gap_sum(const RingState& s, const RingConfig& cfg) {
    double sum = 0.0;
    for (std::size_t i = 0; i < s.vehicles.size(); ++i) {
        sum += gap_to_leader(s, cfg, i);
    }
    return sum;
}

}  // namespace

int main() {
    const ModelParams p;
    SimSettings sim;  // 12000 steps, kicks -1, -2, -4

    criterion(1, "critical densities from linear stability", [&](Outcome& o) {
        const auto ff1 = critical_density(28, {300.0, 330.0}, p);
        const auto ff2 = critical_density(42, {300.0, 330.0}, p);
        o.detail << " rho_ff1=" << ff1.rho_star << " (" << to_string(ff1.direction) << ")"
                 << " rho_ff2=" << ff2.rho_star << " (" << to_string(ff2.direction) << ")";
        o.require(within(ff1.rho_star, 0.090, 0.003), "rho_ff1 = 0.090 +- 0.003");
        o.require(within(ff2.rho_star, 0.134, 0.003), "rho_ff2 = 0.134 +- 0.003");
    });

    criterion(2, "root clouds at C=314", [&](Outcome& o) {
        const auto s26 = nontrivial_spectrum(26, 26 / 314.0, p);
        const auto s28 = nontrivial_spectrum(28, 28 / 314.0, p);
        const auto s30 = nontrivial_spectrum(30, 30 / 314.0, p);
        const auto r26 = spectral_radius(s26);
        const auto r28 = spectral_radius(s28);

        double im28 = 0.0;
        for (const auto& z : s28[r28.arg_mode].filtered_roots) {
            if (std::abs(std::abs(z) - r28.max_modulus) < 1e-9) {
                im28 = std::abs(z.imag());
            }
        }
        int outside_pairs = 0;
        for (const auto& m : s30) {
            if (m.mode_k == 0 || 2 * m.mode_k > 30) {
                continue;  // count each conjugate pair once (modes k and N-k)
            }
            for (const auto& z : m.filtered_roots) {
                if (std::abs(z) > 1.0 && std::abs(z.imag()) > 1e-9) {
                    ++outside_pairs;
                }
            }
        }
        o.detail << " N=26 max|z|=" << r26.max_modulus << " N=28 max|z|=" << r28.max_modulus
                 << " |Im|=" << im28 << " N=30 pairs outside=" << outside_pairs;
        o.require(r26.max_modulus < 1.0, "N=26 stable");
        o.require(std::abs(r28.max_modulus - 1.0) < 0.01, "N=28 touching");
        o.require(im28 > 0.01, "N=28 extremal roots complex");
        o.require(outside_pairs >= 2, "N=30 two pairs outside");
    });

    criterion(3, "limit solutions at N=28, C=314", [&](Outcome& o) {
        RingConfig cfg;
        cfg.params.v_star = 9.0;
        const auto t0 = std::chrono::steady_clock::now();
        const auto ff = classify(run(cfg, sim.steps, KickSchedule{}), sim.thresholds);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        cfg.params.v_star = 10.0;
        const auto sg = classify(run(cfg, sim.steps, KickSchedule{}), sim.thresholds);
        o.detail << " v*=9: " << to_string(ff.flow) << " A=" << ff.order.amplitude_A
                 << "; v*=10: " << to_string(sg.flow) << " A=" << sg.order.amplitude_A
                 << "; run time " << secs << " s";
        o.require(ff.flow == FlowClass::FreeFlow && ff.order.amplitude_A < 0.05, "v*=9 FreeFlow");
        o.require(sg.flow == FlowClass::StopAndGo && sg.order.amplitude_A > 1.0,
                  "v*=10 StopAndGo");
        o.require(secs < 30.0, "12000 steps under 30 s");
    });

    criterion(4, "stop-and-go boundaries and bistability", [&](Outcome& o) {
        const auto b = sg_onset(p.v_star, {0.05, 0.2}, p, sim);
        const RingConfig cfg{28, 28 / 0.085, p};
        const auto kicked = run_kicked(cfg, sim);
        const auto fixed = run_from_fixed_point(cfg, sim);
        o.detail << " rho_sg1=" << b.rho_sg1 << " rho_sg2=" << b.rho_sg2 << " (" << b.simulations
                 << " runs); rho=0.085 kicked " << to_string(kicked.flow) << ", fixed point "
                 << to_string(fixed.flow);
        o.require(within(b.rho_sg1, 0.082, 0.005), "rho_sg1 = 0.082 +- 0.005");
        o.require(within(b.rho_sg2, 0.146, 0.005), "rho_sg2 = 0.146 +- 0.005");
        o.require(kicked.flow == FlowClass::StopAndGo, "kicked start StopAndGo");
        o.require(fixed.flow == FlowClass::FreeFlow, "fixed-point start FreeFlow");
    });

    criterion(5, "Pareto ordering in the first bistable band", [&](Outcome& o) {
        for (double rho : {0.0835, 0.086, 0.0885}) {
            const RingConfig cfg{28, 28 / rho, p};
            const auto sg = run_kicked(cfg, sim);
            const auto ff = run_from_fixed_point(cfg, sim);
            o.detail << " rho=" << rho << ": V_FF=" << ff.order.mean_velocity_V
                     << " V_SG=" << sg.order.mean_velocity_V << " A_FF=" << ff.order.amplitude_A
                     << " A_SG=" << sg.order.amplitude_A << ";";
            o.require(sg.flow == FlowClass::StopAndGo && ff.flow == FlowClass::FreeFlow,
                      "both branches present");
            o.require(ff.order.mean_velocity_V > sg.order.mean_velocity_V, "V_FF > V_SG");
            o.require(ff.order.amplitude_A < sg.order.amplitude_A, "A_FF < A_SG");
        }
    });

    criterion(6, "speed advisory removes the waves", [&](Outcome& o) {
        const std::vector<double> grid{0.085, 0.1, 0.115, 0.13};
        const auto recs = vsa_comparison(grid, p, sim);
        for (const auto& r : recs) {
            o.detail << " rho=" << r.rho << ": v*_c=" << r.v_star_c << " V_with=" << r.V_with_vsa
                     << " V_without=" << r.V_without_vsa << " A_with=" << r.A_with << ";";
            o.require(r.flow_with == FlowClass::FreeFlow, "FreeFlow with advisory");
            o.require(r.V_with_vsa > r.V_without_vsa, "V_with > V_without");
        }
    });

    criterion(7, "property suites", [&](Outcome& o) {
        // slope identities
        double worst_identity = 0.0, worst_antisym = 0.0;
        for (double rho : {0.06, 0.08, 0.09, 0.11, 0.134}) {
            const auto b = slope_vectors(rho, p);
            worst_identity = std::max({worst_identity, b.identity_error(0), b.identity_error(1)});
            worst_antisym = std::max(worst_antisym, b.antisymmetry_error());
        }
        o.detail << " identity err=" << worst_identity;
        o.require(worst_identity < 0.01, "beta_v - beta_a/dt = dt beta_x within 1%");
        o.require(worst_antisym < 0.01, "beta0_x = -beta1_x");

        // root structure
        for (int n : {26, 28, 42}) {
            const auto b = slope_vectors(n / 314.0, p);
            std::size_t count = 0;
            bool residuals_ok = true, conj_ok = true, unit_root_ok = true;
            std::vector<ModeSpectrum> spectra;
            for (int k = 0; k < n; ++k) {
                const auto m = mode_roots(mode_polynomial(k, n, b, p.dt));
                count += m.filtered_roots.size();
                for (double r : m.residuals) {
                    residuals_ok = residuals_ok && r < 1e-8;
                }
                bool has_one = false;
                for (const auto& z : m.roots) {
                    has_one = has_one || std::abs(z - 1.0) < 1e-6;
                }
                unit_root_ok = unit_root_ok && (has_one == (k == 0));
                spectra.push_back(m);
            }
            for (int k = 1; k < n; ++k) {
                for (const auto& z : spectra[k].filtered_roots) {
                    double best = 1e9;
                    for (const auto& w : spectra[n - k].filtered_roots) {
                        best = std::min(best, std::abs(std::conj(z) - w));
                    }
                    conj_ok = conj_ok && best < 1e-9;
                }
            }
            o.require(count == static_cast<std::size_t>(2 * n - 1), "2N-1 filtered roots");
            o.require(residuals_ok, "root residuals < 1e-8");
            o.require(conj_ok, "conjugate closure");
            o.require(unit_root_ok, "z=1 only for k=0");
        }

        // linearized oracle: stable, near-critical, unstable
        for (int n : {26, 28, 30}) {
            const double radius = spectral_radius(nontrivial_spectrum(n, n / 314.0, p)).max_modulus;
            const double growth = linearized_oracle(n, n / 314.0, p, 5000);
            o.detail << " oracle N=" << n << ": " << growth << " vs " << radius << ";";
            o.require(std::abs(growth - radius) / radius < 0.02, "oracle within 2%");
        }

        // ring invariants
        const RingConfig cfg;
        RingState a = init_uniform(cfg);
        RingState shifted = a;
        for (auto& v : shifted.vehicles) {
            v.x = std::fmod(v.x + 100.5, cfg.circumference);
        }
        RingState rotated = a;
        std::rotate(rotated.vehicles.begin(), rotated.vehicles.begin() + 1, rotated.vehicles.end());
        double worst_gap = 0.0, worst_shift = 0.0, worst_rot = 0.0;
        for (int k = 0; k < 500; ++k) {
            a = step(a, cfg, std::nullopt);
            shifted = step(shifted, cfg, std::nullopt);
            rotated = step(rotated, cfg, std::nullopt);
            worst_gap = std::max(worst_gap, std::abs(gap_sum(a, cfg) - cfg.circumference));
        }
        const std::size_t n = a.vehicles.size();
        for (std::size_t i = 0; i < n; ++i) {
            worst_shift = std::max(worst_shift, std::abs(a.vehicles[i].v - shifted.vehicles[i].v));
            worst_rot = std::max(worst_rot,
                                 std::abs(a.vehicles[(i + 1) % n].v - rotated.vehicles[i].v));
        }
        o.require(worst_gap < 1e-9 * cfg.circumference, "gap sum = C");
        o.require(worst_shift < 1e-12, "translation equivariance");
        o.require(worst_rot == 0.0, "relabeling equivariance");

        const auto eq = equilibrium_velocity(cfg.density(), p);
        RingState fp = fixed_point(eq, cfg.n_vehicles);
        double worst_fp = 0.0;
        for (int k = 0; k < 1000; ++k) {
            fp = step(fp, cfg, std::nullopt);
            for (const auto& v : fp.vehicles) {
                worst_fp = std::max(worst_fp, std::abs(v.v - eq.v0));
            }
        }
        o.detail << " fixed-point drift=" << worst_fp;
        o.require(worst_fp < 1e-4, "fixed-point invariance");

        // equilibrium certificates
        std::vector<double> grid;
        for (int i = 0; i < 50; ++i) {
            grid.push_back(0.05 + 0.12 * i / 49);
        }
        const auto rows = equilibrium_curve(grid, p);
        bool cert = true, mono = true;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            cert = cert && rows[i].ok() &&
                   std::abs(stationary_control(rows[i].rho, rows[i].v0, p)) < 1e-8;
            if (i > 0) {
                mono = mono && rows[i].v0 <= rows[i - 1].v0;
            }
        }
        o.require(cert, "|u_bar(v0)| < 1e-8");
        o.require(mono, "v0 non-increasing");
    });

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
