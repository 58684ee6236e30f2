#include "adseek/sweeps.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>

#include "adseek/equilibrium.hpp"
#include "adseek/errors.hpp"
#include "adseek/parallel.hpp"

namespace adseek {

namespace {

constexpr double kReferenceCircumference = 314.0;

KickSchedule make_kick(const SimSettings& s, double strength) {
    return KickSchedule{s.kick_vehicle, strength, s.kick_start, s.kick_duration};
}

ProtocolResult evaluate(const Trajectory& traj, const SimSettings& s) {
    const auto c = classify(traj, s.thresholds);
    const bool overlap = traj.any_overlap();
    // Vehicles passing through each other is not a physical limit solution.
    return ProtocolResult{overlap ? FlowClass::Ambiguous : c.flow, c.order, std::nullopt, overlap};
}

// Ranking used when combining verdicts of several kicks.
int severity(FlowClass f) {
    switch (f) {
        case FlowClass::FreeFlow:
            return 0;
        case FlowClass::Ambiguous:
            return 1;
        case FlowClass::StopAndGo:
            return 2;
    }
    return 1;
}

RingConfig ring_for(double rho, double v_star, const ModelParams& base, DensityAnchor anchor) {
    const auto r = realize_density(rho, anchor);
    ModelParams p = base;
    p.v_star = v_star;
    return RingConfig{r.n_vehicles, r.circumference, p};
}

bool kicked_is_stop_and_go(double rho, double v_star, const ModelParams& base,
                           const SimSettings& s, DensityAnchor anchor) {
    RingConfig cfg;
    try {
        cfg = ring_for(rho, v_star, base, anchor);
        cfg.validate();
    } catch (const InvalidDensity&) {
        return false;  // bumpers would overlap at rest
    }
    return run_kicked(cfg, s).flow == FlowClass::StopAndGo;
}

void append_flag(std::string& flags, const std::string& f) {
    if (!flags.empty()) {
        flags += ';';
    }
    flags += f;
}

std::string kick_flag(const ProtocolResult& r) {
    std::ostringstream os;
    if (r.kick) {
        os << "kick=" << *r.kick;
    } else {
        os << "fixed_point";
    }
    if (r.overlap) {
        os << ";overlap";
    }
    if (r.flow == FlowClass::Ambiguous) {
        os << ";ambiguous";
    }
    return os.str();
}

// Shrinks [lo, hi] where pred(lo) != pred(hi) down to width tol.
template <class Pred>
std::pair<double, double> bisect_predicate(double lo, double hi, bool pred_lo, double tol,
                                           Pred&& pred) {
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (pred(mid) == pred_lo) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return {lo, hi};
}

}  // namespace

DensityRealization realize_density(double rho, DensityAnchor anchor) {
    if (!(rho > 0.0) || !std::isfinite(rho)) {
        throw InvalidDensity("realize_density: density must be positive");
    }
    int n = 0;
    switch (anchor) {
        case DensityAnchor::Low:
            n = 28;
            break;
        case DensityAnchor::High:
            n = 42;
            break;
        case DensityAnchor::Generic:
            n = std::clamp(static_cast<int>(std::lround(rho * kReferenceCircumference)), 20, 50);
            break;
    }
    return DensityRealization{n, n / rho};
}

ProtocolResult run_kicked(const RingConfig& cfg, const SimSettings& s) {
    if (s.kick_strengths.empty()) {
        throw InvalidArgument("run_kicked: no kick strengths configured");
    }
    std::optional<ProtocolResult> first;
    int worst = -1;
    for (double strength : s.kick_strengths) {
        auto r = evaluate(run(cfg, s.steps, make_kick(s, strength)), s);
        r.kick = strength;
        if (r.flow == FlowClass::StopAndGo) {
            return r;
        }
        worst = std::max(worst, severity(r.flow));
        if (!first) {
            first = r;
        }
    }
    ProtocolResult out = *first;
    if (worst == severity(FlowClass::Ambiguous)) {
        out.flow = FlowClass::Ambiguous;
    }
    return out;
}

ProtocolResult run_kicked_all(const RingConfig& cfg, const SimSettings& s) {
    if (s.kick_strengths.empty()) {
        throw InvalidArgument("run_kicked_all: no kick strengths configured");
    }
    std::optional<ProtocolResult> out;
    for (double strength : s.kick_strengths) {
        auto r = evaluate(run(cfg, s.steps, make_kick(s, strength)), s);
        r.kick = strength;
        if (!out || severity(r.flow) > severity(out->flow)) {
            const bool overlap = out && out->overlap;
            out = r;
            out->overlap = out->overlap || overlap;
        } else {
            out->overlap = out->overlap || r.overlap;
        }
    }
    return *out;
}

ProtocolResult run_from_fixed_point(const RingConfig& cfg, const SimSettings& s) {
    const RingState start = fixed_point(cfg.density(), cfg.n_vehicles, cfg.params);
    return evaluate(run(cfg, start, s.steps, std::nullopt), s);
}

std::vector<BranchPoint> bifurcation_1d(double v_star, std::span<const double> rho_grid,
                                        const ModelParams& base, const SimSettings& s,
                                        DensityAnchor anchor) {
    auto per_rho = parallel_map<std::vector<BranchPoint>>(
        rho_grid.size(), s.jobs, [&](std::size_t idx) {
            const RingConfig cfg = ring_for(rho_grid[idx], v_star, base, anchor);
            const double rho = cfg.density();
            std::vector<BranchPoint> pts;
            auto emit = [&](const ProtocolResult& r) {
                BranchPoint bp{rho,
                               r.flow,
                               r.order.amplitude_A,
                               r.order.mean_velocity_V,
                               cfg.n_vehicles,
                               cfg.circumference,
                               kick_flag(r)};
                pts.push_back(std::move(bp));
            };

            const ProtocolResult kicked = run_kicked(cfg, s);
            std::optional<ProtocolResult> fixed;
            try {
                fixed = run_from_fixed_point(cfg, s);
            } catch (const NumericalError&) {
                // no free-flow equilibrium at this density
            }

            emit(kicked);
            if (fixed && fixed->flow != kicked.flow) {
                emit(*fixed);
            }
            if (!fixed) {
                append_flag(pts.front().flags, "no_fixed_point");
            }
            std::sort(pts.begin(), pts.end(), [](const BranchPoint& a, const BranchPoint& b) {
                return severity(a.branch) < severity(b.branch);
            });
            return pts;
        });

    std::vector<BranchPoint> out;
    for (auto& v : per_rho) {
        out.insert(out.end(), v.begin(), v.end());
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const BranchPoint& a, const BranchPoint& b) { return a.rho < b.rho; });
    return out;
}

SgBoundaries sg_onset(double v_star, std::pair<double, double> rho_bracket,
                      const ModelParams& base, const SimSettings& s, const OnsetOptions& opt) {
    auto [lo, hi] = rho_bracket;
    if (!(lo < hi) || !(opt.scan_step > 0.0) || !(opt.tol > 0.0)) {
        throw InvalidArgument("sg_onset: invalid bracket or options");
    }
    std::vector<double> grid;
    const int n = static_cast<int>(std::ceil((hi - lo) / opt.scan_step - 1e-9));
    for (int k = 0; k <= n; ++k) {
        grid.push_back(std::min(hi, lo + k * opt.scan_step));
    }

    std::atomic<int> sims{0};
    const auto scan = parallel_map<char>(grid.size(), s.jobs, [&](std::size_t i) -> char {
        ++sims;
        return kicked_is_stop_and_go(grid[i], v_star, base, s, DensityAnchor::Generic) ? 1 : 0;
    });

    const auto first = std::find(scan.begin(), scan.end(), 1);
    if (first == scan.end()) {
        throw NotFound("sg_onset: no stop-and-go verdict in the density bracket");
    }
    const auto i1 = static_cast<std::size_t>(first - scan.begin());
    const auto i2 = static_cast<std::size_t>(scan.rend() - std::find(scan.rbegin(), scan.rend(), 1)) - 1;
    if (i1 == 0 || i2 + 1 == grid.size()) {
        throw NotFound("sg_onset: stop-and-go at a bracket end; widen the bracket");
    }

    auto pred_low = [&](double rho) {
        ++sims;
        return kicked_is_stop_and_go(rho, v_star, base, s, DensityAnchor::Low);
    };
    auto pred_high = [&](double rho) {
        ++sims;
        return kicked_is_stop_and_go(rho, v_star, base, s, DensityAnchor::High);
    };
    const auto onset = bisect_predicate(grid[i1 - 1], grid[i1], false, opt.tol, pred_low);
    const auto offset = bisect_predicate(grid[i2], grid[i2 + 1], true, opt.tol, pred_high);

    return SgBoundaries{0.5 * (onset.first + onset.second), 0.5 * (offset.first + offset.second),
                        sims.load()};
}

double sg_onset_below(double v_star, double rho_sg, double rho_floor, const ModelParams& base,
                      const SimSettings& s, const OnsetOptions& opt) {
    auto pred = [&](double rho) {
        return kicked_is_stop_and_go(rho, v_star, base, s, DensityAnchor::Low);
    };
    if (!pred(rho_sg)) {
        throw NotFound("sg_onset_below: starting density does not yield stop-and-go");
    }
    double hi = rho_sg;
    double lo = hi - opt.scan_step;
    while (lo > rho_floor && pred(lo)) {
        hi = lo;
        lo -= opt.scan_step;
    }
    if (lo <= rho_floor) {
        throw NotFound("sg_onset_below: stop-and-go persists down to the density floor");
    }
    const auto b = bisect_predicate(lo, hi, false, opt.tol, pred);
    return 0.5 * (b.first + b.second);
}

CriticalDensity find_rho_ff1(const ModelParams& p, int n_vehicles, double rho_lo, double rho_hi,
                             double rho_step) {
    auto radius = [&](double rho) {
        return spectral_radius(nontrivial_spectrum(n_vehicles, rho, p)).max_modulus;
    };
    double prev = rho_lo;
    if (radius(prev) >= 1.0) {
        throw NoCrossing("find_rho_ff1: already unstable at the lowest density");
    }
    for (double rho = rho_lo + rho_step; rho <= rho_hi + 1e-12; rho += rho_step) {
        double r = 0.0;
        try {
            r = radius(rho);
        } catch (const NumericalError&) {
            break;
        } catch (const InvalidDensity&) {
            break;
        }
        if (r > 1.0) {
            return critical_density(n_vehicles, {n_vehicles / rho, n_vehicles / prev}, p);
        }
        prev = rho;
    }
    throw NoCrossing("find_rho_ff1: free-flow fixed point stays stable over the scanned range");
}

std::vector<double> default_v_star_grid() {
    std::vector<double> g;
    for (double v = 7.0; v < 10.49 - 1e-9; v += 0.25) {
        g.push_back(v);
    }
    g.push_back(10.49);
    return g;
}

std::vector<PhasePoint> phase_2d(std::span<const double> v_star_grid, const ModelParams& base,
                                 const SimSettings& s, const OnsetOptions& opt) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    SimSettings inner = s;
    inner.jobs = 1;
    return parallel_map<PhasePoint>(v_star_grid.size(), s.jobs, [&](std::size_t i) {
        PhasePoint pt{v_star_grid[i], nan, nan, {}};
        ModelParams p = base;
        p.v_star = pt.v_star;
        try {
            pt.rho_ff1 = find_rho_ff1(p).rho_star;
        } catch (const Error& e) {
            append_flag(pt.flags, "ff1_failed");
            return pt;
        }
        // Just above the linear instability the kicked run must go stop-and-go;
        // step upward a little if it does not.
        double start = pt.rho_ff1 + 0.002;
        for (int tries = 0; tries < 4; ++tries) {
            try {
                pt.rho_sg1 = sg_onset_below(pt.v_star, start, 0.02, base, inner, opt);
                break;
            } catch (const NotFound&) {
                start += 0.005;
            }
        }
        if (std::isnan(pt.rho_sg1)) {
            append_flag(pt.flags, "sg1_failed");
        } else if (pt.rho_sg1 > pt.rho_ff1) {
            append_flag(pt.flags, "sg1_above_ff1");
        }
        return pt;
    });
}

std::vector<VsaRecord> vsa_curve(std::span<const double> rho_grid, const ModelParams& base,
                                 const SimSettings& s, const VsaOptions& opt) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    SimSettings inner = s;
    inner.jobs = 1;
    return parallel_map<VsaRecord>(rho_grid.size(), s.jobs, [&](std::size_t i) {
        const auto r = realize_density(rho_grid[i], DensityAnchor::Generic);
        VsaRecord rec;
        rec.rho = r.rho();
        rec.V_with_vsa = rec.V_without_vsa = rec.A_with = rec.A_without = nan;
        auto pred = [&](double v_star) {
            return kicked_is_stop_and_go(rec.rho, v_star, base, inner, DensityAnchor::Generic);
        };
        if (!pred(base.v_star)) {
            rec.v_star_c = base.v_star;
            append_flag(rec.flags, "unrestricted");
            return rec;
        }
        if (pred(opt.v_star_min)) {
            rec.v_star_c = nan;
            append_flag(rec.flags, "untameable");
            return rec;
        }
        const auto b = bisect_predicate(opt.v_star_min, base.v_star, false, opt.tol, pred);
        rec.v_star_c = b.first;
        return rec;
    });
}

std::vector<VsaRecord> vsa_comparison(std::span<const double> rho_grid, const ModelParams& base,
                                      const SimSettings& s, const VsaOptions& opt) {
    auto records = vsa_curve(rho_grid, base, s, opt);
    SimSettings inner = s;
    inner.jobs = 1;
    return parallel_map<VsaRecord>(records.size(), s.jobs, [&](std::size_t i) {
        VsaRecord rec = records[i];
        const RingConfig without = ring_for(rec.rho, base.v_star, base, DensityAnchor::Generic);
        const auto r0 = run_kicked(without, inner);
        rec.A_without = r0.order.amplitude_A;
        rec.V_without_vsa = r0.order.mean_velocity_V;
        rec.flow_without = r0.flow;
        if (std::isnan(rec.v_star_c)) {
            return rec;
        }
        const bool restricted = rec.flags.find("unrestricted") == std::string::npos;
        const double advisory = restricted ? rec.v_star_c - opt.margin : base.v_star;
        const RingConfig with = ring_for(rec.rho, advisory, base, DensityAnchor::Generic);
        const auto r1 = run_kicked_all(with, inner);
        rec.A_with = r1.order.amplitude_A;
        rec.V_with_vsa = r1.order.mean_velocity_V;
        rec.flow_with = r1.flow;
        if (r1.overlap || r0.overlap) {
            append_flag(rec.flags, "overlap");
        }
        return rec;
    });
}

}  // namespace adseek
