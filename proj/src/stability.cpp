#include "adseek/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "adseek/errors.hpp"

namespace adseek {

namespace {

// Which of the six observed state components to perturb.
enum class Component { EgoX, EgoV, EgoA, LeadX, LeadV, LeadA };

DriverView shifted(DriverView view, Component c, double h) {
    switch (c) {
        case Component::EgoX:
            view.ego.x += h;
            view.gap -= h;
            break;
        case Component::EgoV:
            view.ego.v += h;
            break;
        case Component::EgoA:
            view.ego.a += h;
            break;
        case Component::LeadX:
            view.leader.x += h;
            view.gap += h;
            break;
        case Component::LeadV:
            view.leader.v += h;
            break;
        case Component::LeadA:
            view.leader.a += h;
            break;
    }
    return view;
}

double central(const DriverView& base, Component c, double h, const ModelParams& p,
               const std::vector<double>& grid) {
    return (control(shifted(base, c, h), p, grid) - control(shifted(base, c, -h), p, grid)) /
           (2.0 * h);
}

double relative(double err, double scale) {
    return scale == 0.0 ? std::abs(err) : std::abs(err) / std::abs(scale);
}

}  // namespace

double SlopePair::identity_error(int l) const {
    const SlopeVector& b = l == 0 ? ego : leader;
    const double lhs = b.beta_v - b.beta_a / dt;
    const double rhs = dt * b.beta_x;
    return relative(lhs - rhs, std::max(std::abs(lhs), std::abs(rhs)));
}

double SlopePair::antisymmetry_error() const {
    return relative(ego.beta_x + leader.beta_x, leader.beta_x);
}

SlopePair slope_vectors_central(const EquilibriumPoint& eq, const ModelParams& p,
                                double fd_step) {
    const auto grid = p.action_grid();
    const DriverView base = equilibrium_view(eq.density, eq.v0);
    SlopePair out;
    out.equilibrium = eq;
    out.dt = p.dt;
    out.ego = {central(base, Component::EgoX, fd_step, p, grid),
               central(base, Component::EgoV, fd_step, p, grid),
               central(base, Component::EgoA, fd_step, p, grid)};
    out.leader = {central(base, Component::LeadX, fd_step, p, grid),
                  central(base, Component::LeadV, fd_step, p, grid),
                  central(base, Component::LeadA, fd_step, p, grid)};
    return out;
}

SlopePair slope_vectors(const EquilibriumPoint& eq, const ModelParams& p, double fd_step) {
    if (!(fd_step > 0.0)) {
        throw InvalidArgument("slope_vectors: fd_step must be positive");
    }
    // The closing-speed term max(v_ego + u dt - v_lead, 0) has its kink exactly
    // at the fixed point for the u = 0 action, so the central difference error
    // carries odd powers of h as well. Three-level extrapolation removes the h
    // and h^2 terms: (8 D(h/4) - 6 D(h/2) + D(h)) / 3.
    const SlopePair d1 = slope_vectors_central(eq, p, fd_step);
    const SlopePair d2 = slope_vectors_central(eq, p, 0.5 * fd_step);
    const SlopePair d4 = slope_vectors_central(eq, p, 0.25 * fd_step);
    auto extrapolate = [](double a, double b, double c) { return (8.0 * c - 6.0 * b + a) / 3.0; };
    auto combine = [&](const SlopeVector& a, const SlopeVector& b, const SlopeVector& c) {
        return SlopeVector{extrapolate(a.beta_x, b.beta_x, c.beta_x),
                           extrapolate(a.beta_v, b.beta_v, c.beta_v),
                           extrapolate(a.beta_a, b.beta_a, c.beta_a)};
    };
    SlopePair out = d1;
    out.ego = combine(d1.ego, d2.ego, d4.ego);
    out.leader = combine(d1.leader, d2.leader, d4.leader);
    return out;
}

SlopePair slope_vectors(double rho, const ModelParams& p, double fd_step) {
    return slope_vectors(equilibrium_velocity(rho, p), p, fd_step);
}

cplx ModePolynomial::bracket(cplx z) const {
    const cplx one_minus = 1.0 - z;
    return one_minus * (one_minus * (z - b_a) + dt * b_v) - dt * dt * b_x;
}

ModePolynomial mode_polynomial(int k, int n_vehicles, const SlopePair& betas, double dt) {
    if (n_vehicles < 1 || k < 0 || k >= n_vehicles) {
        throw InvalidArgument("mode_polynomial: mode index out of range");
    }
    const cplx alpha = std::polar(1.0, 2.0 * std::numbers::pi * k / n_vehicles);
    ModePolynomial poly;
    poly.mode_k = k;
    poly.n_vehicles = n_vehicles;
    poly.dt = dt;
    poly.b_x = betas.ego.beta_x + alpha * betas.leader.beta_x;
    poly.b_v = betas.ego.beta_v + alpha * betas.leader.beta_v;
    poly.b_a = betas.ego.beta_a + alpha * betas.leader.beta_a;
    // (1-z)^2 (z - Ba) + dt Bv (1 - z) - dt^2 Bx
    //   = z^3 - (2 + Ba) z^2 + (1 + 2 Ba - dt Bv) z + (dt Bv - Ba - dt^2 Bx)
    poly.coeffs = {dt * poly.b_v - poly.b_a - dt * dt * poly.b_x,
                   1.0 + 2.0 * poly.b_a - dt * poly.b_v, -(2.0 + poly.b_a), 1.0};
    return poly;
}

ModeSpectrum mode_roots(const ModePolynomial& poly, const RootOptions& opt) {
    ModeSpectrum out;
    out.mode_k = poly.mode_k;
    out.roots = poly_roots(poly.coeffs);
    out.residuals.reserve(out.roots.size());
    for (const auto& z : out.roots) {
        const double r = std::abs(poly.bracket(z));
        if (!(r < opt.residual_tol)) {
            std::ostringstream msg;
            msg << "mode_roots: root " << z << " of mode " << poly.mode_k
                << " fails the residual certificate (" << r << ")";
            throw NumericalError(msg.str());
        }
        out.residuals.push_back(r);
    }

    out.is_filtered.assign(out.roots.size(), true);
    auto nearest = [&](cplx target) {
        int best = -1;
        for (std::size_t i = 0; i < out.roots.size(); ++i) {
            if (!out.is_filtered[i]) {
                continue;
            }
            if (best < 0 || std::abs(out.roots[i] - target) <
                                std::abs(out.roots[static_cast<std::size_t>(best)] - target)) {
                best = static_cast<int>(i);
            }
        }
        return best;
    };

    const int zero_idx = nearest(0.0);
    if (zero_idx < 0 || std::abs(out.roots[static_cast<std::size_t>(zero_idx)]) >= opt.zero_tol) {
        std::ostringstream msg;
        msg << "mode_roots: no root within " << opt.zero_tol << " of 0 for mode " << poly.mode_k;
        throw DegenerateFilter(msg.str());
    }
    out.is_filtered[static_cast<std::size_t>(zero_idx)] = false;
    if (poly.mode_k == 0) {
        out.is_filtered[static_cast<std::size_t>(nearest(1.0))] = false;
    }
    for (std::size_t i = 0; i < out.roots.size(); ++i) {
        if (out.is_filtered[i]) {
            out.filtered_roots.push_back(out.roots[i]);
        }
    }
    return out;
}

std::vector<ModeSpectrum> nontrivial_spectrum(int n_vehicles, const SlopePair& betas, double dt,
                                              const RootOptions& opt) {
    if (n_vehicles < 2) {
        throw InvalidArgument("nontrivial_spectrum: need at least 2 vehicles");
    }
    std::vector<ModeSpectrum> out;
    out.reserve(static_cast<std::size_t>(n_vehicles));
    for (int k = 0; k < n_vehicles; ++k) {
        out.push_back(mode_roots(mode_polynomial(k, n_vehicles, betas, dt), opt));
    }
    return out;
}

std::vector<ModeSpectrum> nontrivial_spectrum(int n_vehicles, double rho, const ModelParams& p,
                                              const RootOptions& opt) {
    return nontrivial_spectrum(n_vehicles, slope_vectors(rho, p), p.dt, opt);
}

SpectralRadius spectral_radius(const std::vector<ModeSpectrum>& spectra) {
    SpectralRadius out;
    for (const auto& s : spectra) {
        for (const auto& z : s.filtered_roots) {
            if (out.arg_mode < 0 || std::abs(z) > out.max_modulus) {
                out.max_modulus = std::abs(z);
                out.arg_mode = s.mode_k;
            }
        }
    }
    if (out.arg_mode < 0) {
        throw InvalidArgument("spectral_radius: no filtered roots");
    }
    return out;
}

std::set<int> extremal_modes(const std::vector<ModeSpectrum>& spectra, double rel_tol) {
    const double top = spectral_radius(spectra).max_modulus;
    std::set<int> modes;
    for (const auto& s : spectra) {
        for (const auto& z : s.filtered_roots) {
            if (std::abs(z) >= top * (1.0 - rel_tol)) {
                modes.insert(s.mode_k);
            }
        }
    }
    return modes;
}

std::string to_string(CrossingDirection d) {
    return d == CrossingDirection::Outward ? "outward" : "inward";
}

CriticalDensity critical_density(int n_vehicles, std::pair<double, double> c_bracket,
                                 const ModelParams& p, const CriticalOptions& opt) {
    auto [c_lo, c_hi] = c_bracket;
    if (c_lo > c_hi) {
        std::swap(c_lo, c_hi);
    }
    auto excess = [&](double c) {
        const auto spectra = nontrivial_spectrum(n_vehicles, n_vehicles / c, p);
        return spectral_radius(spectra).max_modulus - 1.0;
    };
    double f_lo = excess(c_lo);
    const double f_hi = excess(c_hi);
    if ((f_lo < 0.0) == (f_hi < 0.0)) {
        std::ostringstream msg;
        msg << "critical_density: max|z| - 1 does not change sign on C in [" << c_lo << ", "
            << c_hi << "] (" << f_lo << ", " << f_hi << ")";
        throw NoCrossing(msg.str());
    }

    CriticalDensity out;
    out.n_vehicles = n_vehicles;
    out.v_star = p.v_star;
    // small C means high density
    out.direction = f_lo > f_hi ? CrossingDirection::Outward : CrossingDirection::Inward;

    double mid = 0.5 * (c_lo + c_hi);
    double f_mid = excess(mid);
    int iter = 0;
    while (iter < opt.max_iterations && std::abs(f_mid) >= opt.modulus_tol &&
           c_hi - c_lo >= opt.width_tol) {
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            c_lo = mid;
            f_lo = f_mid;
        } else {
            c_hi = mid;
        }
        mid = 0.5 * (c_lo + c_hi);
        f_mid = excess(mid);
        ++iter;
    }

    const auto spectra = nontrivial_spectrum(n_vehicles, n_vehicles / mid, p);
    out.c_star = mid;
    out.rho_star = n_vehicles / mid;
    out.max_modulus = spectral_radius(spectra).max_modulus;
    out.crossing_modes = extremal_modes(spectra);
    out.bracket = {c_lo, c_hi};
    out.iterations = iter;
    return out;
}

namespace {

// One step of the linearized real-space map. The delayed control term needs
// the previous step's drive, which the stepper carries.
class LinearStepper {
public:
    LinearStepper(const SlopePair& betas, double gamma, double dt, std::size_t n)
        : b_{betas.ego, betas.leader}, gamma_(gamma), dt_(dt), prev_(n, 0.0), cur_(n) {}

    void advance(Perturbation& state, Perturbation& scratch) {
        const std::size_t n = state.phi.size();
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t l = 0; l < 2; ++l) {
                const std::size_t j = (i + l) % n;
                acc += b_[l].beta_x * state.phi[j] + b_[l].beta_v * state.psi[j] +
                       b_[l].beta_a * state.theta[j];
            }
            cur_[i] = acc;
        }
        for (std::size_t i = 0; i < n; ++i) {
            scratch.phi[i] = state.phi[i] + state.psi[i] * dt_;
            scratch.psi[i] = state.psi[i] + state.theta[i] * dt_;
            scratch.theta[i] = gamma_ * state.theta[i] + cur_[i] - gamma_ * prev_[i];
        }
        std::swap(state, scratch);
        std::swap(prev_, cur_);
    }

    void rescale(Perturbation& state, double s) {
        for (std::size_t i = 0; i < state.phi.size(); ++i) {
            state.phi[i] *= s;
            state.psi[i] *= s;
            state.theta[i] *= s;
            prev_[i] *= s;
        }
    }

private:
    SlopeVector b_[2];
    double gamma_;
    double dt_;
    std::vector<double> prev_, cur_;
};

// Norm with the uniform position shift removed.
double shift_free_norm(const Perturbation& s) {
    const std::size_t n = s.phi.size();
    double mean = 0.0;
    for (double x : s.phi) {
        mean += x;
    }
    mean /= static_cast<double>(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += (s.phi[i] - mean) * (s.phi[i] - mean) + s.psi[i] * s.psi[i] +
               s.theta[i] * s.theta[i];
    }
    return std::sqrt(acc);
}

}  // namespace

Perturbation linearized_evolve(const SlopePair& betas, double gamma, double dt,
                               const Perturbation& initial, int steps) {
    const std::size_t n = initial.phi.size();
    if (initial.psi.size() != n || initial.theta.size() != n || n < 2) {
        throw InvalidArgument("linearized_evolve: inconsistent perturbation sizes");
    }
    LinearStepper stepper(betas, gamma, dt, n);
    Perturbation cur = initial;
    Perturbation scratch = initial;
    for (int t = 0; t < steps; ++t) {
        stepper.advance(cur, scratch);
    }
    return cur;
}

double linearized_oracle(int n_vehicles, const SlopePair& betas, double gamma, double dt,
                         int steps, const OracleOptions& opt) {
    if (n_vehicles < 2 || steps < 2) {
        throw InvalidArgument("linearized_oracle: need n_vehicles >= 2 and steps >= 2");
    }
    const auto n = static_cast<std::size_t>(n_vehicles);
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> dist(-opt.amplitude, opt.amplitude);
    Perturbation cur{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        cur.phi[i] = dist(rng);
        cur.psi[i] = dist(rng);
        cur.theta[i] = dist(rng);
    }

    LinearStepper stepper(betas, gamma, dt, n);
    Perturbation scratch = cur;
    const int half = steps / 2;
    double log_scale = 0.0;
    double log_norm_mid = 0.0;
    for (int t = 0; t < steps; ++t) {
        if (t == half) {
            const double nm = shift_free_norm(cur);
            if (nm == 0.0) {
                return 0.0;
            }
            log_norm_mid = std::log(nm) + log_scale;
        }
        stepper.advance(cur, scratch);
        const double nm = shift_free_norm(cur);
        if (nm > 1e100 || (nm < 1e-100 && nm > 0.0)) {
            stepper.rescale(cur, 1.0 / nm);
            log_scale += std::log(nm);
        }
    }
    const double nm_end = shift_free_norm(cur);
    if (nm_end == 0.0) {
        return 0.0;
    }
    const double log_norm_end = std::log(nm_end) + log_scale;
    return std::exp((log_norm_end - log_norm_mid) / static_cast<double>(steps - half));
}

double linearized_oracle(int n_vehicles, double rho, const ModelParams& p, int steps,
                         const OracleOptions& opt) {
    return linearized_oracle(n_vehicles, slope_vectors(rho, p), p.gamma, p.dt, steps, opt);
}

}  // namespace adseek
