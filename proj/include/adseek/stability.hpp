#pragma once

// Linear stability of the free-flow fixed point. The map is linearized around
// the fixed point, decoupled into Fourier modes along the vehicle index, and
// each mode's z-domain characteristic polynomial
//
//   (gamma - z) [ (1 - z)((1 - z)(z - B_a) + dt B_v) - dt^2 B_x ] = 0,
//   B = beta_ego + exp(i 2 pi k / N) beta_leader,
//
// is solved for its roots. The factor (gamma - z) is dropped; of the cubic's
// three roots, one sits at z = 0 for every mode and one at z = 1 for k = 0.

#include <complex>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "adseek/equilibrium.hpp"
#include "adseek/model.hpp"
#include "adseek/polynomial.hpp"

namespace adseek {

/// Partial derivatives of the control input with respect to one vehicle's
/// (x, v, a) at the fixed point.
struct SlopeVector {
    double beta_x = 0.0;  // [1/s^2]
    double beta_v = 0.0;  // [1/s]
    double beta_a = 0.0;  // [-]
};

struct SlopePair {
    SlopeVector ego;     // l = 0
    SlopeVector leader;  // l = 1
    EquilibriumPoint equilibrium;
    double dt = 0.0;

    /// Relative violation of beta_v - beta_a/dt = dt beta_x for l = 0 or 1.
    double identity_error(int l) const;
    /// |beta0_x + beta1_x| / |beta1_x|.
    double antisymmetry_error() const;
};

/// Slopes at the given equilibrium: central differences at fd_step, fd_step/2
/// and fd_step/4, Richardson-extrapolated.
SlopePair slope_vectors(const EquilibriumPoint& eq, const ModelParams& p, double fd_step = 1e-3);

/// Solves the equilibrium first.
SlopePair slope_vectors(double rho, const ModelParams& p, double fd_step = 1e-3);

/// Plain central differences at one step size (no extrapolation).
SlopePair slope_vectors_central(const EquilibriumPoint& eq, const ModelParams& p,
                                double fd_step);

struct ModePolynomial {
    int mode_k = 0;
    int n_vehicles = 0;
    double dt = 0.0;
    cplx b_x, b_v, b_a;
    /// Monic cubic, ascending: c[0] + c[1] z + c[2] z^2 + z^3.
    std::vector<cplx> coeffs;

    /// The unexpanded bracket evaluated at z.
    cplx bracket(cplx z) const;
};

ModePolynomial mode_polynomial(int k, int n_vehicles, const SlopePair& betas, double dt);

struct ModeSpectrum {
    int mode_k = 0;
    std::vector<cplx> roots;           // all three cubic roots
    std::vector<double> residuals;     // |bracket(root)|
    std::vector<cplx> filtered_roots;  // non-trivial roots
    std::vector<bool> is_filtered;     // per entry of `roots`: true if kept as non-trivial
};

struct RootOptions {
    double zero_tol = 1e-6;
    double residual_tol = 1e-8;
};

/// Throws DegenerateFilter if no root lies within zero_tol of 0, and
/// NumericalError if a root fails the residual certificate.
ModeSpectrum mode_roots(const ModePolynomial& poly, const RootOptions& opt = {});

std::vector<ModeSpectrum> nontrivial_spectrum(int n_vehicles, const SlopePair& betas, double dt,
                                              const RootOptions& opt = {});

std::vector<ModeSpectrum> nontrivial_spectrum(int n_vehicles, double rho, const ModelParams& p,
                                              const RootOptions& opt = {});

struct SpectralRadius {
    double max_modulus = 0.0;
    int arg_mode = -1;
};

/// Largest |z| over all filtered roots; throws InvalidArgument if there are none.
SpectralRadius spectral_radius(const std::vector<ModeSpectrum>& spectra);

/// Modes whose largest filtered modulus is within rel_tol of the maximum.
std::set<int> extremal_modes(const std::vector<ModeSpectrum>& spectra, double rel_tol = 1e-7);

enum class CrossingDirection { Outward, Inward };

std::string to_string(CrossingDirection d);

struct CriticalDensity {
    double rho_star = 0.0;     // [1/m]
    double c_star = 0.0;       // [m]
    double v_star = 0.0;       // [m/s]
    int n_vehicles = 0;
    double max_modulus = 0.0;  // at c_star
    std::set<int> crossing_modes;
    CrossingDirection direction = CrossingDirection::Outward;
    std::pair<double, double> bracket;  // final C bracket
    int iterations = 0;
};

struct CriticalOptions {
    double modulus_tol = 1e-4;
    double width_tol = 1e-3;  // [m]
    int max_iterations = 100;
};

/// Bisection on the circumference at fixed N for max|z| = 1. Throws
/// NoCrossing if max|z| - 1 has the same sign at both ends of the bracket.
CriticalDensity critical_density(int n_vehicles, std::pair<double, double> c_bracket,
                                 const ModelParams& p, const CriticalOptions& opt = {});

struct OracleOptions {
    std::uint64_t seed = 1;
    double amplitude = 1e-6;
};

/// Empirical per-step growth factor of the linearized real-space map over the
/// last half of `steps`, started from a random perturbation. The uniform
/// position shift (translation mode) is excluded from the measured norm.
double linearized_oracle(int n_vehicles, const SlopePair& betas, double gamma, double dt,
                         int steps, const OracleOptions& opt = {});

double linearized_oracle(int n_vehicles, double rho, const ModelParams& p, int steps,
                         const OracleOptions& opt = {});

/// Runs the linearized map from an explicit initial perturbation (phi, psi,
/// theta per vehicle; the previous step is taken as unperturbed) and returns
/// the final (phi, psi, theta).
struct Perturbation {
    std::vector<double> phi, psi, theta;
};
Perturbation linearized_evolve(const SlopePair& betas, double gamma, double dt,
                               const Perturbation& initial, int steps);

}  // namespace adseek
