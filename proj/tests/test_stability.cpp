#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "adseek/errors.hpp"
#include "adseek/polynomial.hpp"
#include "adseek/stability.hpp"

using namespace adseek;

namespace {

double max_filtered(const std::vector<ModeSpectrum>& s) {
    return spectral_radius(s).max_modulus;
}

std::size_t filtered_count(const std::vector<ModeSpectrum>& s) {
    std::size_t n = 0;
    for (const auto& m : s) {
        n += m.filtered_roots.size();
    }
    return n;
}

}  // namespace

TEST_SUITE("polynomial") {

TEST_CASE("roots of a real cubic") {
    // (z - 1)(z - 2)(z + 3) = z^3 - 7z + 6
    const std::vector<cplx> c{6.0, -7.0, 0.0, 1.0};
    auto r = poly_roots(c);
    REQUIRE(r.size() == 3);
    std::sort(r.begin(), r.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
    CHECK(r[0].real() == doctest::Approx(-3.0));
    CHECK(r[1].real() == doctest::Approx(1.0));
    CHECK(r[2].real() == doctest::Approx(2.0));
}

TEST_CASE("roots of complex polynomials have small residuals") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<cplx> c;
        for (int j = 0; j < 4; ++j) {
            c.emplace_back(nd(rng), nd(rng));
        }
        c.back() = 1.0;
        for (const auto& z : poly_roots(c)) {
            CHECK(std::abs(poly_eval(c, z)) < 1e-10);
        }
    }
}

TEST_CASE("repeated root at zero") {
    const std::vector<cplx> c{0.0, 0.0, -0.5, 1.0};
    const auto r = poly_roots(c);
    int zeros = 0;
    for (const auto& z : r) {
        zeros += std::abs(z) < 1e-12 ? 1 : 0;
    }
    CHECK(zeros == 2);
}

}  // TEST_SUITE

TEST_SUITE("stability") {

TEST_CASE("slope identities at several densities") {
    ModelParams p;
    for (double rho : {0.06, 0.08, 28.0 / 314.0, 0.11, 0.134}) {
        const auto b = slope_vectors(rho, p);
        CHECK(b.antisymmetry_error() <= 1e-6);
        CHECK(b.identity_error(0) < 0.01);
        CHECK(b.identity_error(1) < 0.01);
        CHECK(std::abs(b.ego.beta_x + b.leader.beta_x) <= 1e-6 * std::abs(b.leader.beta_x));
    }
}

TEST_CASE("slope signs at the reference density") {
    const auto b = slope_vectors(28.0 / 314.0, ModelParams{});
    CHECK(b.ego.beta_v < 0.0);
    CHECK(b.leader.beta_x > 0.0);
}

TEST_CASE("slopes are consistent under step halving") {
    ModelParams p;
    const auto eq = equilibrium_velocity(0.1, p);
    const auto h = slope_vectors(eq, p, 1e-3);
    const auto h2 = slope_vectors(eq, p, 5e-4);
    auto close = [](double a, double b) { return std::abs(a - b) <= 0.05 * std::abs(b) + 1e-12; };
    CHECK(close(h.ego.beta_x, h2.ego.beta_x));
    CHECK(close(h.ego.beta_v, h2.ego.beta_v));
    CHECK(close(h.ego.beta_a, h2.ego.beta_a));
    CHECK(close(h.leader.beta_x, h2.leader.beta_x));
    CHECK(close(h.leader.beta_v, h2.leader.beta_v));
}

TEST_CASE("expanded cubic matches the bracket form") {
    const auto b = slope_vectors(0.1, ModelParams{});
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ud(-2.0, 2.0);
    for (int k : {0, 1, 7, 20}) {
        const auto poly = mode_polynomial(k, 28, b, ModelParams{}.dt);
        REQUIRE(poly.coeffs.size() == 4);
        CHECK(poly.coeffs[3] == cplx(1.0));
        for (int i = 0; i < 20; ++i) {
            const cplx z(ud(rng), ud(rng));
            CHECK(std::abs(poly_eval(poly.coeffs, z) - poly.bracket(z)) < 1e-12);
        }
    }
}

TEST_CASE("trivial roots") {
    ModelParams p;
    const auto b = slope_vectors(28.0 / 314.0, p);
    const auto m0 = mode_roots(mode_polynomial(0, 28, b, p.dt));
    CHECK(m0.filtered_roots.size() == 1);
    bool has_one = false;
    for (const auto& z : m0.roots) {
        has_one = has_one || std::abs(z - 1.0) < 1e-6;
    }
    CHECK(has_one);
    for (int k = 1; k < 28; ++k) {
        const auto m = mode_roots(mode_polynomial(k, 28, b, p.dt));
        CHECK(m.filtered_roots.size() == 2);
        for (const auto& z : m.roots) {
            CHECK(std::abs(z - 1.0) > 1e-6);
            CHECK(std::abs(z - p.gamma) > 1e-3);
        }
        for (double r : m.residuals) {
            CHECK(r < 1e-10);
        }
    }
}

TEST_CASE("root structure") {
    ModelParams p;
    for (int n : {20, 28, 42}) {
        const auto s = nontrivial_spectrum(n, n / 314.0, p);
        REQUIRE(s.size() == static_cast<std::size_t>(n));
        CHECK(filtered_count(s) == static_cast<std::size_t>(2 * n - 1));
        for (int k = 1; k < n; ++k) {
            const auto& a = s[k].filtered_roots;
            const auto& b = s[n - k].filtered_roots;
            for (const auto& z : a) {
                double best = 1e9;
                for (const auto& w : b) {
                    best = std::min(best, std::abs(std::conj(z) - w));
                }
                CHECK(best < 1e-9);
            }
        }
        for (const auto& m : s) {
            for (double r : m.residuals) {
                CHECK(r < 1e-8);
            }
        }
    }
}

TEST_CASE("root clouds at C=314") {
    ModelParams p;
    CHECK(max_filtered(nontrivial_spectrum(26, 26 / 314.0, p)) < 1.0);

    const auto s28 = nontrivial_spectrum(28, 28 / 314.0, p);
    const auto r28 = spectral_radius(s28);
    CHECK(std::abs(r28.max_modulus - 1.0) < 0.01);
    const int k = r28.arg_mode;
    CHECK(std::min(k, 28 - k) <= 2);
    for (const auto& z : s28[k].filtered_roots) {
        if (std::abs(std::abs(z) - r28.max_modulus) < 1e-9) {
            CHECK(std::abs(z.imag()) > 0.01);
        }
    }

    int outside = 0;
    for (const auto& m : nontrivial_spectrum(30, 30 / 314.0, p)) {
        for (const auto& z : m.filtered_roots) {
            outside += std::abs(z) > 1.0 && std::abs(z.imag()) > 1e-9 ? 1 : 0;
        }
    }
    CHECK(outside >= 4);
}

TEST_CASE("spectral radius of a hand-made spectrum") {
    ModeSpectrum m;
    m.mode_k = 3;
    m.filtered_roots = {cplx(0.5, 0.0), cplx(0.0, 0.5)};
    const auto r = spectral_radius({m});
    CHECK(r.max_modulus == doctest::Approx(0.5));
    CHECK(r.arg_mode == 3);
}

TEST_CASE("critical densities") {
    ModelParams p;
    const auto ff1 = critical_density(28, {300.0, 330.0}, p);
    CHECK(ff1.rho_star == doctest::Approx(0.090).epsilon(0.003 / 0.090));
    CHECK(ff1.direction == CrossingDirection::Outward);
    CHECK(std::abs(ff1.max_modulus - 1.0) < 1e-3);
    for (int k : ff1.crossing_modes) {
        CHECK(std::min(k, 28 - k) <= 2);
    }

    const auto ff2 = critical_density(42, {300.0, 330.0}, p);
    CHECK(ff2.rho_star == doctest::Approx(0.134).epsilon(0.003 / 0.134));
    CHECK(ff2.direction == CrossingDirection::Inward);

    CHECK_THROWS_AS(critical_density(26, {314.0, 330.0}, p), NoCrossing);
}

TEST_CASE("linearized oracle agrees with the roots") {
    ModelParams p;
    for (int n : {26, 28, 30}) {
        const double rho = n / 314.0;
        const double radius = max_filtered(nontrivial_spectrum(n, rho, p));
        const double growth = linearized_oracle(n, rho, p, 5000);
        CHECK(std::abs(growth - radius) / radius < 0.02);
    }
    CHECK(linearized_oracle(30, 30 / 314.0, p, 5000) > 1.0);
}

TEST_CASE("zero perturbation stays zero") {
    ModelParams p;
    const auto b = slope_vectors(0.09, p);
    Perturbation zero{std::vector<double>(10, 0.0), std::vector<double>(10, 0.0),
                      std::vector<double>(10, 0.0)};
    const auto out = linearized_evolve(b, p.gamma, p.dt, zero, 100);
    for (std::size_t i = 0; i < 10; ++i) {
        CHECK(out.phi[i] == 0.0);
        CHECK(out.psi[i] == 0.0);
        CHECK(out.theta[i] == 0.0);
    }
}

}  // TEST_SUITE
