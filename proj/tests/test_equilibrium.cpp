#include <doctest.h>

#include <cmath>

#include "adseek/equilibrium.hpp"
#include "adseek/errors.hpp"
#include "adseek/ring.hpp"

using namespace adseek;

TEST_SUITE("equilibrium") {

TEST_CASE("sparse traffic runs just below the ideal speed") {
    ModelParams p;
    const auto eq = equilibrium_velocity(0.01, p);
    CHECK(eq.v0 < p.v_star);
    CHECK(eq.v0 > p.v_star - 0.2);
    CHECK(std::abs(stationary_control(0.01, eq.v0, p)) <= 1e-8);
}

TEST_CASE("reference density") {
    ModelParams p;
    const double rho = 28.0 / 314.0;
    const auto eq = equilibrium_velocity(rho, p);
    CHECK(eq.v0 < equilibrium_velocity(0.01, p).v0);
    CHECK(eq.v0 == doctest::Approx(8.066).epsilon(1e-3));
    CHECK(eq.residual <= 1e-8);
    CHECK(eq.density == rho);
}

TEST_CASE("stationary control is invariant under a common shift") {
    ModelParams p;
    auto view = equilibrium_view(0.09, 8.0);
    const double u0 = control(view, p);
    view.ego.x += 77.7;
    view.leader.x += 77.7;
    CHECK(std::abs(control(view, p) - u0) <= 1e-12);
}

TEST_CASE("densities where vehicles cannot fit are rejected") {
    ModelParams p;
    CHECK_THROWS_AS(equilibrium_velocity(1.0 / 3.0, p), InvalidDensity);
    CHECK_THROWS_AS(equilibrium_velocity(0.0, p), InvalidDensity);
}

TEST_CASE("jammed densities have no free-flow solution") {
    ModelParams p;
    CHECK_THROWS_AS(equilibrium_velocity(0.2, p), NoSignChange);
}

TEST_CASE("fixed point geometry") {
    ModelParams p;
    const double rho = 28.0 / 314.0;
    const auto s = fixed_point(rho, 28, p);
    RingConfig cfg{28, 314.0, p};
    double sum = 0.0;
    for (std::size_t i = 0; i < 28; ++i) {
        const double g = gap_to_leader(s, cfg, i);
        CHECK(g == doctest::Approx(314.0 / 28));
        sum += g;
    }
    CHECK(sum == doctest::Approx(314.0));
    for (const auto& v : s.vehicles) {
        CHECK(v.a == 0.0);
        CHECK(v.prev_control == 0.0);
    }
}

TEST_CASE("equilibrium curve over the free-flow range") {
    ModelParams p;
    std::vector<double> grid;
    for (int i = 0; i < 50; ++i) {
        grid.push_back(0.05 + 0.12 * i / 49);
    }
    const auto rows = equilibrium_curve(grid, p);
    REQUIRE(rows.size() == 50);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        REQUIRE(rows[i].ok());
        CHECK(std::abs(stationary_control(rows[i].rho, rows[i].v0, p)) <= 1e-8);
        CHECK(rows[i].v0 < p.v_star);
        if (i > 0) {
            CHECK(rows[i].v0 <= rows[i - 1].v0);
        }
    }
    // flow has a single interior maximum
    int turns = 0;
    for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
        const double q0 = rows[i - 1].rho * rows[i - 1].v0;
        const double q1 = rows[i].rho * rows[i].v0;
        const double q2 = rows[i + 1].rho * rows[i + 1].v0;
        if (q1 > q0 && q1 > q2) {
            ++turns;
        }
    }
    CHECK(turns == 1);
}

TEST_CASE("curve rows past the jam are flagged, not fatal") {
    ModelParams p;
    const std::vector<double> grid{0.05, 0.19, 0.3};
    const auto rows = equilibrium_curve(grid, p);
    CHECK(rows[0].ok());
    CHECK(rows[1].flags == "no_sign_change");
    CHECK(rows[2].flags == "invalid_density");
    CHECK(std::isnan(rows[1].v0));
}

TEST_CASE("single point curve reduces to the solver") {
    ModelParams p;
    const std::vector<double> grid{0.1};
    CHECK(equilibrium_curve(grid, p)[0].v0 == equilibrium_velocity(0.1, p).v0);
}

}  // TEST_SUITE
