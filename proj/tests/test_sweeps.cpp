#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "adseek/errors.hpp"
#include "adseek/parallel.hpp"
#include "adseek/sweeps.hpp"

using namespace adseek;

TEST_SUITE("sweeps") {

TEST_CASE("density realization") {
    auto r = realize_density(0.1, DensityAnchor::Generic);
    CHECK(r.n_vehicles == 31);
    CHECK(r.rho() == doctest::Approx(0.1));
    CHECK(realize_density(0.01, DensityAnchor::Generic).n_vehicles == 20);
    CHECK(realize_density(0.5, DensityAnchor::Generic).n_vehicles == 50);
    r = realize_density(0.085, DensityAnchor::Low);
    CHECK(r.n_vehicles == 28);
    CHECK(r.circumference == doctest::Approx(28 / 0.085));
    CHECK(realize_density(0.14, DensityAnchor::High).n_vehicles == 42);
    for (double rho : {0.07, 0.0893, 0.1234}) {
        const auto q = realize_density(rho, DensityAnchor::Generic);
        CHECK(q.n_vehicles / q.circumference == q.rho());
    }
    CHECK_THROWS_AS(realize_density(-1.0, DensityAnchor::Low), InvalidDensity);
}

TEST_CASE("parallel map keeps index order and forwards errors") {
    const auto out = parallel_map<int>(100, 4, [](std::size_t i) { return static_cast<int>(i * i); });
    for (std::size_t i = 0; i < out.size(); ++i) {
        CHECK(out[i] == static_cast<int>(i * i));
    }
    CHECK_THROWS_AS(parallel_map<int>(10, 3,
                                      [](std::size_t i) -> int {
                                          if (i == 7) {
                                              throw std::runtime_error("boom");
                                          }
                                          return 0;
                                      }),
                    std::runtime_error);
}

TEST_CASE("default v* grid") {
    const auto g = default_v_star_grid();
    CHECK(g.front() == 7.0);
    CHECK(g.back() == 10.49);
    CHECK(g.size() == 15);
}

TEST_CASE("low density gives a single free-flow branch") {
    SimSettings s;
    s.steps = 6000;
    s.jobs = 1;
    const std::vector<double> grid{0.07};
    const auto pts = bifurcation_1d(10.49, grid, ModelParams{}, s);
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].branch == FlowClass::FreeFlow);
    CHECK(pts[0].n_vehicles == 22);
    CHECK(pts[0].rho == doctest::Approx(0.07));
}

TEST_CASE("kick protocols at v*=9, N=28, C=314") {
    // the standard braking kick relaxes, a full stop of one car does not
    SimSettings s;
    s.steps = 6000;
    s.kick_strengths = {-1.0};
    RingConfig cfg;
    cfg.params.v_star = 9.0;
    auto r = run_kicked_all(cfg, s);
    CHECK(r.flow == FlowClass::FreeFlow);
    CHECK(r.kick == -1.0);

    s.kick_strengths = {-1.0, -2.0};
    r = run_kicked_all(cfg, s);
    CHECK(r.flow == FlowClass::StopAndGo);
    CHECK(r.kick == -2.0);

    r = run_kicked(cfg, s);
    CHECK(r.flow == FlowClass::StopAndGo);
    CHECK(r.kick == -2.0);
}

TEST_CASE("fixed-point start stays on the free-flow branch") {
    SimSettings s;
    s.steps = 3000;
    RingConfig cfg{28, 28 / 0.085, {}};
    const auto r = run_from_fixed_point(cfg, s);
    CHECK(r.flow == FlowClass::FreeFlow);
    CHECK_FALSE(r.kick.has_value());
}

TEST_CASE("first linear instability at N=28") {
    const auto cd = find_rho_ff1(ModelParams{});
    CHECK(cd.rho_star == doctest::Approx(0.090).epsilon(0.03));
    ModelParams slow;
    slow.v_star = 8.0;
    CHECK(find_rho_ff1(slow).rho_star > cd.rho_star);
}

TEST_CASE("invalid onset requests") {
    SimSettings s;
    CHECK_THROWS_AS(sg_onset(10.49, {0.1, 0.05}, ModelParams{}, s), InvalidArgument);
}

}  // TEST_SUITE
