#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qpat/kernel.hpp"
#include "qpat/oracle.hpp"

using namespace qpat;

TEST_CASE("Monte-Carlo spheroid integrals")
{
    Spheroid sph{{0, 0, 0}, {1, 0.5, 0}, 2.0};
    OracleConfig cfg;
    cfg.sample_count = 200000;

    auto zero = mc_spheroid_integral([](Vec3 const&) { return 0.0; }, sph, cfg);
    CHECK(zero.estimate == 0);
    CHECK(zero.std_error == 0);

    auto one = mc_spheroid_integral([](Vec3 const&) { return 1.0; }, sph, cfg);
    CHECK(std::fabs(one.estimate - sph.volume()) <= 3 * one.std_error);

    auto again = mc_spheroid_integral([](Vec3 const&) { return 1.0; }, sph, cfg);
    CHECK(again.estimate == one.estimate);
}

TEST_CASE("Monte-Carlo alpha term matches quadrature")
{
    Scene s = Scene::default_scene();
    Vec3 x{0, 3, 0};
    Vec3 y{0.2, 0.1, 0.0};
    double t = distance(x, y) + 1;
    OracleConfig cfg;
    cfg.sample_count = 1000000;
    auto mc = mc_kernel_alpha_term(s, t, x, y, cfg);
    double quad = kernel_eval(s, t, x, y).alpha_term;
    CHECK(std::fabs(mc.estimate - quad) <= 3 * mc.std_error);
    CHECK(mc.std_error < 0.02 * std::fabs(quad));
}

TEST_CASE("direct spheroid integral")
{
    Vec3 x{0, 0, 0};
    Vec3 y{1.2, 0, 0};
    AnalyticField wide({Bump{{0.6, 0, 0}, 200.0, 1.0}});
    OracleConfig cfg;
    cfg.grid_resolution = 64;
    CHECK(f_direct(wide, x, y, 1.2, cfg) == 0);
    double delta = 1e-3;
    double slope = f_direct(wide, x, y, 1.2 + delta, cfg) / delta;
    CHECK(slope == doctest::Approx(2 * std::numbers::pi).epsilon(2e-3));
}

TEST_CASE("Richardson tableau")
{
    std::vector<double> h{0.08, 0.04, 0.02};
    std::vector<double> v;
    for (double s : h)
    {
        v.push_back(3 + 2 * s - 5 * s * s);
    }
    CHECK(richardson(h, v, 1) == doctest::Approx(3).epsilon(1e-13));
    std::vector<double> rev(v.rbegin(), v.rend());
    std::vector<double> hrev(h.rbegin(), h.rend());
    CHECK(richardson(hrev, rev, 1) == doctest::Approx(3).epsilon(1e-13));
    CHECK_THROWS_AS(richardson({0.1, 0.03}, {1, 2}, 1), PreconditionError);
}

TEST_CASE("adaptive quadrature")
{
    CHECK(adaptive_integrate([](double s) { return std::sin(s); }, 0, std::numbers::pi)
          == doctest::Approx(2).epsilon(1e-12));
    AnalyticField f({Bump{{0, 0, 0}, 1.0, 1.0}});
    double through = adaptive_line_integral(f, Segment{{-2, 0, 0}, {2, 0, 0}});
    double half = adaptive_integrate([&](double s) { return f.value({s, 0, 0}); }, 0, 1);
    CHECK(through == doctest::Approx(2 * half).epsilon(1e-12));
}
