#include <doctest.h>

#include <cmath>
#include <random>

#include "qpat/oracle.hpp"
#include "qpat/phantom.hpp"

using namespace qpat;

namespace
{
AnalyticField two_bumps()
{
    return AnalyticField({Bump{{0.1, -0.2, 0.3}, 0.6, 1.3}, Bump{{-0.4, 0.2, 0.0}, 0.45, -0.7}});
}
}  // namespace

TEST_CASE("bump value at centre, half radius and outside")
{
    AnalyticField f({Bump{{1, 2, 3}, 0.5, 2.0}});
    CHECK(f.value({1, 2, 3}) == doctest::Approx(2.0));
    CHECK(f.value({1.25, 2, 3}) == doctest::Approx(2.0 * std::exp(-1.0 / 3)));
    CHECK(f.value({1.5, 2, 3}) == 0);
    CHECK(f.value({3, 2, 3}) == 0);
    CHECK(f.gradient({1, 2, 3}) == Vec3{});
    CHECK(f.laplacian({4, 2, 3}) == 0);
}

namespace
{
Vec3 central_gradient(AnalyticField const& f, Vec3 const& p, double h)
{
    Vec3 ex{h, 0, 0};
    Vec3 ey{0, h, 0};
    Vec3 ez{0, 0, h};
    return Vec3{f.value(p + ex) - f.value(p - ex),
                f.value(p + ey) - f.value(p - ey),
                f.value(p + ez) - f.value(p - ez)}
           / (2 * h);
}

double seven_point(AnalyticField const& f, Vec3 const& p, double h)
{
    Vec3 ex{h, 0, 0};
    Vec3 ey{0, h, 0};
    Vec3 ez{0, 0, h};
    return (f.value(p + ex) + f.value(p - ex) + f.value(p + ey) + f.value(p - ey)
            + f.value(p + ez) + f.value(p - ez) - 6 * f.value(p))
           / (h * h);
}
}  // namespace

TEST_CASE("derivatives match finite differences on the source bump")
{
    AnalyticField f = Scene::default_scene().f;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-0.6, 0.6);
    for (int trial = 0; trial < 100; ++trial)
    {
        Vec3 p{u(rng), u(rng), u(rng)};
        if (norm(p) > 0.8)
        {
            continue;
        }
        CHECK(distance(central_gradient(f, p, 1e-4), f.gradient(p)) < 1e-6);
        CHECK(std::fabs(seven_point(f, p, 5e-4) - f.laplacian(p)) < 1e-4);
    }
}

TEST_CASE("derivatives of narrow bumps match extrapolated differences")
{
    // steep edges: combine steps h and h/2 to cancel the O(h^2) truncation
    AnalyticField f = two_bumps();
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    for (int trial = 0; trial < 100; ++trial)
    {
        Vec3 p{u(rng), u(rng), u(rng)};
        Vec3 g = (4 * central_gradient(f, p, 5e-5) - central_gradient(f, p, 1e-4)) / 3;
        CHECK(distance(g, f.gradient(p)) < 1e-6);
        double lap = (4 * seven_point(f, p, 1e-3) - seven_point(f, p, 2e-3)) / 3;
        CHECK(std::fabs(lap - f.laplacian(p)) < 1e-4 * std::max(1.0, std::fabs(lap)));
    }
}

TEST_CASE("line integral")
{
    AnalyticField f({Bump{{0, 0, 0}, 1.0, 1.0}});
    CHECK(line_integral(AnalyticField{}, Segment{{-2, 0, 0}, {2, 0, 0}}, 16) == 0);
    CHECK(line_integral(f, Segment{{-2, 3, 0}, {2, 3, 0}}, 16) == 0);
    Segment diam{{-2, 0, 0}, {2, 0, 0}};
    double oracle = adaptive_line_integral(f, diam);
    CHECK(line_integral(f, diam, 64) == doctest::Approx(oracle).epsilon(1e-8));
}

TEST_CASE("fundamental-solution identity")
{
    AnalyticField rho({Bump{{-0.3, 0, 0}, 0.35, 1.0}});
    OracleConfig cfg;
    for (Vec3 y : {Vec3{-0.3, 0, 0}, Vec3{-0.2, 0.1, 0.05}})
    {
        double potential = grid_newton_potential(rho, y, cfg);
        CHECK(potential == doctest::Approx(-rho.value(y)).epsilon(1e-3));
    }
}

TEST_CASE("scene validation")
{
    Scene s = Scene::default_scene();
    CHECK_NOTHROW(s.validate());
    CHECK(s.epsilon == 0.05);

    Scene bad = s;
    bad.alpha1 = AnalyticField({Bump{{0.8, 0, 0}, 0.35, 1.0}});
    CHECK_THROWS_AS(bad.validate(), PreconditionError);

    bad = s;
    bad.sigma_radius = 1.0;
    CHECK_THROWS_AS(bad.validate(), PreconditionError);

    bad = s;
    bad.epsilon = 2.0;
    CHECK_THROWS_AS(bad.validate(), PreconditionError);

    CHECK_THROWS_AS(AnalyticField({Bump{{0, 0, 0}, -1.0, 1.0}}), PreconditionError);
}
