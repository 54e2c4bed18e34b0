#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qpat/geometry.hpp"
#include "qpat/quadrature.hpp"

using namespace qpat;

TEST_CASE("chart_point midpoint on the focal axis")
{
    FocalChart chart({0, 0, 0}, {2, 0, 0});
    for (double phi : {0.0, 1.0, 4.0})
    {
        Vec3 p = chart_point(chart, 1, 1, phi);
        CHECK(p.x == doctest::Approx(1).epsilon(1e-14));
        CHECK(std::fabs(p.y) < 1e-14);
        CHECK(std::fabs(p.z) < 1e-14);
    }
}

TEST_CASE("collapsed spheroid lies on the segment")
{
    Vec3 x{0.3, -1, 2};
    Vec3 y{1.2, 0.4, -0.5};
    FocalChart chart(x, y);
    double d = chart.focal_distance();
    for (double r1 : {0.1, 0.5 * d, d - 0.2})
    {
        Vec3 p = chart_point(chart, r1, d - r1, 0.7);
        Vec3 expect = x + r1 * chart.frame().e1;
        CHECK(distance(p, expect) < 1e-10);
    }
}

TEST_CASE("chart_point reproduces focal distances")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2, 2);
    std::uniform_real_distribution<double> unit(0, 1);
    for (int trial = 0; trial < 200; ++trial)
    {
        Vec3 x{u(rng), u(rng), u(rng)};
        Vec3 y{u(rng), u(rng), u(rng)};
        FocalChart chart(x, y);
        double d = chart.focal_distance();
        double r1 = 3 * unit(rng);
        double lo = std::fabs(d - r1);
        double r2 = lo + (d + r1 - lo) * unit(rng);
        double phi = 2 * std::numbers::pi * unit(rng);
        Vec3 p = chart_point(chart, r1, r2, phi);
        CHECK(std::fabs(distance(p, x) - r1) <= 1e-10 * std::max(1.0, r1));
        CHECK(std::fabs(distance(p, y) - r2) <= 1e-10 * std::max(1.0, r2));
    }
}

TEST_CASE("chart rejects violated triangle inequalities")
{
    FocalChart chart({0, 0, 0}, {1, 0, 0});
    CHECK_THROWS_AS(chart_point(chart, 0.2, 0.2, 0), DomainError);
    CHECK_THROWS_AS(chart_point(chart, -0.1, 1.1, 0), DomainError);
    CHECK_THROWS_AS(FocalChart({1, 2, 3}, {1, 2, 3}), DomainError);
}

TEST_CASE("chart_jacobian")
{
    FocalChart chart({0, 0, 0}, {0, 2, 0});
    CHECK(chart_jacobian(chart, 0, 0) == 0);
    CHECK(chart_jacobian(chart, 1, 2) == doctest::Approx(1));
}

TEST_CASE("jacobian integrates to the spheroid volume")
{
    Vec3 x{0.1, 0.2, -0.3};
    Vec3 y{1.0, -0.4, 0.5};
    FocalChart chart(x, y);
    double d = chart.focal_distance();
    double t = d + 0.9;
    Spheroid sph{x, y, t};
    // (u, v) = (r1 + r2, r1 - r2) so dr1 dr2 = du dv / 2
    double vol = gauss_integrate(
        [&](double u) {
            return gauss_integrate(
                [&](double v) {
                    double r1 = 0.5 * (u + v);
                    double r2 = 0.5 * (u - v);
                    return 0.5 * 2 * std::numbers::pi * chart_jacobian(chart, r1, r2);
                },
                -d,
                d,
                64);
        },
        d,
        t,
        64);
    CHECK(vol == doctest::Approx(sph.volume()).epsilon(1e-6));
    double a = t / 2;
    double b2 = a * a - d * d / 4;
    CHECK(sph.volume() == doctest::Approx(4 * std::numbers::pi / 3 * a * b2).epsilon(1e-14));
}

TEST_CASE("frame is orthonormal and rotation in (e2, e3) shifts phi")
{
    Vec3 x{0, 0, 0};
    Vec3 y{0.3, 1e-9, 2.0};
    FocalChart chart(x, y);
    Frame f = chart.frame();
    CHECK(std::fabs(dot(f.e1, f.e2)) < 1e-12);
    CHECK(std::fabs(dot(f.e1, f.e3)) < 1e-12);
    CHECK(std::fabs(dot(f.e2, f.e3)) < 1e-12);
    CHECK(std::fabs(norm(f.e2) - 1) < 1e-12);
    CHECK(distance(f.e1, normalized(y - x)) < 1e-12);

    double r1 = 1.2;
    double r2 = 1.1;
    double shift = 0.4;
    Vec3 p0 = chart_point(chart, r1, r2, 0.3);
    Vec3 p1 = chart_point(chart, r1, r2, 0.3 + shift);
    // rotating p0 about e1 by `shift` lands on p1
    Vec3 axis = f.e1;
    Vec3 w = p0 - x;
    Vec3 par = dot(w, axis) * axis;
    Vec3 perp = w - par;
    Vec3 rotated = x + par + std::cos(shift) * perp + std::sin(shift) * cross(axis, perp);
    CHECK(distance(rotated, p1) < 1e-12);
}

TEST_CASE("plane and segment helpers")
{
    CHECK_THROWS_AS(Plane(0.5, Vec3{1, 1, 0}), DomainError);
    Plane p(0.5, Vec3{0, 0, 1});
    CHECK(p.signed_distance({1, 2, 3}) == doctest::Approx(2.5));
    Segment s{{-2, 0, 0}, {2, 0, 0}};
    auto [lo, hi] = chord_interval(s, Ball{{0, 0, 0}, 1});
    CHECK(lo == doctest::Approx(1));
    CHECK(hi == doctest::Approx(3));
    auto [a, b] = line_sphere_parameters({0, 0, 0}, {1, 0, 0}, 3);
    CHECK(a == doctest::Approx(-3));
    CHECK(b == doctest::Approx(3));
}
