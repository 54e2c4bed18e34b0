#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qpat/forward_model.hpp"
#include "qpat/oracle.hpp"

using namespace qpat;

namespace
{
PlaneFamily small_family(int n_polar, int n_off, double half_width)
{
    return PlaneFamily{HemisphereSampling::product(n_polar, 2 * n_polar),
                       symmetric_offsets(half_width, n_off)};
}

SynthesisSpec quick_spec()
{
    SynthesisSpec spec;
    spec.cache_nodes = 13;
    spec.profile.box = QuadSpec{16, 16, 12};
    spec.plane_radial = 16;
    spec.plane_angular = 32;
    return spec;
}
}  // namespace

TEST_CASE("fibonacci detectors")
{
    auto det = DetectorSet::fibonacci(64, 3.0);
    CHECK(det.size() == 64);
    for (auto const& p : det.points)
    {
        CHECK(std::fabs(norm(p) - 3.0) < 1e-12);
    }
    auto near = det.nearest(det.points[10], 4);
    CHECK(near.front() == 10);
    CHECK(near.size() == 4);
}

TEST_CASE("free-space measurements match the closed-form oracle")
{
    Scene s = Scene::default_scene();
    s.epsilon = 0;
    auto det = DetectorSet::fibonacci(2, 3.0);
    auto times = uniform_times(2.5, 5.5, 5);
    auto planes = small_family(2, 5, 0.8);
    SynthesisSpec spec = quick_spec();
    spec.plane_radial = 48;
    spec.plane_angular = 96;
    auto m = synthesize(s, det, times, planes, spec);
    for (std::size_t ix = 0; ix < det.size(); ++ix)
    {
        for (std::size_t k = 0; k < times.size(); k += 2)
        {
            for (std::size_t dir = 0; dir < planes.n_directions(); dir += 3)
            {
                for (std::size_t off = 0; off < planes.n_offsets(); ++off)
                {
                    Plane plane(planes.offsets[off], planes.sampling.directions[dir]);
                    double oracle = plane_free_kernel_integral(s.f, plane, det.points[ix], times[k]);
                    CHECK(m.at(ix, k, dir, off)
                          == doctest::Approx(oracle).epsilon(1e-7).scale(1e-6));
                }
            }
        }
    }
}

TEST_CASE("causality, linearity and preconditions")
{
    Scene s = Scene::default_scene();
    auto det = DetectorSet::fibonacci(1, 3.0);
    std::vector<double> times{0.5, 1.9, 2.3, 4.6, 5.4};
    auto planes = small_family(2, 7, 1.0);
    SynthesisSpec spec = quick_spec();
    auto m = synthesize(s, det, times, planes, spec);

    Vec3 x = det.points[0];
    for (std::size_t k = 0; k < times.size(); ++k)
    {
        for (std::size_t dir = 0; dir < planes.n_directions(); ++dir)
        {
            for (std::size_t off = 0; off < planes.n_offsets(); ++off)
            {
                Plane plane(planes.offsets[off], planes.sampling.directions[dir]);
                // closest point of E ∩ supp f to x is at least this far
                double reach = std::fabs(plane.signed_distance(x));
                double disc = std::sqrt(std::max(0.0, 1 - plane.r * plane.r));
                double to_disc = std::max(reach, distance(x, plane.foot_of({0, 0, 0})) - disc);
                if (times[k] < to_disc || std::fabs(plane.r) >= 1)
                {
                    CHECK(m.at(0, k, dir, off) == 0);
                }
            }
        }
    }

    Scene doubled = s;
    doubled.f = s.f.scaled(2);
    auto m2 = synthesize(doubled, det, times, planes, spec);
    for (std::size_t i = 0; i < m.values.size(); ++i)
    {
        CHECK(m2.values[i] == 2 * m.values[i]);
    }

    CHECK_THROWS_AS(synthesize(s, det, {0.5, 1.0, 2.0}, planes, spec), PreconditionError);
    CHECK_THROWS_AS(synthesize(s, DetectorSet::fibonacci(2, 1.1), times, planes, spec),
                    PreconditionError);
}

TEST_CASE("large-time entries are quadratic in t")
{
    Scene s = Scene::default_scene();
    auto det = DetectorSet::fibonacci(1, 3.0);
    double start = max_support_bound(s, det.points[0]);
    std::vector<double> times{start, start + 0.5, start + 1.0, start + 1.5};
    auto planes = small_family(2, 5, 0.8);
    auto m = synthesize(s, det, times, planes, quick_spec());
    for (std::size_t dir = 0; dir < planes.n_directions(); ++dir)
    {
        for (std::size_t off = 0; off < planes.n_offsets(); ++off)
        {
            double v[4];
            for (int k = 0; k < 4; ++k)
            {
                v[k] = m.at(0, k, dir, off);
            }
            double third = v[3] - 3 * v[2] + 3 * v[1] - v[0];
            double scale = std::max({std::fabs(v[0]), std::fabs(v[3])});
            CHECK(std::fabs(third) <= 1e-4 * scale + 1e-14);
        }
    }
}

TEST_CASE("cached and direct synthesis agree")
{
    Scene s = Scene::default_scene();
    auto det = DetectorSet::fibonacci(1, 3.0);
    Vec3 x = det.points[0];
    SynthesisSpec spec = quick_spec();
    spec.cache_nodes = 25;
    spec.profile.box = QuadSpec{24, 24, 16};
    spec.kernel = QuadSpec{24, 24, 16};
    spec.plane_radial = 12;
    spec.plane_angular = 24;
    double t = distance(x, {0, 0, 0}) + 0.4;
    std::vector<double> times{t, max_support_bound(s, x)};
    PlaneFamily planes{HemisphereSampling::product(1, 2), {-0.2, 0.0, 0.3}};
    auto m = synthesize(s, det, times, planes, spec);
    for (std::size_t dir = 0; dir < planes.n_directions(); ++dir)
    {
        for (std::size_t off = 0; off < planes.n_offsets(); ++off)
        {
            Plane plane(planes.offsets[off], planes.sampling.directions[dir]);
            double direct = measurement_direct(s, t, x, plane, spec);
            CHECK(m.at(0, 0, dir, off) == doctest::Approx(direct).epsilon(2e-3));
        }
    }
}

TEST_CASE("first-order pressure")
{
    Scene s = Scene::default_scene();
    s.epsilon = 0;
    AnalyticField p0({Bump{{0.1, 0.0, 0.2}, 0.6, 1.0}});
    Vec3 x{2.0, 0.5, 0};
    CHECK(pressure_first_order(s, 0.5, x, p0) == 0);
    CHECK_THROWS_AS(pressure_first_order(s, 0.02, x, p0), PreconditionError);

    double t = distance(x, {0.1, 0, 0.2});
    double p = pressure_first_order(s, t, x, p0);
    CHECK(p == doctest::Approx(p0_spherical_means(p0, t, x)).epsilon(1e-3));

    PressureSpec half;
    half.step = 5e-3;
    CHECK(pressure_first_order(s, t, x, p0, half) == doctest::Approx(p).epsilon(1e-3));
}
