#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qpat/error.hpp"
#include "qpat/forward_model.hpp"
#include "qpat/kernel.hpp"
#include "qpat/limits.hpp"

using namespace qpat;

namespace
{
constexpr double pi = std::numbers::pi;

Scene scene_eps(double eps)
{
    Scene s = Scene::default_scene();
    s.epsilon = eps;
    return s;
}

std::vector<std::pair<Vec3, Vec3>> sample_pairs()
{
    return {{{3, 0, 0}, {0.3, 0, 0.1}},
            {{0, 3, 0}, {0.2, -0.1, 0.05}},
            {{0, 0, -3}, {-0.3, 0.1, 0.2}},
            {{1.2, 2.1, 1.5}, {0.1, 0.4, -0.2}},
            {{-3, 0, 0}, {0.5, 0.1, 0}}};
}

// eps = 0 measurements along one detector on a small lattice
MeasurementSet free_measurements(Vec3 const& x, std::vector<double> const& times)
{
    Scene s = scene_eps(0);
    DetectorSet det{s.sigma_radius, {x}};
    PlaneFamily planes{HemisphereSampling::product(16, 32), symmetric_offsets(1.2, 65)};
    SynthesisSpec spec;
    spec.plane_radial = 16;
    spec.plane_angular = 32;
    return synthesize(s, det, times, planes, spec);
}
}  // namespace

TEST_CASE("analytic limits vanish outside supp f")
{
    AnalyticLimits lim(scene_eps(0.05));
    Vec3 x{3, 0, 0};
    Vec3 y{0, 1.05, 0};
    CHECK(lim.m0(x, y) == 0);
    CHECK(lim.n0(x, y) == 0);
    CHECK(lim.ninf(x, y) == 0);
    CHECK(lim.minf(x, y) == 0);
    CHECK_THROWS_AS(lim.m0(x, x), DomainError);
}

TEST_CASE("analytic limits at eps = 0")
{
    Scene s = scene_eps(0);
    AnalyticLimits lim(s);
    for (auto const& [x, y] : sample_pairs())
    {
        double f = s.f.value(y);
        double d = distance(x, y);
        CHECK(lim.m0(x, y) == 0);
        CHECK(lim.n0(x, y) == doctest::Approx(f / (4 * pi * d)).epsilon(1e-14));
        CHECK(lim.ninf(x, y) == doctest::Approx(f / (4 * pi)).epsilon(1e-14));
        CHECK(lim.minf(x, y) == doctest::Approx(f / (4 * pi * d)).epsilon(1e-14));
    }
}

TEST_CASE("wavefront limits equal f times the kernel limits")
{
    Scene s = scene_eps(0.05);
    AnalyticLimits lim(s);
    for (auto const& [x, y] : sample_pairs())
    {
        double f = s.f.value(y);
        CHECK(lim.m0(x, y) == doctest::Approx(f * kernel_dt_limit(s, x, y)).epsilon(1e-10));
        CHECK(lim.n0(x, y) == doctest::Approx(f * kernel_dtt_limit(s, x, y)).epsilon(1e-10));
        CHECK(lim.m0(x, y) >= 0);
    }
}

TEST_CASE("large-time limits against the polynomial coefficients")
{
    Scene s = scene_eps(0.05);
    AnalyticLimits lim(s);
    RayQuadSpec fine{64, 64, 48};
    for (auto const& [x, y] : sample_pairs())
    {
        double f = s.f.value(y);
        auto poly = kernel_large_t_coefficients(s, x, y, fine);
        CHECK(lim.minf(x, y) == doctest::Approx(2 * poly.c2 * f).epsilon(1e-3));
        CHECK(lim.ninf(x, y) == doctest::Approx(-poly.c1 * f).epsilon(1e-3));
    }
}

TEST_CASE("Ninf does not depend on the detector")
{
    Scene s = scene_eps(0.05);
    AnalyticLimits lim(s);
    auto det = DetectorSet::fibonacci(16, s.sigma_radius);
    Vec3 y{0.25, -0.05, 0.1};
    for (auto const& x : det.points)
    {
        CHECK(lim.ninf(x, y) == lim.ninf(det.points[0], y));
    }
}

TEST_CASE("gridded limits reproduce analytic values at detector nodes")
{
    Scene s = scene_eps(0.05);
    auto det = DetectorSet::fibonacci(8, s.sigma_radius);
    GridGeometry g = GridGeometry::cube(1.0, 9);
    LimitGridSpec spec;
    spec.compute_minf = true;
    LimitData data = limits_analytic(s, det, g, spec);
    AnalyticLimits exact(s);
    GriddedLimits gl(data);
    for (std::size_t n = 0; n < g.size(); n += 37)
    {
        Vec3 y = g.point(n);
        if (!data.fields[3].mask[n])
        {
            CHECK(gl.m0(det.points[3], y) == 0);
            continue;
        }
        CHECK(gl.m0(det.points[3], y) == doctest::Approx(exact.m0(det.points[3], y)).epsilon(1e-12));
        CHECK(gl.n0(det.points[3], y) == doctest::Approx(exact.n0(det.points[3], y)).epsilon(1e-12));
        CHECK(gl.minf(det.points[3], y) == doctest::Approx(exact.minf(det.points[3], y)).epsilon(1e-12));
    }

    LimitData bare = limits_analytic(s, det, g);
    CHECK_FALSE(bare.has_minf);
    CHECK_THROWS_AS(GriddedLimits(bare).minf(det.points[0], Vec3{}), PreconditionError);
}

TEST_CASE("numeric limits: sampling preconditions name the bound")
{
    MeasurementSet m;
    m.detectors = DetectorSet{3.0, {{3, 0, 0}}};
    m.planes = PlaneFamily{HemisphereSampling::product(2, 4), symmetric_offsets(1.2, 5)};
    GridGeometry g = GridGeometry::cube(1.0, 5);
    NumericLimitSpec spec;
    spec.large_t_start = 5.3;

    m.times = uniform_times(0.1, 8.4, 96);
    try
    {
        check_numeric_sampling(m, g, spec);
        FAIL("expected a precondition error");
    }
    catch (PreconditionError const& e)
    {
        CHECK(std::string(e.what()).find("near-wavefront bound") != std::string::npos);
    }

    m.times = uniform_times(2.5, 5.0, 126);
    try
    {
        check_numeric_sampling(m, g, spec);
        FAIL("expected a precondition error");
    }
    catch (PreconditionError const& e)
    {
        CHECK(std::string(e.what()).find("wavefront coverage") != std::string::npos);
    }

    m.times = uniform_times(1.9, 5.3, 171);
    try
    {
        check_numeric_sampling(m, g, spec);
        FAIL("expected a precondition error");
    }
    catch (PreconditionError const& e)
    {
        CHECK(std::string(e.what()).find("large-time bound") != std::string::npos);
    }
}

TEST_CASE("numeric limits of zero measurements are zero")
{
    MeasurementSet m;
    m.detectors = DetectorSet{3.0, {{3, 0, 0}}};
    m.planes = PlaneFamily{HemisphereSampling::product(4, 8), symmetric_offsets(1.2, 17)};
    m.times = uniform_times(1.9, 5.624, 99);
    m.values.assign(m.times.size() * m.planes.n_directions() * m.planes.n_offsets(), 0.0);
    NumericLimitSpec spec;
    spec.large_t_start = 5.3;
    LimitData d = limits_numeric(m, GridGeometry::cube(1.0, 5), spec);
    CHECK(d.fields[0].m0.max_abs() == 0);
    CHECK(d.fields[0].n0.max_abs() == 0);
    CHECK(d.fields[0].ninf.max_abs() == 0);
    CHECK(d.fields[0].minf.max_abs() == 0);
}

TEST_CASE("numeric limits at eps = 0 match the closed forms")
{
    Vec3 x{3, 0, 0};
    Scene s = scene_eps(0);
    auto times = uniform_times(1.9, 5.624, 99);
    MeasurementSet m = free_measurements(x, times);
    NumericLimitSpec spec;
    spec.large_t_start = max_support_bound(s, x);
    GridGeometry g = GridGeometry::cube(1.0, 33);
    LimitData d = limits_numeric(m, g, spec);

    GridField3 n0 = sample_field(g, [&](Vec3 const& y) { return s.f.value(y) / (4 * pi * distance(x, y)); });
    GridField3 ninf = sample_field(g, [&](Vec3 const& y) { return s.f.value(y) / (4 * pi); });
    auto const& mask = d.fields[0].mask;
    std::vector<bool> inner(g.size());
    for (std::size_t n = 0; n < g.size(); ++n)
    {
        inner[n] = mask[n] && s.f.value(g.point(n)) > 0.2;
    }
    // the inversion smears the kink at the wavefront over a few cells, so
    // the wavefront limits converge with the lattice, not with dt
    CHECK(relative_l2(d.fields[0].n0, n0, inner) < 0.04);
    CHECK(relative_l2(d.fields[0].ninf, ninf, inner) < 0.01);
    CHECK(d.fields[0].m0.max_abs() < 0.01 * n0.max_abs());
}
