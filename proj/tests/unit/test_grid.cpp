#include <doctest.h>

#include <cmath>

#include "qpat/grid.hpp"

using namespace qpat;

TEST_CASE("lattice layout is x fastest")
{
    GridGeometry g{3, 4, 5, 0.5, {1, 2, 3}};
    CHECK(g.size() == 60);
    CHECK(g.index(1, 0, 0) == 1);
    CHECK(g.index(0, 1, 0) == 3);
    CHECK(g.index(0, 0, 1) == 12);
    CHECK(g.point(g.index(2, 3, 4)) == Vec3{2, 3.5, 5});
    CHECK_THROWS_AS((GridGeometry{1, 4, 5, 0.5, {}}.validate()), PreconditionError);
    CHECK_THROWS_AS(GridField3(g, std::vector<double>(5)), PreconditionError);
}

TEST_CASE("trilinear sampling reproduces affine fields")
{
    GridGeometry g = GridGeometry::cube(1.0, 9);
    auto affine = [](Vec3 const& p) { return 1 + 2 * p.x - 3 * p.y + 0.5 * p.z; };
    GridField3 f = sample_field(g, affine);
    for (Vec3 p : {Vec3{0.13, -0.4, 0.77}, Vec3{-1, -1, -1}, Vec3{1, 1, 1}, Vec3{0.99, 0, -0.3}})
    {
        CHECK(f.sample(p) == doctest::Approx(affine(p)).epsilon(1e-13));
    }
    CHECK(f.sample({1.01, 0, 0}) == 0);
}

TEST_CASE("laplacian and smoothing")
{
    GridGeometry g = GridGeometry::cube(1.0, 11);
    GridField3 q = sample_field(g, [](Vec3 const& p) { return p.x * p.x + 2 * p.y * p.y - p.z * p.z; });
    GridField3 lap = laplacian7(q);
    CHECK(lap(5, 5, 5) == doctest::Approx(4).epsilon(1e-10));
    CHECK(lap(0, 5, 5) == 0);

    GridField3 c(g, 2.0);
    GridField3 s = binomial_smooth(c);
    CHECK(s(5, 5, 5) == doctest::Approx(2));
    CHECK(s(0, 5, 5) == doctest::Approx(1.5));
}

TEST_CASE("relative L2 and masks")
{
    GridGeometry g = GridGeometry::cube(1.0, 5);
    GridField3 a(g, 1.1);
    GridField3 b(g, 1.0);
    CHECK(relative_l2(a, b) == doctest::Approx(0.1));
    auto mask = ball_mask(g, {Ball{{0, 0, 0}, 0.1}});
    std::size_t count = 0;
    for (bool m : mask)
    {
        count += m ? 1 : 0;
    }
    CHECK(count == 1);
    CHECK(relative_l2(GridField3(g), GridField3(g)) == 0);
}
