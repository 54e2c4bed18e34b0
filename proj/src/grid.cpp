#include "qpat/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qpat/error.hpp"
#include "qpat/parallel.hpp"

namespace qpat
{
Vec3 GridGeometry::point(std::size_t flat) const
{
    int i = static_cast<int>(flat % nx);
    int j = static_cast<int>((flat / nx) % ny);
    int k = static_cast<int>(flat / (static_cast<std::size_t>(nx) * ny));
    return point(i, j, k);
}

void GridGeometry::validate() const
{
    if (nx < 2 || ny < 2 || nz < 2)
    {
        throw PreconditionError("grid needs at least 2 nodes per axis");
    }
    if (!(h > 0) || !std::isfinite(h) || !is_finite(origin))
    {
        throw PreconditionError("grid spacing must be positive and finite");
    }
}

GridGeometry GridGeometry::cube(double half_width, int n)
{
    GridGeometry g{n, n, n, 2 * half_width / (n - 1), Vec3{-half_width, -half_width, -half_width}};
    g.validate();
    return g;
}

GridField3::GridField3(GridGeometry geom, double fill) : geom_{geom}
{
    geom_.validate();
    values_.assign(geom_.size(), fill);
}

GridField3::GridField3(GridGeometry geom, std::vector<double> values)
    : geom_{geom}, values_{std::move(values)}
{
    geom_.validate();
    if (values_.size() != geom_.size())
    {
        throw PreconditionError("grid value count does not match its dimensions");
    }
}

double GridField3::sample(Vec3 const& p) const
{
    double fx = (p.x - geom_.origin.x) / geom_.h;
    double fy = (p.y - geom_.origin.y) / geom_.h;
    double fz = (p.z - geom_.origin.z) / geom_.h;
    if (!(fx >= 0 && fy >= 0 && fz >= 0 && fx <= geom_.nx - 1 && fy <= geom_.ny - 1
          && fz <= geom_.nz - 1))
    {
        return 0;
    }
    int i = std::min(static_cast<int>(fx), geom_.nx - 2);
    int j = std::min(static_cast<int>(fy), geom_.ny - 2);
    int k = std::min(static_cast<int>(fz), geom_.nz - 2);
    double tx = fx - i;
    double ty = fy - j;
    double tz = fz - k;
    auto lerp = [](double a, double b, double s) { return a + s * (b - a); };
    auto& g = *this;
    double c00 = lerp(g(i, j, k), g(i + 1, j, k), tx);
    double c10 = lerp(g(i, j + 1, k), g(i + 1, j + 1, k), tx);
    double c01 = lerp(g(i, j, k + 1), g(i + 1, j, k + 1), tx);
    double c11 = lerp(g(i, j + 1, k + 1), g(i + 1, j + 1, k + 1), tx);
    return lerp(lerp(c00, c10, ty), lerp(c01, c11, ty), tz);
}

double GridField3::max_abs() const
{
    double m = 0;
    for (double v : values_)
    {
        m = std::max(m, std::fabs(v));
    }
    return m;
}

GridField3 sample_field(GridGeometry const& geom, std::function<double(Vec3 const&)> const& f)
{
    GridField3 out(geom);
    auto& vals = out.values();
    parallel_for(geom.size(), [&](std::size_t n) { vals[n] = f(geom.point(n)); });
    return out;
}

GridField3 binomial_smooth(GridField3 const& field)
{
    auto const& g = field.geometry();
    GridField3 cur = field;
    for (int axis = 0; axis < 3; ++axis)
    {
        GridField3 next(g);
        for (int k = 0; k < g.nz; ++k)
        {
            for (int j = 0; j < g.ny; ++j)
            {
                for (int i = 0; i < g.nx; ++i)
                {
                    int dims[3] = {g.nx, g.ny, g.nz};
                    double sum = 2 * cur(i, j, k);
                    for (int s : {-1, 1})
                    {
                        int n[3] = {i, j, k};
                        n[axis] += s;
                        if (n[axis] >= 0 && n[axis] < dims[axis])
                        {
                            sum += cur(n[0], n[1], n[2]);
                        }
                    }
                    next(i, j, k) = 0.25 * sum;
                }
            }
        }
        cur = std::move(next);
    }
    return cur;
}

GridField3 laplacian7(GridField3 const& field)
{
    auto const& g = field.geometry();
    GridField3 out(g);
    double inv_h2 = 1 / (g.h * g.h);
    for (int k = 1; k + 1 < g.nz; ++k)
    {
        for (int j = 1; j + 1 < g.ny; ++j)
        {
            for (int i = 1; i + 1 < g.nx; ++i)
            {
                out(i, j, k) = (field(i + 1, j, k) + field(i - 1, j, k) + field(i, j + 1, k)
                                + field(i, j - 1, k) + field(i, j, k + 1) + field(i, j, k - 1)
                                - 6 * field(i, j, k))
                               * inv_h2;
            }
        }
    }
    return out;
}

double relative_l2(GridField3 const& a, GridField3 const& b, std::vector<bool> const& mask)
{
    if (!(a.geometry() == b.geometry()))
    {
        throw PreconditionError("relative_l2: fields live on different lattices");
    }
    double num = 0;
    double den = 0;
    auto const& av = a.values();
    auto const& bv = b.values();
    for (std::size_t n = 0; n < av.size(); ++n)
    {
        if (!mask.empty() && !mask[n])
        {
            continue;
        }
        num += (av[n] - bv[n]) * (av[n] - bv[n]);
        den += bv[n] * bv[n];
    }
    if (den == 0)
    {
        return num == 0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return std::sqrt(num / den);
}

std::vector<bool> ball_mask(GridGeometry const& geom, std::vector<Ball> const& balls)
{
    std::vector<bool> mask(geom.size(), false);
    for (std::size_t n = 0; n < mask.size(); ++n)
    {
        Vec3 p = geom.point(n);
        for (auto const& b : balls)
        {
            if (distance(p, b.center) < b.radius)
            {
                mask[n] = true;
                break;
            }
        }
    }
    return mask;
}

}  // namespace qpat
