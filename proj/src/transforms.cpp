#include "qpat/transforms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qpat/error.hpp"
#include "qpat/parallel.hpp"
#include "qpat/quadrature.hpp"

namespace qpat
{
namespace
{
constexpr double pi = std::numbers::pi;

double uniform_spacing(std::vector<double> const& offsets, char const* who)
{
    if (offsets.size() < 5)
    {
        throw PreconditionError(std::string(who) + ": need at least 5 offsets");
    }
    double step = (offsets.back() - offsets.front()) / (offsets.size() - 1);
    if (!(step > 0))
    {
        throw PreconditionError(std::string(who) + ": offsets must increase");
    }
    for (std::size_t i = 0; i < offsets.size(); ++i)
    {
        if (std::fabs(offsets[i] - (offsets.front() + i * step)) > 1e-9 * step)
        {
            throw PreconditionError(std::string(who) + ": offsets must be uniformly spaced");
        }
    }
    return step;
}

//! Linear interpolation on a uniform grid, zero outside.
double interp_uniform(std::vector<double> const& v, double first, double step, double s)
{
    double f = (s - first) / step;
    if (!(f >= 0) || f > static_cast<double>(v.size() - 1))
    {
        return 0;
    }
    std::size_t i = std::min(static_cast<std::size_t>(f), v.size() - 2);
    double w = f - i;
    return (1 - w) * v[i] + w * v[i + 1];
}

//! Parameter interval of the line p + s v inside the ball (empty if lo >= hi).
std::array<double, 2> line_ball_chord(Vec3 const& p, Vec3 const& v, Ball const& ball)
{
    Vec3 w = ball.center - p;
    double proj = dot(w, v);
    double disc = ball.radius * ball.radius - (norm_sq(w) - proj * proj);
    if (disc <= 0)
    {
        return {0, 0};
    }
    double root = std::sqrt(disc);
    return {proj - root, proj + root};
}
}  // namespace

HemisphereSampling HemisphereSampling::product(int n_polar, int n_azimuth)
{
    if (n_polar < 1 || n_azimuth < 1)
    {
        throw PreconditionError("hemisphere sampling needs positive counts");
    }
    HemisphereSampling s;
    auto const& rule = gauss_legendre(n_polar);
    double dphi = 2 * pi / n_azimuth;
    for (int ip = 0; ip < n_polar; ++ip)
    {
        double mu = 0.5 * (1 + rule.nodes[ip]);
        double wmu = 0.5 * rule.weights[ip];
        double sn = std::sqrt(std::max(0.0, 1 - mu * mu));
        for (int ia = 0; ia < n_azimuth; ++ia)
        {
            double phi = (ia + 0.5) * dphi;
            s.directions.push_back({sn * std::cos(phi), sn * std::sin(phi), mu});
            s.weights.push_back(wmu * dphi);
        }
    }
    return s;
}

std::vector<double> symmetric_offsets(double half_width, int n)
{
    if (n < 2 || !(half_width > 0))
    {
        throw PreconditionError("offset grid needs n >= 2 and a positive half width");
    }
    std::vector<double> r(n);
    for (int i = 0; i < n; ++i)
    {
        r[i] = -half_width + 2 * half_width * i / (n - 1);
    }
    return r;
}

Sinogram3 Sinogram3::zeros(HemisphereSampling sampling, std::vector<double> offsets)
{
    Sinogram3 s;
    s.sampling = std::move(sampling);
    s.offsets = std::move(offsets);
    s.values.assign(s.n_directions() * s.n_offsets(), 0.0);
    return s;
}

double radon3_forward(AnalyticField const& field, Plane const& plane, int n_nodes)
{
    double sum = 0;
    for (auto const& bump : field.bumps())
    {
        sum += integrate_plane_in_ball(plane,
                                       bump.support(),
                                       bump.center,
                                       std::numeric_limits<double>::infinity(),
                                       n_nodes,
                                       n_nodes,
                                       [&](Vec3 const& p) { return bump.value(p); });
    }
    return sum;
}

double radon3_forward(GridField3 const& field, Plane const& plane, int n_nodes)
{
    auto const& g = field.geometry();
    Vec3 lo = g.origin;
    Vec3 hi = g.upper();
    Ball bound{0.5 * (lo + hi), 0.5 * distance(lo, hi)};
    return integrate_plane_in_ball(plane,
                                   bound,
                                   bound.center,
                                   std::numeric_limits<double>::infinity(),
                                   n_nodes,
                                   2 * n_nodes,
                                   [&](Vec3 const& p) { return field.sample(p); });
}

Sinogram3 radon3_sinogram(AnalyticField const& field,
                          HemisphereSampling const& sampling,
                          std::vector<double> const& offsets,
                          int n_nodes)
{
    Sinogram3 sino = Sinogram3::zeros(sampling, offsets);
    std::size_t n_off = offsets.size();
    parallel_for(sino.values.size(), [&](std::size_t n) {
        std::size_t dir = n / n_off;
        std::size_t off = n % n_off;
        sino.values[n] = radon3_forward(field, Plane(offsets[off], sampling.directions[dir]), n_nodes);
    });
    return sino;
}

GridField3 radon3_inverse(Sinogram3 const& sino, GridGeometry const& target)
{
    target.validate();
    std::size_t n_dir = sino.n_directions();
    std::size_t n_off = sino.n_offsets();
    if (n_dir < 2)
    {
        throw PreconditionError("radon3_inverse: need at least 2 directions");
    }
    if (sino.sampling.weights.size() != n_dir || sino.values.size() != n_dir * n_off)
    {
        throw PreconditionError("radon3_inverse: sinogram layout is inconsistent");
    }
    double step = uniform_spacing(sino.offsets, "radon3_inverse");

    double peak = 0;
    for (double v : sino.values)
    {
        peak = std::max(peak, std::fabs(v));
    }
    if (peak == 0)
    {
        return GridField3(target);
    }
    for (std::size_t d = 0; d < n_dir; ++d)
    {
        double edge = std::max(std::fabs(sino.at(d, 0)), std::fabs(sino.at(d, n_off - 1)));
        if (edge > 1e-3 * peak)
        {
            throw NumericalError("radon3_inverse: insufficient offset coverage (profile "
                                 + std::to_string(d) + " has edge value "
                                 + std::to_string(edge / peak) + " of the peak)");
        }
    }

    // Second derivative of each profile, zero padded
    std::vector<std::vector<double>> second(n_dir, std::vector<double>(n_off));
    double inv = 1 / (12 * step * step);
    parallel_for(n_dir, [&](std::size_t d) {
        auto g = [&](long i) {
            return (i < 0 || i >= static_cast<long>(n_off)) ? 0.0 : sino.at(d, i);
        };
        for (long i = 0; i < static_cast<long>(n_off); ++i)
        {
            second[d][i] = (-g(i - 2) + 16 * g(i - 1) - 30 * g(i) + 16 * g(i + 1) - g(i + 2)) * inv;
        }
    });

    double scale = -2.0 / (8 * pi * pi);
    GridField3 out(target);
    auto& vals = out.values();
    parallel_for(target.size(), [&](std::size_t n) {
        Vec3 y = target.point(n);
        double sum = 0;
        for (std::size_t d = 0; d < n_dir; ++d)
        {
            double s = dot(y, sino.sampling.directions[d]);
            sum += sino.sampling.weights[d] * interp_uniform(second[d], sino.offsets.front(), step, s);
        }
        vals[n] = scale * sum;
    });
    return out;
}

double xray3_forward(AnalyticField const& field, Vec3 const& point, Vec3 const& dir, int n_nodes)
{
    if (std::fabs(norm(dir) - 1) > 1e-12)
    {
        throw PreconditionError("xray3_forward: direction must be a unit vector");
    }
    double sum = 0;
    for (auto const& bump : field.bumps())
    {
        auto [lo, hi] = line_ball_chord(point, dir, bump.support());
        sum += gauss_integrate([&](double s) { return bump.value(point + s * dir); }, lo, hi, n_nodes);
    }
    return sum;
}

double xray3_forward(GridField3 const& field, Vec3 const& point, Vec3 const& dir, int n_nodes)
{
    if (std::fabs(norm(dir) - 1) > 1e-12)
    {
        throw PreconditionError("xray3_forward: direction must be a unit vector");
    }
    auto const& g = field.geometry();
    Vec3 lo = g.origin;
    Vec3 hi = g.upper();
    // Slab clipping
    double s0 = -std::numeric_limits<double>::infinity();
    double s1 = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 3; ++k)
    {
        if (dir[k] == 0)
        {
            if (point[k] < lo[k] || point[k] > hi[k])
            {
                return 0;
            }
            continue;
        }
        double a = (lo[k] - point[k]) / dir[k];
        double b = (hi[k] - point[k]) / dir[k];
        s0 = std::max(s0, std::min(a, b));
        s1 = std::min(s1, std::max(a, b));
    }
    if (!(s1 > s0))
    {
        return 0;
    }
    return line_integral_sampled([&](Vec3 const& z) { return field.sample(z); },
                                 Segment{point + s0 * dir, point + s1 * dir},
                                 g.h,
                                 n_nodes,
                                 [](double) { return 1.0; });
}

double ParallelBeamData::angle(int a) const
{
    return pi * a / n_angles;
}

Vec3 ParallelBeamData::center(int slice) const
{
    Vec3 up = target.upper();
    return {0.5 * (target.origin.x + up.x), 0.5 * (target.origin.y + up.y),
            target.origin.z + slice * target.h};
}

Vec3 ParallelBeamData::normal(int a) const
{
    return {std::cos(angle(a)), std::sin(angle(a)), 0};
}

Vec3 ParallelBeamData::direction(int a) const
{
    return {-std::sin(angle(a)), std::cos(angle(a)), 0};
}

Vec3 ParallelBeamData::line_point(int slice, int a, std::size_t o) const
{
    return center(slice) + offsets[o] * normal(a);
}

ParallelBeamData ParallelBeamData::zeros(GridGeometry const& target, int n_angles, std::vector<double> offsets)
{
    target.validate();
    if (n_angles < 1)
    {
        throw PreconditionError("parallel-beam data need at least one angle");
    }
    ParallelBeamData d;
    d.target = target;
    d.n_angles = n_angles;
    d.offsets = std::move(offsets);
    d.values.assign(static_cast<std::size_t>(target.nz) * n_angles * d.offsets.size(), 0.0);
    return d;
}

ParallelBeamData xray3_parallel_beam(AnalyticField const& field,
                                     GridGeometry const& target,
                                     int n_angles,
                                     std::vector<double> const& offsets,
                                     int n_nodes)
{
    auto data = ParallelBeamData::zeros(target, n_angles, offsets);
    std::size_t n_off = offsets.size();
    parallel_for(data.values.size(), [&](std::size_t n) {
        std::size_t o = n % n_off;
        int a = static_cast<int>((n / n_off) % n_angles);
        int k = static_cast<int>(n / (n_off * n_angles));
        data.values[n] = xray3_forward(field, data.line_point(k, a, o), data.direction(a), n_nodes);
    });
    return data;
}

std::vector<double> fbp_slice(std::vector<double> const& sino,
                              int n_angles,
                              std::vector<double> const& offsets,
                              GridGeometry const& target)
{
    std::size_t n_off = offsets.size();
    if (sino.size() != static_cast<std::size_t>(n_angles) * n_off)
    {
        throw PreconditionError("fbp_slice: sinogram size does not match angles x offsets");
    }
    double step = uniform_spacing(offsets, "fbp_slice");

    // Ram-Lak filter in the spatial domain
    std::vector<double> kernel(2 * n_off - 1);
    for (long m = -static_cast<long>(n_off) + 1; m < static_cast<long>(n_off); ++m)
    {
        double v = 0;
        if (m == 0)
        {
            v = 1 / (4 * step * step);
        }
        else if (m % 2 != 0)
        {
            v = -1 / (pi * pi * double(m) * double(m) * step * step);
        }
        kernel[m + n_off - 1] = v;
    }
    std::vector<double> filtered(sino.size());
    for (int a = 0; a < n_angles; ++a)
    {
        double const* p = sino.data() + a * n_off;
        for (std::size_t i = 0; i < n_off; ++i)
        {
            double sum = 0;
            for (std::size_t m = 0; m < n_off; ++m)
            {
                sum += kernel[i - m + n_off - 1] * p[m];
            }
            filtered[a * n_off + i] = step * sum;
        }
    }

    Vec3 up = target.upper();
    double cx = 0.5 * (target.origin.x + up.x);
    double cy = 0.5 * (target.origin.y + up.y);
    std::vector<double> cosines(n_angles);
    std::vector<double> sines(n_angles);
    for (int a = 0; a < n_angles; ++a)
    {
        cosines[a] = std::cos(pi * a / n_angles);
        sines[a] = std::sin(pi * a / n_angles);
    }
    std::vector<double> image(static_cast<std::size_t>(target.nx) * target.ny);
    std::vector<double> row(n_off);
    for (int j = 0; j < target.ny; ++j)
    {
        for (int i = 0; i < target.nx; ++i)
        {
            double px = target.origin.x + i * target.h - cx;
            double py = target.origin.y + j * target.h - cy;
            double sum = 0;
            for (int a = 0; a < n_angles; ++a)
            {
                double s = px * cosines[a] + py * sines[a];
                double f = (s - offsets.front()) / step;
                if (!(f >= 0) || f > static_cast<double>(n_off - 1))
                {
                    continue;
                }
                std::size_t k = std::min(static_cast<std::size_t>(f), n_off - 2);
                double w = f - k;
                sum += (1 - w) * filtered[a * n_off + k] + w * filtered[a * n_off + k + 1];
            }
            image[i + static_cast<std::size_t>(target.nx) * j] = sum * pi / n_angles;
        }
    }
    return image;
}

GridField3 xray3_inverse(ParallelBeamData const& data)
{
    auto const& target = data.target;
    target.validate();
    std::size_t per_slice = static_cast<std::size_t>(data.n_angles) * data.n_offsets();
    if (data.n_angles < 1 || data.values.size() != per_slice * target.nz)
    {
        throw PreconditionError("xray3_inverse: missing slice data (expected "
                                + std::to_string(per_slice * target.nz) + " values, got "
                                + std::to_string(data.values.size()) + ")");
    }
    for (std::size_t n = 0; n < data.values.size(); ++n)
    {
        if (!std::isfinite(data.values[n]))
        {
            throw PreconditionError("xray3_inverse: missing line value in slice "
                                    + std::to_string(n / per_slice));
        }
    }
    GridField3 out(target);
    std::size_t plane = static_cast<std::size_t>(target.nx) * target.ny;
    parallel_for(static_cast<std::size_t>(target.nz), [&](std::size_t k) {
        std::vector<double> sino(data.values.begin() + k * per_slice,
                                 data.values.begin() + (k + 1) * per_slice);
        auto img = fbp_slice(sino, data.n_angles, data.offsets, target);
        std::copy(img.begin(), img.end(), out.values().begin() + k * plane);
    });
    return out;
}

}  // namespace qpat
