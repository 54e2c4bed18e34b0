#include "qpat/limits.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qpat/error.hpp"
#include "qpat/parallel.hpp"
#include "qpat/transforms.hpp"

namespace qpat
{
namespace
{
constexpr double pi = std::numbers::pi;

void require_distinct(Vec3 const& x, Vec3 const& y)
{
    if (x == y)
    {
        throw DomainError("limits: detector and lattice point coincide");
    }
}

std::vector<std::uint8_t> proxy_mask(GridField3 const& ninf, double fraction)
{
    double peak = 4 * pi * ninf.max_abs();
    std::vector<std::uint8_t> mask(ninf.values().size(), 0);
    for (std::size_t n = 0; n < mask.size(); ++n)
    {
        mask[n] = peak > 0 && 4 * pi * std::fabs(ninf.values()[n]) > fraction * peak ? 1 : 0;
    }
    return mask;
}

// Zero the limit fields outside the mask
void apply_mask(DetectorLimits& lim)
{
    for (std::size_t n = 0; n < lim.mask.size(); ++n)
    {
        if (!lim.mask[n])
        {
            lim.m0.values()[n] = 0;
            lim.n0.values()[n] = 0;
            lim.ninf.values()[n] = 0;
            if (!lim.minf.values().empty())
            {
                lim.minf.values()[n] = 0;
            }
        }
    }
}

std::string num(double v) { return std::to_string(v); }

}  // namespace

//---------------------------------------------------------------------------//
// Analytic limits
//---------------------------------------------------------------------------//

AnalyticLimits::AnalyticLimits(Scene scene, AnalyticLimitSpec spec)
    : scene_{std::move(scene)}, spec_{spec}
{
    if (spec_.n_nodes < 2)
    {
        throw PreconditionError("analytic limits need at least 2 line nodes");
    }
}

double AnalyticLimits::m0(Vec3 const& x, Vec3 const& y) const
{
    require_distinct(x, y);
    double fy = scene_.f.value(y);
    if (fy == 0 || scene_.epsilon == 0)
    {
        return 0;
    }
    double d = distance(x, y);
    double line = line_integral(scene_.alpha1, Segment{x, y}, spec_.n_nodes);
    return fy * scene_.epsilon * line / (8 * pi * d);
}

double AnalyticLimits::n0(Vec3 const& x, Vec3 const& y) const
{
    require_distinct(x, y);
    double fy = scene_.f.value(y);
    if (fy == 0)
    {
        return 0;
    }
    double eps = scene_.epsilon;
    double d = distance(x, y);
    double lap = line_integral_weighted(scene_.alpha1,
                                        Segment{x, y},
                                        spec_.n_nodes,
                                        FieldQuantity::laplacian,
                                        [d](double s) { return (1 - s / d) * s; });
    return fy
           * ((1 - eps * scene_.alpha1.value(y)) / (4 * pi * d)
              - eps * scene_.rho1.value(y) / (8 * pi * d) + eps * lap / (16 * pi * d));
}

double AnalyticLimits::ninf(Vec3 const&, Vec3 const& y) const
{
    double fy = scene_.f.value(y);
    double eps = scene_.epsilon;
    return fy * (1 - eps * scene_.alpha1.value(y) - eps * scene_.rho1.value(y)) / (4 * pi);
}

double AnalyticLimits::minf(Vec3 const& x, Vec3 const& y) const
{
    require_distinct(x, y);
    double fy = scene_.f.value(y);
    if (fy == 0)
    {
        return 0;
    }
    double eps = scene_.epsilon;
    double d = distance(x, y);
    double local = (1 - eps * scene_.alpha1.value(y) - eps * scene_.rho1.value(y)) / (4 * pi * d);
    double pair = eps == 0 ? 0.0 : eps * gradient_pair_integral(scene_.rho1, x, y, spec_.whole_space);
    return fy * (local + pair);
}

double gradient_pair_integral(AnalyticField const& psi, Vec3 const& x, Vec3 const& y, RayQuadSpec const& spec)
{
    double total = 0;
    for (auto const& bump : psi.bumps())
    {
        // r^2 from the volume element cancels the 1/|z-y|^2 of grad(1/|z-y|)
        total += integrate_ball_about(
            y, bump.support(), spec, [&](Vec3 const& z, double r, Vec3 const& omega) {
                if (!(r > 0))
                {
                    return 0.0;
                }
                double v = bump.value(z);
                if (v == 0)
                {
                    return 0.0;
                }
                Vec3 w = z - x;
                double r1 = norm(w);
                return v * dot(w, omega) / (r1 * r1 * r1 * r * r);
            });
    }
    return total / (16 * pi * pi);
}

LimitData limits_analytic(Scene const& scene,
                          DetectorSet const& detectors,
                          GridGeometry const& lattice,
                          LimitGridSpec const& spec)
{
    lattice.validate();
    AnalyticLimits source(scene, spec.analytic);
    LimitData data;
    data.lattice = lattice;
    data.detectors = detectors;
    data.has_minf = spec.compute_minf;
    data.fields.resize(detectors.size());
    for (std::size_t ix = 0; ix < detectors.size(); ++ix)
    {
        Vec3 const x = detectors.points[ix];
        DetectorLimits lim{GridField3(lattice),
                           GridField3(lattice),
                           spec.compute_minf ? GridField3(lattice) : GridField3(),
                           GridField3(lattice),
                           {}};
        parallel_for(lattice.size(), [&](std::size_t n) {
            Vec3 y = lattice.point(n);
            if (scene.f.value(y) == 0)
            {
                return;
            }
            lim.m0.values()[n] = source.m0(x, y);
            lim.n0.values()[n] = source.n0(x, y);
            lim.ninf.values()[n] = source.ninf(x, y);
            if (spec.compute_minf)
            {
                lim.minf.values()[n] = source.minf(x, y);
            }
        });
        lim.mask = proxy_mask(lim.ninf, spec.mask_fraction);
        apply_mask(lim);
        data.fields[ix] = std::move(lim);
    }
    return data;
}

//---------------------------------------------------------------------------//
// Gridded limits
//---------------------------------------------------------------------------//

GriddedLimits::GriddedLimits(LimitData data, std::size_t neighbors)
    : data_{std::move(data)}, neighbors_{neighbors}
{
    if (data_.fields.size() != data_.detectors.size() || data_.fields.empty())
    {
        throw PreconditionError("gridded limits: one field set per detector is required");
    }
    if (neighbors_ == 0)
    {
        throw PreconditionError("gridded limits: need at least one neighbor");
    }
}

template<class Pick>
double GriddedLimits::blend(Vec3 const& x, Vec3 const& y, Pick&& pick) const
{
    auto near = data_.detectors.nearest(x, neighbors_);
    double wsum = 0;
    double vsum = 0;
    for (std::size_t i : near)
    {
        double dist = distance(x, data_.detectors.points[i]);
        if (dist < 1e-12)
        {
            return pick(data_.fields[i]).sample(y);
        }
        double w = 1 / dist;
        wsum += w;
        vsum += w * pick(data_.fields[i]).sample(y);
    }
    return vsum / wsum;
}

double GriddedLimits::m0(Vec3 const& x, Vec3 const& y) const
{
    return blend(x, y, [](DetectorLimits const& l) -> GridField3 const& { return l.m0; });
}

double GriddedLimits::n0(Vec3 const& x, Vec3 const& y) const
{
    return blend(x, y, [](DetectorLimits const& l) -> GridField3 const& { return l.n0; });
}

double GriddedLimits::ninf(Vec3 const& x, Vec3 const& y) const
{
    return blend(x, y, [](DetectorLimits const& l) -> GridField3 const& { return l.ninf; });
}

double GriddedLimits::minf(Vec3 const& x, Vec3 const& y) const
{
    if (!data_.has_minf)
    {
        throw PreconditionError("gridded limits: Minf was not computed");
    }
    return blend(x, y, [](DetectorLimits const& l) -> GridField3 const& { return l.minf; });
}

//---------------------------------------------------------------------------//
// Numeric limits
//---------------------------------------------------------------------------//

void check_numeric_sampling(MeasurementSet const& m, GridGeometry const& lattice, NumericLimitSpec const& spec)
{
    lattice.validate();
    auto const& t = m.times;
    if (t.size() < 4)
    {
        throw PreconditionError("limits_numeric: need at least 4 time samples");
    }
    double dt = (t.back() - t.front()) / (t.size() - 1);
    for (std::size_t k = 1; k < t.size(); ++k)
    {
        if (std::fabs(t[k] - t[k - 1] - dt) > 1e-9 * std::max(1.0, dt))
        {
            throw PreconditionError("limits_numeric: time grid must be uniform");
        }
    }
    if (spec.wavefront_steps.size() != 3)
    {
        throw PreconditionError("limits_numeric: need exactly three wavefront offsets");
    }

    double d_min = std::numeric_limits<double>::infinity();
    double d_max = 0;
    for (auto const& x : m.detectors.points)
    {
        for (std::size_t n = 0; n < lattice.size(); ++n)
        {
            double d = distance(x, lattice.point(n));
            d_min = std::min(d_min, d);
            d_max = std::max(d_max, d);
        }
    }
    if (dt > 0.02 * d_min)
    {
        throw PreconditionError("limits_numeric: near-wavefront bound violated: dt = " + num(dt)
                                + " exceeds 0.02 * min|y-x| = " + num(0.02 * d_min));
    }
    int far = *std::max_element(spec.wavefront_steps.begin(), spec.wavefront_steps.end());
    if (d_min - dt < t.front() || d_max + (far + 2) * dt > t.back())
    {
        throw PreconditionError("limits_numeric: wavefront coverage bound violated: times ["
                                + num(t.front()) + ", " + num(t.back()) + "] must contain ["
                                + num(d_min - dt) + ", " + num(d_max + (far + 2) * dt) + "]");
    }
    long count = std::count_if(t.begin(), t.end(), [&](double v) { return v >= spec.large_t_start; });
    if (count < std::max(4, spec.min_large_t_samples))
    {
        throw PreconditionError("limits_numeric: large-time bound violated: "
                                + std::to_string(count) + " samples at t >= "
                                + num(spec.large_t_start) + ", need "
                                + std::to_string(std::max(4, spec.min_large_t_samples)));
    }
}

LimitData limits_numeric(MeasurementSet const& m, GridGeometry const& lattice, NumericLimitSpec const& spec)
{
    check_numeric_sampling(m, lattice, spec);
    auto const& times = m.times;
    std::size_t n_t = times.size();
    double t0 = times.front();
    double dt = (times.back() - t0) / (n_t - 1);

    std::vector<std::size_t> late;
    for (std::size_t k = 0; k < n_t; ++k)
    {
        if (times[k] >= spec.large_t_start)
        {
            late.push_back(k);
        }
    }
    // Normal equations of the quadratic fit in centered time
    double tc = 0;
    for (std::size_t k : late)
    {
        tc += times[k];
    }
    tc /= late.size();
    double s[5] = {0, 0, 0, 0, 0};
    for (std::size_t k : late)
    {
        double u = times[k] - tc;
        double p = 1;
        for (double& v : s)
        {
            v += p;
            p *= u;
        }
    }
    auto solve3 = [](double a[3][3], double b[3], double out[3]) {
        double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
                     - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                     + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
        for (int c = 0; c < 3; ++c)
        {
            double m3[3][3];
            for (int i = 0; i < 3; ++i)
            {
                for (int j = 0; j < 3; ++j)
                {
                    m3[i][j] = j == c ? b[i] : a[i][j];
                }
            }
            out[c] = (m3[0][0] * (m3[1][1] * m3[2][2] - m3[1][2] * m3[2][1])
                      - m3[0][1] * (m3[1][0] * m3[2][2] - m3[1][2] * m3[2][0])
                      + m3[0][2] * (m3[1][0] * m3[2][1] - m3[1][1] * m3[2][0]))
                     / det;
        }
    };

    LimitData data;
    data.lattice = lattice;
    data.detectors = m.detectors;
    data.has_minf = true;
    data.fields.resize(m.detectors.size());

    std::vector<double> deltas;
    for (int step : spec.wavefront_steps)
    {
        deltas.push_back(step * dt);
    }

    for (std::size_t ix = 0; ix < m.detectors.size(); ++ix)
    {
        Vec3 const x = m.detectors.points[ix];
        std::vector<std::vector<double>> g(n_t);
        for (std::size_t k = 0; k < n_t; ++k)
        {
            Sinogram3 sino = m.sinogram(ix, k);
            g[k] = radon3_inverse(sino, lattice).values();
        }

        DetectorLimits lim{
            GridField3(lattice), GridField3(lattice), GridField3(lattice), GridField3(lattice), {}};
        parallel_for(lattice.size(), [&](std::size_t n) {
            double d = distance(x, lattice.point(n));
            auto at = [&](double t) {
                // 4-point Lagrange interpolation on the uniform grid
                double pos = (t - t0) / dt;
                long k = std::clamp(static_cast<long>(std::floor(pos)), 1L, static_cast<long>(n_t) - 3);
                double u = pos - k;
                double w[4] = {-u * (u - 1) * (u - 2) / 6,
                               (u + 1) * (u - 1) * (u - 2) / 2,
                               -(u + 1) * u * (u - 2) / 2,
                               (u + 1) * u * (u - 1) / 6};
                double sum = 0;
                for (int i = 0; i < 4; ++i)
                {
                    sum += w[i] * g[k - 1 + i][n];
                }
                return sum;
            };
            // G = a1 delta + a2 delta^2 + a3 delta^3 through the three samples
            double a[3][3];
            double b[3];
            for (int i = 0; i < 3; ++i)
            {
                double e = deltas[i];
                a[i][0] = e;
                a[i][1] = e * e;
                a[i][2] = e * e * e;
                b[i] = at(d + e);
            }
            double c[3];
            solve3(a, b, c);
            lim.m0.values()[n] = c[0];
            lim.n0.values()[n] = 2 * c[1];

            double r[3] = {0, 0, 0};
            for (std::size_t k : late)
            {
                double u = times[k] - tc;
                r[0] += g[k][n];
                r[1] += u * g[k][n];
                r[2] += u * u * g[k][n];
            }
            double nm[3][3] = {{s[0], s[1], s[2]}, {s[1], s[2], s[3]}, {s[2], s[3], s[4]}};
            double q[3];
            solve3(nm, r, q);
            // q0 + q1 (t - tc) + q2 (t - tc)^2: t coefficient is q1 - 2 q2 tc
            lim.minf.values()[n] = 2 * q[2];
            lim.ninf.values()[n] = -(q[1] - 2 * q[2] * tc);
        });
        lim.mask = proxy_mask(lim.ninf, spec.mask_fraction);
        apply_mask(lim);
        data.fields[ix] = std::move(lim);
    }
    return data;
}

}  // namespace qpat
