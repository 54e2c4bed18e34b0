#include "qpat/forward_model.hpp"

#include <algorithm>
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

double leading_term(Scene const& scene, double t, double d, Vec3 const& y)
{
    if (!(t > d))
    {
        return 0;
    }
    return (t - d) * (t - d) * (1 - scene.epsilon * scene.alpha1.value(y)) / (8 * pi * d);
}

bool has_perturbation(Scene const& scene)
{
    return scene.epsilon != 0 && !(scene.alpha1.empty() && scene.rho1.empty());
}

void check_inputs(Scene const& scene,
                  DetectorSet const& detectors,
                  std::vector<double> const& times,
                  PlaneFamily const& planes,
                  SynthesisSpec const& spec)
{
    scene.validate();
    if (detectors.points.empty())
    {
        throw PreconditionError("synthesize: no detectors");
    }
    if (!(detectors.radius > scene.omega_radius))
    {
        throw PreconditionError("synthesize: detector radius " + std::to_string(detectors.radius)
                                + " must exceed omega_radius "
                                + std::to_string(scene.omega_radius));
    }
    if (times.empty() || planes.n_directions() == 0 || planes.n_offsets() == 0)
    {
        throw PreconditionError("synthesize: empty time grid or plane family");
    }
    for (std::size_t k = 1; k < times.size(); ++k)
    {
        if (!(times[k] > times[k - 1]))
        {
            throw PreconditionError("synthesize: times must ascend");
        }
    }
    if (!(times.front() >= 0))
    {
        throw PreconditionError("synthesize: times must be nonnegative");
    }
    double need = 0;
    for (auto const& x : detectors.points)
    {
        need = std::max(need, max_support_bound(scene, x));
    }
    need += spec.support_margin;
    if (times.back() < need)
    {
        throw PreconditionError("synthesize: t_max " + std::to_string(times.back())
                                + " below the support bound " + std::to_string(need));
    }
    if (spec.cache_nodes < 2 || spec.plane_radial < 2 || spec.plane_angular < 2)
    {
        throw PreconditionError("synthesize: node counts must be at least 2");
    }
}

// Plane integral of (leading + integral terms) f over E ∩ B_t(x)
template<class IntegralPart>
double plane_entry(Scene const& scene,
                   double t,
                   Vec3 const& x,
                   Plane const& plane,
                   int n_radial,
                   int n_angular,
                   IntegralPart&& part)
{
    double h = plane.signed_distance(x);
    if (!(t > std::fabs(h)))
    {
        return 0;
    }
    double rho_cap = std::sqrt(t * t - h * h);
    double sum = 0;
    for (auto const& bump : scene.f.bumps())
    {
        sum += integrate_plane_in_ball(
            plane, bump.support(), x, rho_cap, n_radial, n_angular, [&](Vec3 const& y) {
                double fy = bump.value(y);
                if (fy == 0)
                {
                    return 0.0;
                }
                double d = distance(x, y);
                if (d == 0)
                {
                    throw DomainError("synthesize: detector inside supp f");
                }
                return fy * (leading_term(scene, t, d, y) + part(y, d));
            });
    }
    return sum;
}

struct SupportBox
{
    Vec3 lo;
    Vec3 hi;
};

SupportBox support_box(AnalyticField const& f)
{
    double inf = std::numeric_limits<double>::infinity();
    SupportBox box{{inf, inf, inf}, {-inf, -inf, -inf}};
    for (auto const& b : f.supports())
    {
        box.lo = {std::min(box.lo.x, b.center.x - b.radius),
                  std::min(box.lo.y, b.center.y - b.radius),
                  std::min(box.lo.z, b.center.z - b.radius)};
        box.hi = {std::max(box.hi.x, b.center.x + b.radius),
                  std::max(box.hi.y, b.center.y + b.radius),
                  std::max(box.hi.z, b.center.z + b.radius)};
    }
    return box;
}

}  // namespace

DetectorSet DetectorSet::fibonacci(int n, double radius)
{
    if (n < 1 || !(radius > 0))
    {
        throw PreconditionError("fibonacci detectors need n >= 1 and radius > 0");
    }
    DetectorSet set;
    set.radius = radius;
    double golden = pi * (3 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i)
    {
        double z = 1 - (2.0 * i + 1) / n;
        double s = std::sqrt(std::max(0.0, 1 - z * z));
        double phi = golden * i;
        set.points.push_back(radius * Vec3{s * std::cos(phi), s * std::sin(phi), z});
    }
    return set;
}

std::vector<std::size_t> DetectorSet::nearest(Vec3 const& p, std::size_t k) const
{
    std::vector<std::size_t> idx(points.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
    {
        idx[i] = i;
    }
    k = std::min(k, idx.size());
    std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [&](std::size_t a, std::size_t b) {
        double da = distance(points[a], p);
        double db = distance(points[b], p);
        return da < db || (da == db && a < b);
    });
    idx.resize(k);
    return idx;
}

Sinogram3 MeasurementSet::sinogram(std::size_t x, std::size_t t) const
{
    Sinogram3 s = Sinogram3::zeros(planes.sampling, planes.offsets);
    std::size_t base = index(x, t, 0, 0);
    std::copy(values.begin() + base, values.begin() + base + s.values.size(), s.values.begin());
    return s;
}

std::vector<double> uniform_times(double t_min, double t_max, int n)
{
    if (n < 2 || !(t_max > t_min))
    {
        throw PreconditionError("uniform_times needs n >= 2 and t_max > t_min");
    }
    std::vector<double> out(n);
    for (int k = 0; k < n; ++k)
    {
        out[k] = t_min + (t_max - t_min) * k / (n - 1);
    }
    return out;
}

double max_support_bound(Scene const& scene, Vec3 const& x)
{
    double bound = 0;
    for (auto const& fb : scene.f.supports())
    {
        bound = std::max(bound, distance(fb.center, x) + fb.radius);
        for (auto const& pb : scene.perturbation_supports())
        {
            bound = std::max(bound,
                             distance(pb.center, x) + distance(pb.center, fb.center) + fb.radius
                                 + 2 * pb.radius);
        }
    }
    return bound;
}

double measurement_direct(Scene const& scene,
                          double t,
                          Vec3 const& x,
                          Plane const& plane,
                          SynthesisSpec const& spec)
{
    spec.kernel.validate();
    bool perturbed = has_perturbation(scene);
    return plane_entry(
        scene, t, x, plane, spec.plane_radial, spec.plane_angular, [&](Vec3 const& y, double) {
            if (!perturbed)
            {
                return 0.0;
            }
            auto k = kernel_eval(scene, t, x, y, spec.kernel);
            return k.alpha_term + k.rho_term_linear + k.rho_term_quadratic;
        });
}

MeasurementSet synthesize(Scene const& scene,
                          DetectorSet const& detectors,
                          std::vector<double> const& times,
                          PlaneFamily const& planes,
                          SynthesisSpec const& spec)
{
    check_inputs(scene, detectors, times, planes, spec);
    MeasurementSet out;
    out.detectors = detectors;
    out.times = times;
    out.planes = planes;
    std::size_t n_t = times.size();
    std::size_t n_dir = planes.n_directions();
    std::size_t n_off = planes.n_offsets();
    out.values.assign(detectors.size() * n_t * n_dir * n_off, 0.0);

    bool perturbed = has_perturbation(scene);

    // Cache lattice over the bounding cube of supp f
    SupportBox box = support_box(scene.f);
    Vec3 span = box.hi - box.lo;
    double width = std::max({span.x, span.y, span.z});
    int n = spec.cache_nodes;
    GridGeometry lattice{n, n, n, width / (n - 1), box.lo};
    std::vector<std::size_t> active;
    if (perturbed && spec.mode == SynthesisMode::cached)
    {
        double reach = lattice.h * std::sqrt(3.0);
        for (std::size_t p = 0; p < lattice.size(); ++p)
        {
            Vec3 y = lattice.point(p);
            for (auto const& b : scene.f.supports())
            {
                if (distance(y, b.center) < b.radius + reach)
                {
                    active.push_back(p);
                    break;
                }
            }
        }
    }

    for (std::size_t ix = 0; ix < detectors.size(); ++ix)
    {
        Vec3 const x = detectors.points[ix];
        std::vector<GridField3> cache;
        if (!active.empty())
        {
            std::vector<std::vector<double>> profiles(active.size());
            parallel_for(active.size(), [&](std::size_t a) {
                profiles[a] = kernel_integral_profile(
                    scene, x, lattice.point(active[a]), times, spec.profile);
            });
            cache.assign(n_t, GridField3(lattice));
            for (std::size_t a = 0; a < active.size(); ++a)
            {
                for (std::size_t k = 0; k < n_t; ++k)
                {
                    cache[k].values()[active[a]] = profiles[a][k];
                }
            }
        }

        std::size_t per_detector = n_t * n_dir * n_off;
        parallel_for(per_detector, [&](std::size_t flat) {
            std::size_t off = flat % n_off;
            std::size_t dir = (flat / n_off) % n_dir;
            std::size_t k = flat / (n_off * n_dir);
            double t = times[k];
            Plane plane(planes.offsets[off], planes.sampling.directions[dir]);
            double value = 0;
            if (!perturbed)
            {
                value = plane_entry(scene,
                                    t,
                                    x,
                                    plane,
                                    spec.plane_radial,
                                    spec.plane_angular,
                                    [](Vec3 const&, double) { return 0.0; });
            }
            else if (spec.mode == SynthesisMode::cached)
            {
                GridField3 const& g = cache[k];
                value = plane_entry(scene,
                                    t,
                                    x,
                                    plane,
                                    spec.plane_radial,
                                    spec.plane_angular,
                                    [&](Vec3 const& y, double) { return g.sample(y); });
            }
            else
            {
                value = measurement_direct(scene, t, x, plane, spec);
            }
            out.values[ix * per_detector + flat] = value;
        });
    }
    return out;
}

double kernel_volume_integral(Scene const& scene,
                              double t,
                              Vec3 const& x,
                              AnalyticField const& p0,
                              PressureSpec const& spec)
{
    if (!(t > 0))
    {
        throw PreconditionError("kernel_volume_integral: t must be positive");
    }
    bool perturbed = has_perturbation(scene);
    if (perturbed)
    {
        spec.kernel.validate();
    }
    double total = 0;
    for (auto const& bump : p0.bumps())
    {
        Ball ball = bump.support();
        double dist = distance(ball.center, x);
        double r_lo = std::max(0.0, dist - ball.radius);
        double r_hi = std::min(t, dist + ball.radius);
        total += gauss_integrate(
            [&](double r) {
                if (!(r > 0))
                {
                    return 0.0;
                }
                double shell = integrate_sphere_in_ball(
                    x, r, ball, spec.shell.n_polar, spec.shell.n_azimuth, [&](Vec3 const& w) {
                        Vec3 y = x + r * w;
                        double pv = bump.value(y);
                        if (pv == 0)
                        {
                            return 0.0;
                        }
                        double k = perturbed ? kernel_eval(scene, t, x, y, spec.kernel).total()
                                             : (t - r) * (t - r) / (8 * pi * r);
                        return k * pv;
                    });
                return r * r * shell;
            },
            r_lo,
            r_hi,
            spec.n_radial);
    }
    return total;
}

double pressure_first_order(Scene const& scene,
                            double t,
                            Vec3 const& x,
                            AnalyticField const& p0,
                            PressureSpec const& spec)
{
    double h = spec.step;
    if (!(h > 0) || !(t > 3 * h))
    {
        throw PreconditionError("pressure_first_order: need t > 3 * step > 0");
    }
    static constexpr double stencil[7] = {-1, 12, -39, 56, -39, 12, -1};
    double sum = 0;
    for (int i = 0; i < 7; ++i)
    {
        sum += stencil[i] * kernel_volume_integral(scene, t + (i - 3) * h, x, p0, spec);
    }
    return sum / (6 * h * h * h * h);
}

}  // namespace qpat
