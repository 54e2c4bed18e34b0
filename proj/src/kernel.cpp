#include "qpat/kernel.hpp"

#include <string>

namespace qpat
{
namespace
{
constexpr double pi = std::numbers::pi;

bool has_perturbation(Scene const& scene)
{
    return scene.epsilon != 0 && !(scene.alpha1.empty() && scene.rho1.empty());
}

void require_distinct(Vec3 const& x, Vec3 const& y)
{
    if (x == y)
    {
        throw DomainError("kernel requires distinct points x and y");
    }
}

double weighted_line(AnalyticField const& field,
                     Vec3 const& x,
                     Vec3 const& y,
                     int n_nodes,
                     FieldQuantity quantity,
                     bool tent)
{
    double d = distance(x, y);
    if (!tent)
    {
        return line_integral_weighted(
            field, Segment{x, y}, n_nodes, quantity, [](double) { return 1.0; });
    }
    return line_integral_weighted(field, Segment{x, y}, n_nodes, quantity, [d](double s) {
        return (1 - s / d) * s;
    });
}
}  // namespace

void QuadSpec::validate() const
{
    if (n_sum < 4 || n_diff < 4 || n_phi < 4)
    {
        throw PreconditionError("quadrature node counts must be at least 4");
    }
}

KernelTerms kernel_eval(Scene const& scene, double t, Vec3 const& x, Vec3 const& y, QuadSpec const& quad)
{
    require_distinct(x, y);
    quad.validate();
    if (t < 0)
    {
        throw PreconditionError("kernel_eval: t must be non-negative");
    }
    KernelTerms terms;
    double d = distance(x, y);
    if (!(t > d))
    {
        return terms;
    }
    double eps = scene.epsilon;
    terms.leading = (t - d) * (t - d) * (1 - eps * scene.alpha1.value(y)) / (8 * pi * d);
    if (!has_perturbation(scene))
    {
        return terms;
    }

    FocalChart chart(x, y);
    for (auto const& bump : scene.alpha1.bumps())
    {
        auto r = focal_integrate<1>(chart, d, t, bump.support(), quad, [&](Vec3 const& z, double, double) {
            return std::array<double, 1>{bump.value(z)};
        });
        terms.alpha_term += r[0];
    }
    terms.alpha_term *= eps / (16 * pi * pi);

    for (auto const& bump : scene.rho1.bumps())
    {
        auto r = focal_integrate<2>(
            chart, d, t, bump.support(), quad, [&](Vec3 const& z, double u, double r2) {
                if (!(r2 > 0))
                {
                    return std::array<double, 2>{0, 0};
                }
                double slack = std::max(t - u, 0.0);
                double g = dot(bump.gradient(z), z - y) / r2;
                return std::array<double, 2>{slack * g, slack * slack * g / r2};
            });
        terms.rho_term_linear += r[0];
        terms.rho_term_quadratic += r[1];
    }
    terms.rho_term_linear *= eps / (16 * pi * pi);
    terms.rho_term_quadratic *= eps / (32 * pi * pi);
    return terms;
}

namespace
{
// Moments over a u range: alpha value A; rho g times 1, u; g / r2 times 1, u, u^2
using Moments6 = std::array<double, 6>;

Moments6 profile_moments(Scene const& scene,
                         FocalChart const& chart,
                         double lo,
                         double hi,
                         QuadSpec const& quad)
{
    Moments6 m{};
    Vec3 const& y = chart.y();
    for (auto const& bump : scene.alpha1.bumps())
    {
        m[0] += focal_integrate<1>(chart, lo, hi, bump.support(), quad, [&](Vec3 const& z, double, double) {
            return std::array<double, 1>{bump.value(z)};
        })[0];
    }
    for (auto const& bump : scene.rho1.bumps())
    {
        auto r = focal_integrate<5>(chart, lo, hi, bump.support(), quad, [&](Vec3 const& z, double u, double r2) {
            if (!(r2 > 0))
            {
                return std::array<double, 5>{};
            }
            double g = dot(bump.gradient(z), z - y) / r2;
            double c = g / r2;
            return std::array<double, 5>{g, u * g, c, u * c, u * u * c};
        });
        for (int k = 0; k < 5; ++k)
        {
            m[k + 1] += r[k];
        }
    }
    return m;
}

double combine_moments(Moments6 const& m, double t, double eps)
{
    return eps / (16 * pi * pi) * (m[0] + t * m[1] - m[2])
           + eps / (32 * pi * pi) * (t * t * m[3] - 2 * t * m[4] + m[5]);
}
}  // namespace

std::vector<double> kernel_integral_profile(Scene const& scene,
                                            Vec3 const& x,
                                            Vec3 const& y,
                                            std::vector<double> const& t_grid,
                                            ProfileSpec const& spec)
{
    require_distinct(x, y);
    spec.box.validate();
    if (spec.panel_nodes < 2 || !(spec.max_panel_width > 0) || !(spec.duffy_reach >= 0))
    {
        throw PreconditionError("kernel_integral_profile: invalid panel settings");
    }
    std::vector<double> out(t_grid.size(), 0.0);
    if (!has_perturbation(scene))
    {
        return out;
    }
    FocalChart chart(x, y);
    double d = chart.focal_distance();
    double u_max = t_support_bound(scene, x, y);
    QuadSpec panel_quad = spec.box;
    panel_quad.n_sum = spec.panel_nodes;

    Moments6 acc{};
    double last = d;
    for (std::size_t k = 0; k < t_grid.size(); ++k)
    {
        double t = t_grid[k];
        if (k > 0 && t < t_grid[k - 1])
        {
            throw PreconditionError("kernel_integral_profile: times must ascend");
        }
        if (!(t > d))
        {
            continue;
        }
        double hi = std::min(t, u_max);
        if (hi > last)
        {
            if (last - d < spec.duffy_reach)
            {
                acc = profile_moments(scene, chart, d, hi, spec.box);
            }
            else
            {
                int pieces = static_cast<int>(std::ceil((hi - last) / spec.max_panel_width));
                double w = (hi - last) / pieces;
                for (int p = 0; p < pieces; ++p)
                {
                    double lo_p = last + p * w;
                    double hi_p = p + 1 == pieces ? hi : last + (p + 1) * w;
                    auto m = profile_moments(scene, chart, lo_p, hi_p, panel_quad);
                    for (int n = 0; n < 6; ++n)
                    {
                        acc[n] += m[n];
                    }
                }
            }
            last = hi;
        }
        out[k] = combine_moments(acc, t, scene.epsilon);
    }
    return out;
}

double t_support_bound(Scene const& scene, Vec3 const& x, Vec3 const& y)
{
    require_distinct(x, y);
    double bound = distance(x, y);
    for (auto const& ball : scene.perturbation_supports())
    {
        bound = std::max(bound,
                         distance(ball.center, x) + distance(ball.center, y) + 2 * ball.radius);
    }
    return bound;
}

LargeTimePolynomial kernel_large_t_coefficients(Scene const& scene,
                                                Vec3 const& x,
                                                Vec3 const& y,
                                                RayQuadSpec const& spec)
{
    require_distinct(x, y);
    double d = distance(x, y);
    double eps = scene.epsilon;
    double a_y = scene.alpha1.value(y);
    double r_y = scene.rho1.value(y);

    // W1 = int alpha1 / (r1 r2), W2 = int g / (r1 r2^2), W3 = int (r1^2 - r2^2) g / (r1 r2^2)
    double w1 = 0;
    double w2 = 0;
    double w3 = 0;
    for (auto const& bump : scene.alpha1.bumps())
    {
        w1 += integrate_ball_about(y, bump.support(), spec, [&](Vec3 const& z, double r, Vec3 const&) {
            return bump.value(z) / (r * distance(z, x));
        });
    }
    for (auto const& bump : scene.rho1.bumps())
    {
        w2 += integrate_ball_about(y, bump.support(), spec, [&](Vec3 const& z, double r, Vec3 const& w) {
            return dot(bump.gradient(z), w) / (r * r * distance(z, x));
        });
        w3 += integrate_ball_about(y, bump.support(), spec, [&](Vec3 const& z, double r, Vec3 const& w) {
            double r1 = distance(z, x);
            return (r1 * r1 - r * r) * dot(bump.gradient(z), w) / (r * r * r1);
        });
    }

    LargeTimePolynomial poly;
    poly.c2 = (1 - eps * a_y) / (8 * pi * d) + eps * w2 / (32 * pi * pi);
    poly.c1 = -(1 - eps * (a_y + r_y)) / (4 * pi);
    poly.c0 = d * (1 - eps * a_y) / (8 * pi) + eps * w1 / (16 * pi * pi)
              + eps * w3 / (32 * pi * pi);
    return poly;
}

double kernel_large_t(Scene const& scene, double t, Vec3 const& x, Vec3 const& y, RayQuadSpec const& spec)
{
    double bound = t_support_bound(scene, x, y);
    if (t < bound)
    {
        throw PreconditionError("kernel_large_t: t = " + std::to_string(t)
                                + " is below the support bound " + std::to_string(bound));
    }
    return kernel_large_t_coefficients(scene, x, y, spec)(t);
}

double gradient_potential_integral(AnalyticField const& psi, Vec3 const& y, RayQuadSpec const& spec)
{
    double sum = 0;
    for (auto const& bump : psi.bumps())
    {
        // r^2 of the volume element cancels |z - y|^2
        sum += integrate_ball_about(y, bump.support(), spec, [&](Vec3 const& z, double r, Vec3 const& w) {
            return dot(bump.gradient(z), w) / (r * r);
        });
    }
    return sum / (16 * pi * pi);
}

double large_t_linear_coefficient_unsimplified(Scene const& scene, Vec3 const& y, RayQuadSpec const& spec)
{
    double eps = scene.epsilon;
    return -((1 - eps * scene.alpha1.value(y)) / (4 * pi)
             + eps * gradient_potential_integral(scene.rho1, y, spec));
}

double kernel_dt_limit(Scene const& scene, Vec3 const& x, Vec3 const& y, int n_nodes)
{
    require_distinct(x, y);
    double d = distance(x, y);
    return scene.epsilon * weighted_line(scene.alpha1, x, y, n_nodes, FieldQuantity::value, false)
           / (8 * pi * d);
}

double kernel_dtt_limit(Scene const& scene, Vec3 const& x, Vec3 const& y, int n_nodes)
{
    require_distinct(x, y);
    double d = distance(x, y);
    double eps = scene.epsilon;
    double lap = weighted_line(scene.alpha1, x, y, n_nodes, FieldQuantity::laplacian, true);
    return (1 - eps * scene.alpha1.value(y)) / (4 * pi * d)
           + eps * (scene.rho1.value(x) - scene.rho1.value(y)) / (8 * pi * d)
           + eps * lap / (16 * pi * d);
}

ExpansionCoeffs f_expansion_coeffs(AnalyticField const& psi, Vec3 const& x, Vec3 const& y, int n_nodes)
{
    require_distinct(x, y);
    double d = distance(x, y);
    ExpansionCoeffs c;
    c.c1 = 2 * pi / d * weighted_line(psi, x, y, n_nodes, FieldQuantity::value, false);
    c.c2 = pi / d * weighted_line(psi, x, y, n_nodes, FieldQuantity::laplacian, true);
    return c;
}

double spheroid_integral(AnalyticField const& psi, double t, Vec3 const& x, Vec3 const& y, QuadSpec const& quad)
{
    require_distinct(x, y);
    quad.validate();
    if (!(t > distance(x, y)))
    {
        return 0;
    }
    FocalChart chart(x, y);
    double d = chart.focal_distance();
    double sum = 0;
    for (auto const& bump : psi.bumps())
    {
        sum += focal_integrate<1>(chart, d, t, bump.support(), quad, [&](Vec3 const& z, double, double) {
            return std::array<double, 1>{bump.value(z)};
        })[0];
    }
    return sum;
}

double p0_spherical_means(AnalyticField const& p0, double t, Vec3 const& x, SphereQuadSpec const& quad)
{
    if (!(t > 0))
    {
        throw PreconditionError("spherical means need t > 0");
    }
    double sum = 0;
    for (auto const& bump : p0.bumps())
    {
        sum += integrate_sphere_in_ball(
            x, t, bump.support(), quad.n_polar, quad.n_azimuth, [&](Vec3 const& w) {
                Vec3 z = x + t * w;
                return bump.value(z) + t * dot(bump.gradient(z), w);
            });
    }
    return sum / (4 * pi);
}

}  // namespace qpat
