#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "qpat/geometry.hpp"
#include "qpat/phantom.hpp"
#include "qpat/quadrature.hpp"

namespace qpat
{
//---------------------------------------------------------------------------//
/*!
 * Node counts for spheroid integrals in focal sum/difference coordinates.
 *
 * The spheroid is parameterized by u = r1 + r2 in [|y-x|, t], v = r1 - r2 in
 * [-|y-x|, |y-x|] and the rotation angle phi, so each support ball maps to a
 * rectangle in (u, v). Gauss-Legendre is used in u and v, a periodic
 * trapezoid (or Gauss-Legendre over a clipped sector) in phi.
 */
struct QuadSpec
{
    int n_sum{48};
    int n_diff{48};
    int n_phi{32};

    void validate() const;
};

//! The four additive pieces of the Born kernel.
struct KernelTerms
{
    double leading{0};             //!< (t-d)^2 (1 - eps alpha1(y)) / (8 pi d)
    double alpha_term{0};          //!< eps alpha1 / (16 pi^2 r1 r2)
    double rho_term_linear{0};     //!< (t - r1 - r2) eps g / (16 pi^2 r1 r2)
    double rho_term_quadratic{0};  //!< (t - r1 - r2)^2 eps g / (32 pi^2 r1 r2^2)

    double total() const
    {
        return leading + alpha_term + rho_term_linear + rho_term_quadratic;
    }
};

//---------------------------------------------------------------------------//
/*!
 * Integrate f over {u_lo <= r1 + r2 <= u_hi} ∩ {u, v box of `ball`} against
 * dz / (r1 r2).
 *
 * f(z, u, r2) returns std::array<double, N>; the result is the array of
 * integrals. When the box reaches the corner z = y (u = v = |y - x|) it is
 * resolved by a Duffy split so integrands behaving like 1/r2 stay accurate.
 */
template<std::size_t N, class F>
std::array<double, N> focal_integrate(FocalChart const& chart,
                                      double u_lo,
                                      double u_hi,
                                      Ball const& ball,
                                      QuadSpec const& quad,
                                      F&& f)
{
    std::array<double, N> total{};
    double d = chart.focal_distance();
    double a = distance(ball.center, chart.x());
    double b = distance(ball.center, chart.y());
    double rad = ball.radius;
    double u0 = std::max({d, u_lo, a + b - 2 * rad});
    double u1 = std::min(u_hi, a + b + 2 * rad);
    double v0 = std::max(-d, a - b - 2 * rad);
    double v1 = std::min(d, a - b + 2 * rad);
    if (!(u1 > u0) || !(v1 > v0))
    {
        return total;
    }
    bool corner = (u0 == d) && (v1 == d);

    // Angular nodes
    std::vector<double> phis;
    std::vector<double> phi_w;
    auto cyl = chart.cylindrical(ball.center);
    if (cyl.radial > rad)
    {
        double half = std::asin(rad / cyl.radial);
        auto const& rule = gauss_legendre(quad.n_phi);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        {
            phis.push_back(cyl.angle + half * rule.nodes[i]);
            phi_w.push_back(half * rule.weights[i]);
        }
    }
    else
    {
        double step = 2 * std::numbers::pi / quad.n_phi;
        for (int i = 0; i < quad.n_phi; ++i)
        {
            phis.push_back((i + 0.5) * step);
            phi_w.push_back(step);
        }
    }
    std::vector<Vec3> radial_dirs(phis.size());
    Frame const& fr = chart.frame();
    for (std::size_t k = 0; k < phis.size(); ++k)
    {
        radial_dirs[k] = std::cos(phis[k]) * fr.e2 + std::sin(phis[k]) * fr.e3;
    }
    Vec3 mid = 0.5 * (chart.x() + chart.y());

    // Accumulate one (u, v) node given the offsets du = u - d, dv = d - v
    auto node = [&](double du, double dv, double weight) {
        double u = d + du;
        double v = d - dv;
        double xi = u * v / (2 * d);
        double eta_sq = du * (u + d) * dv * (d + v) / (4 * d * d);
        double eta = std::sqrt(std::max(eta_sq, 0.0));
        double r2 = 0.5 * (du + dv);
        Vec3 base = mid + xi * fr.e1;
        for (std::size_t k = 0; k < phis.size(); ++k)
        {
            auto val = f(base + eta * radial_dirs[k], u, r2);
            double w = weight * phi_w[k];
            for (std::size_t n = 0; n < N; ++n)
            {
                total[n] += w * val[n];
            }
        }
    };

    auto const& ru = gauss_legendre(quad.n_sum);
    auto const& rv = gauss_legendre(quad.n_diff);
    double scale = 1 / (2 * d);
    if (corner)
    {
        double big_a = u1 - d;
        double big_b = d - v0;
        for (std::size_t i = 0; i < ru.nodes.size(); ++i)
        {
            double p = 0.5 * (1 + ru.nodes[i]);
            for (std::size_t j = 0; j < rv.nodes.size(); ++j)
            {
                double q = 0.5 * (1 + rv.nodes[j]);
                double w = 0.25 * ru.weights[i] * rv.weights[j] * big_a * big_b * p * scale;
                node(big_a * p, big_b * p * q, w);
                node(big_a * p * q, big_b * p, w);
            }
        }
        return total;
    }
    double uh = 0.5 * (u1 - u0);
    double um = 0.5 * (u1 + u0);
    double vh = 0.5 * (v1 - v0);
    double vm = 0.5 * (v1 + v0);
    for (std::size_t i = 0; i < ru.nodes.size(); ++i)
    {
        double u = um + uh * ru.nodes[i];
        for (std::size_t j = 0; j < rv.nodes.size(); ++j)
        {
            double v = vm + vh * rv.nodes[j];
            node(u - d, d - v, ru.weights[i] * rv.weights[j] * uh * vh * scale);
        }
    }
    return total;
}

//---------------------------------------------------------------------------//
// Kernel evaluation
//---------------------------------------------------------------------------//

/*!
 * Born kernel K(t, x, y; eps) split into its additive terms.
 *
 * All terms vanish for t <= |y - x|. With eps = 0 or no perturbations the
 * closed form (t - d)^2 / (8 pi d) is returned without quadrature.
 */
KernelTerms kernel_eval(Scene const& scene,
                        double t,
                        Vec3 const& x,
                        Vec3 const& y,
                        QuadSpec const& quad = {});

/*!
 * Sum of the three spheroid-integral terms of the kernel at every t of an
 * ascending grid, for one (x, y) pair.
 *
 * The integrands are accumulated in u = r1 + r2 panels between consecutive
 * grid times as moments in u, so the (t - u) and (t - u)^2 factors are applied
 * exactly. Times within `duffy_reach` of |y - x| (and the first panel after
 * them) use a full corner-resolved box instead.
 */
struct ProfileSpec
{
    QuadSpec box{};
    int panel_nodes{8};
    double max_panel_width{0.1};
    double duffy_reach{0.2};
};
std::vector<double> kernel_integral_profile(Scene const& scene,
                                            Vec3 const& x,
                                            Vec3 const& y,
                                            std::vector<double> const& t_grid,
                                            ProfileSpec const& spec = {});

//! Upper bound of |z-x| + |z-y| over the perturbation supports.
double t_support_bound(Scene const& scene, Vec3 const& x, Vec3 const& y);

//! Coefficients of K = c2 t^2 + c1 t + c0 valid once t >= t_support_bound.
struct LargeTimePolynomial
{
    double c2{0};
    double c1{0};
    double c0{0};

    double operator()(double t) const { return (c2 * t + c1) * t + c0; }
};

//! Whole-space integrals by spherical quadrature about y.
LargeTimePolynomial kernel_large_t_coefficients(Scene const& scene,
                                                Vec3 const& x,
                                                Vec3 const& y,
                                                RayQuadSpec const& spec = {});

//! Closed-form large-time kernel. Throws PreconditionError below the bound.
double kernel_large_t(Scene const& scene,
                      double t,
                      Vec3 const& x,
                      Vec3 const& y,
                      RayQuadSpec const& spec = {});

/*!
 * Coefficient of t before simplification:
 * -((1 - eps alpha1(y)) / (4 pi) + eps/(16 pi^2) int grad rho1 . (z-y)/|z-y|^3).
 */
double large_t_linear_coefficient_unsimplified(Scene const& scene,
                                               Vec3 const& y,
                                               RayQuadSpec const& spec = {});

//! (1 / (16 pi^2)) int grad psi(z) . (z - y) / |z - y|^3 dz.
double gradient_potential_integral(AnalyticField const& psi,
                                   Vec3 const& y,
                                   RayQuadSpec const& spec = {});

//! lim_{t -> |y-x|+} dK/dt.
double kernel_dt_limit(Scene const& scene, Vec3 const& x, Vec3 const& y, int n_nodes = 64);

//! lim_{t -> |y-x|+} d^2K/dt^2.
double kernel_dtt_limit(Scene const& scene, Vec3 const& x, Vec3 const& y, int n_nodes = 64);

/*!
 * Expansion F(t) = c1 delta + (c2 / 2) delta^2 + o(delta^2), delta = t - |y-x|,
 * of F(t) = int_{E_t} psi / (r1 r2). c1 = F'(|y-x|), c2 = F''(|y-x|).
 */
struct ExpansionCoeffs
{
    double c1{0};
    double c2{0};
};
ExpansionCoeffs f_expansion_coeffs(AnalyticField const& psi,
                                   Vec3 const& x,
                                   Vec3 const& y,
                                   int n_nodes = 64);

//! Spheroid integral F(t) = int_{E_t} psi / (r1 r2) dz in focal coordinates.
double spheroid_integral(AnalyticField const& psi,
                         double t,
                         Vec3 const& x,
                         Vec3 const& y,
                         QuadSpec const& quad = {});

//! Sphere-rule resolution for spherical means.
struct SphereQuadSpec
{
    int n_polar{64};
    int n_azimuth{64};
};

/*!
 * Zeroth-order pressure d/dt[(1 / (4 pi t)) int_{|z-x|=t} P0 ds]
 * = (1 / 4 pi) int_{S^2} (P0(x + t w) + t grad P0(x + t w) . w) dw.
 */
double p0_spherical_means(AnalyticField const& p0,
                          double t,
                          Vec3 const& x,
                          SphereQuadSpec const& quad = {});

}  // namespace qpat
