#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "qpat/geometry.hpp"

namespace qpat
{
//! Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule
{
    std::vector<double> nodes;
    std::vector<double> weights;
};

//! Cached n-point Gauss-Legendre rule (n >= 1). Thread safe.
GaussRule const& gauss_legendre(int n);

//! n-point Gauss-Legendre approximation of int_a^b f.
template<class F>
double gauss_integrate(F&& f, double a, double b, int n)
{
    if (!(b > a))
    {
        return 0;
    }
    auto const& rule = gauss_legendre(n);
    double half = 0.5 * (b - a);
    double mid = 0.5 * (b + a);
    double sum = 0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    {
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    }
    return half * sum;
}

//! Node count for a periodic trapezoid rule in the quadrature specs below.
struct RayQuadSpec
{
    int n_radial{48};
    int n_polar{48};
    int n_azimuth{32};
};

//---------------------------------------------------------------------------//
/*!
 * Integrate over ball ∩ B_{r_cap}(p) in spherical coordinates centered at p.
 *
 * `f(z, r, omega)` is the integrand at z = p + r omega; the r^2 volume factor
 * is applied here, so integrable 1/|z - p|^2 singularities are removed.
 * Directions are restricted to the cone subtended by the ball when p lies
 * outside it.
 */
template<class F>
double integrate_ball_about(Vec3 const& p,
                            Ball const& ball,
                            RayQuadSpec const& spec,
                            F&& f,
                            double r_cap = std::numeric_limits<double>::infinity())
{
    Vec3 w = ball.center - p;
    double dist = norm(w);
    double rad = ball.radius;
    bool inside = dist < rad;
    Frame frame = dist > 0 ? frame_about(w) : Frame{{0, 0, 1}, {1, 0, 0}, {0, 1, 0}};

    double mu_lo = inside ? -1.0 : std::sqrt(std::max(0.0, 1 - rad * rad / (dist * dist)));
    auto const& polar = gauss_legendre(spec.n_polar);
    auto const& radial = gauss_legendre(spec.n_radial);
    double dphi = 2 * std::numbers::pi / spec.n_azimuth;
    double mu_half = 0.5 * (1 - mu_lo);
    double mu_mid = 0.5 * (1 + mu_lo);

    double total = 0;
    for (std::size_t ip = 0; ip < polar.nodes.size(); ++ip)
    {
        double mu = mu_mid + mu_half * polar.nodes[ip];
        double sin_t = std::sqrt(std::max(0.0, 1 - mu * mu));
        // Chord of the ray along this polar angle (independent of azimuth)
        double proj = dist * mu;
        double disc = rad * rad - dist * dist * (1 - mu * mu);
        if (disc <= 0)
        {
            continue;
        }
        double root = std::sqrt(disc);
        double r_in = inside ? 0.0 : std::max(0.0, proj - root);
        double r_out = std::min(proj + root, r_cap);
        if (!(r_out > r_in))
        {
            continue;
        }
        double r_half = 0.5 * (r_out - r_in);
        double r_mid = 0.5 * (r_out + r_in);
        double ring = 0;
        for (int ia = 0; ia < spec.n_azimuth; ++ia)
        {
            double phi = (ia + 0.5) * dphi;
            Vec3 omega = mu * frame.e1
                         + sin_t * (std::cos(phi) * frame.e2 + std::sin(phi) * frame.e3);
            double ray = 0;
            for (std::size_t ir = 0; ir < radial.nodes.size(); ++ir)
            {
                double r = r_mid + r_half * radial.nodes[ir];
                ray += radial.weights[ir] * r * r * f(p + r * omega, r, omega);
            }
            ring += ray * r_half;
        }
        total += polar.weights[ip] * ring * dphi;
    }
    return total * mu_half;
}

//---------------------------------------------------------------------------//
/*!
 * Integrate f(omega) over the directions omega in S^2 for which x + t omega
 * lies in `ball` (surface measure of the unit sphere).
 */
template<class F>
double integrate_sphere_in_ball(
    Vec3 const& x, double t, Ball const& ball, int n_polar, int n_azimuth, F&& f)
{
    Vec3 w = ball.center - x;
    double dist = norm(w);
    double rad = ball.radius;
    double mu_lo;
    Frame frame{{0, 0, 1}, {1, 0, 0}, {0, 1, 0}};
    if (dist == 0)
    {
        if (t >= rad)
        {
            return 0;
        }
        mu_lo = -1;
    }
    else
    {
        frame = frame_about(w);
        double kappa = (t * t + dist * dist - rad * rad) / (2 * t * dist);
        if (kappa >= 1)
        {
            return 0;
        }
        mu_lo = std::max(kappa, -1.0);
    }
    auto const& polar = gauss_legendre(n_polar);
    double dphi = 2 * std::numbers::pi / n_azimuth;
    double mu_half = 0.5 * (1 - mu_lo);
    double mu_mid = 0.5 * (1 + mu_lo);
    double total = 0;
    for (std::size_t ip = 0; ip < polar.nodes.size(); ++ip)
    {
        double mu = mu_mid + mu_half * polar.nodes[ip];
        double sin_t = std::sqrt(std::max(0.0, 1 - mu * mu));
        double ring = 0;
        for (int ia = 0; ia < n_azimuth; ++ia)
        {
            double phi = (ia + 0.5) * dphi;
            ring += f(mu * frame.e1
                      + sin_t * (std::cos(phi) * frame.e2 + std::sin(phi) * frame.e3));
        }
        total += polar.weights[ip] * ring * dphi;
    }
    return total * mu_half;
}

//---------------------------------------------------------------------------//
/*!
 * Integrate f(point) over plane ∩ ball ∩ {|point - pole| <= rho_cap} in polar
 * coordinates centered at `pole` (projected onto the plane).
 *
 * Centering at the pole makes radially symmetric factors about it (and a
 * cutoff at rho_cap) exact in the angular direction.
 */
template<class F>
double integrate_plane_in_ball(Plane const& plane,
                               Ball const& ball,
                               Vec3 const& pole,
                               double rho_cap,
                               int n_radial,
                               int n_angular,
                               F&& f)
{
    double s = plane.signed_distance(ball.center);
    double rad_sq = ball.radius * ball.radius - s * s;
    if (rad_sq <= 0 || !(rho_cap > 0))
    {
        return 0;
    }
    double a = std::sqrt(rad_sq);
    Vec3 q = ball.center - s * plane.theta;
    Vec3 p = plane.foot_of(pole);
    Frame frame = frame_about(plane.theta);
    Vec3 w = q - p;
    double wu = dot(w, frame.e2);
    double wv = dot(w, frame.e3);
    double dist = std::hypot(wu, wv);
    bool inside = dist < a;

    auto const& radial = gauss_legendre(n_radial);
    auto ray = [&](double psi) {
        double c = std::cos(psi);
        double sn = std::sin(psi);
        double proj = wu * c + wv * sn;
        double disc = a * a - (dist * dist - proj * proj);
        if (disc <= 0)
        {
            return 0.0;
        }
        double root = std::sqrt(disc);
        double lo = inside ? 0.0 : std::max(0.0, proj - root);
        double hi = std::min(proj + root, rho_cap);
        if (!(hi > lo))
        {
            return 0.0;
        }
        Vec3 dir = c * frame.e2 + sn * frame.e3;
        double half = 0.5 * (hi - lo);
        double mid = 0.5 * (hi + lo);
        double sum = 0;
        for (std::size_t i = 0; i < radial.nodes.size(); ++i)
        {
            double rho = mid + half * radial.nodes[i];
            sum += radial.weights[i] * rho * f(p + rho * dir);
        }
        return sum * half;
    };

    if (inside)
    {
        double dpsi = 2 * std::numbers::pi / n_angular;
        double total = 0;
        for (int i = 0; i < n_angular; ++i)
        {
            total += ray((i + 0.5) * dpsi);
        }
        return total * dpsi;
    }
    double center = std::atan2(wv, wu);
    double half_width = std::asin(std::min(1.0, a / dist));
    return gauss_integrate(ray, center - half_width, center + half_width, n_angular);
}

}  // namespace qpat
