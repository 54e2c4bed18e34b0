#pragma once

#include <cmath>
#include <vector>

#include "qpat/geometry.hpp"
#include "qpat/quadrature.hpp"

namespace qpat
{
//---------------------------------------------------------------------------//
/*!
 * Smooth compactly supported bump A exp(1 - 1/(1 - |p - c|^2 / R^2)).
 *
 * Value, gradient and Laplacian are analytic and vanish identically outside
 * the open ball B_R(c).
 */
struct Bump
{
    Vec3 center;
    double radius{1};
    double amplitude{1};

    double value(Vec3 const& p) const
    {
        double q = norm_sq(p - center) / (radius * radius);
        if (q >= 1)
        {
            return 0;
        }
        return amplitude * std::exp(1 - 1 / (1 - q));
    }

    Vec3 gradient(Vec3 const& p) const
    {
        Vec3 w = p - center;
        double r2 = radius * radius;
        double q = norm_sq(w) / r2;
        if (q >= 1)
        {
            return {};
        }
        double s = 1 / (1 - q);
        double v = amplitude * std::exp(1 - s);
        return (-2 * v * s * s / r2) * w;
    }

    double laplacian(Vec3 const& p) const
    {
        double r2 = radius * radius;
        double q = norm_sq(p - center) / r2;
        if (q >= 1)
        {
            return 0;
        }
        double s = 1 / (1 - q);
        double v = amplitude * std::exp(1 - s);
        double s2 = s * s;
        return v * s2 * ((s2 - 2 * s) * 4 * q - 6) / r2;
    }

    Ball support() const { return {center, radius}; }
};

//! Quantity of a field sampled by line integrals.
enum class FieldQuantity
{
    value,
    laplacian
};

//---------------------------------------------------------------------------//
/*!
 * Finite sum of bumps with exact derivatives.
 */
class AnalyticField
{
  public:
    AnalyticField() = default;
    explicit AnalyticField(std::vector<Bump> bumps);

    double value(Vec3 const& p) const
    {
        double sum = 0;
        for (auto const& b : bumps_)
        {
            sum += b.value(p);
        }
        return sum;
    }
    Vec3 gradient(Vec3 const& p) const
    {
        Vec3 sum;
        for (auto const& b : bumps_)
        {
            sum += b.gradient(p);
        }
        return sum;
    }
    double laplacian(Vec3 const& p) const
    {
        double sum = 0;
        for (auto const& b : bumps_)
        {
            sum += b.laplacian(p);
        }
        return sum;
    }
    double operator()(Vec3 const& p) const { return value(p); }

    std::vector<Bump> const& bumps() const { return bumps_; }
    std::vector<Ball> supports() const;
    bool empty() const { return bumps_.empty(); }
    bool in_support(Vec3 const& p) const;

    //! Upper bound on max |value| (sum of |amplitude|).
    double max_abs_bound() const;

    AnalyticField scaled(double factor) const;

  private:
    std::vector<Bump> bumps_;
};

//---------------------------------------------------------------------------//
/*!
 * Ground truth of a run: absorbed-energy source f and the perturbations of
 * sound speed (alpha1) and density (rho1), with alpha0 = rho0 = 1.
 */
struct Scene
{
    AnalyticField f;
    AnalyticField alpha1;
    AnalyticField rho1;
    double epsilon{0.05};
    double omega_radius{1.2};  //!< Omega: origin ball containing supp f
    double sigma_radius{3.0};  //!< detector sphere radius

    //! Check support nesting (perturbation balls inside some f ball with
    //! `margin`), supp f inside Omega, Omega inside Sigma, and positivity of
    //! the perturbed parameters. Throws PreconditionError.
    void validate(double margin = 0.05) const;

    //! Support balls of alpha1 and rho1 together.
    std::vector<Ball> perturbation_supports() const;

    //! The desk-scale default: f bump R=1 at the origin; alpha1 and rho1
    //! bumps R=0.35 at (+-0.3, 0, 0); eps=0.05; Omega 1.2; Sigma 3.
    static Scene default_scene();
};

//---------------------------------------------------------------------------//
// Line integrals
//---------------------------------------------------------------------------//

//! Gauss-Legendre line integral of `field` over `seg`, n_nodes per bump chord.
double line_integral(AnalyticField const& field, Segment const& seg, int n_nodes);

/*!
 * int_seg w(s) Q(z(s)) ds with s the arc length from seg.a and Q the chosen
 * field quantity; each bump is integrated over its own chord.
 */
template<class W>
double line_integral_weighted(AnalyticField const& field,
                              Segment const& seg,
                              int n_nodes,
                              FieldQuantity quantity,
                              W&& weight)
{
    double len = seg.length();
    if (len == 0)
    {
        return 0;
    }
    Vec3 dir = (seg.b - seg.a) / len;
    double total = 0;
    for (auto const& bump : field.bumps())
    {
        auto [lo, hi] = chord_interval(seg, bump.support());
        if (!(hi > lo))
        {
            continue;
        }
        total += gauss_integrate(
            [&](double s) {
                Vec3 z = seg.a + s * dir;
                double q = quantity == FieldQuantity::value ? bump.value(z)
                                                             : bump.laplacian(z);
                return weight(s) * q;
            },
            lo,
            hi,
            n_nodes);
    }
    return total;
}

/*!
 * Composite Gauss-Legendre line integral of an arbitrary sampled function,
 * int_seg w(s) g(z(s)) ds, using panels no longer than `panel_length`.
 */
template<class G, class W>
double line_integral_sampled(
    G&& g, Segment const& seg, double panel_length, int nodes_per_panel, W&& weight)
{
    double len = seg.length();
    if (len == 0)
    {
        return 0;
    }
    Vec3 dir = (seg.b - seg.a) / len;
    int panels = std::max(1, static_cast<int>(std::ceil(len / panel_length)));
    double step = len / panels;
    double total = 0;
    for (int k = 0; k < panels; ++k)
    {
        total += gauss_integrate(
            [&](double s) { return weight(s) * g(seg.a + s * dir); },
            k * step,
            (k + 1) * step,
            nodes_per_panel);
    }
    return total;
}

}  // namespace qpat
