#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "qpat/geometry.hpp"
#include "qpat/kernel.hpp"
#include "qpat/phantom.hpp"

namespace qpat
{
// Slow reference implementations. They share no quadrature code with the
// production kernel and transform paths.

struct OracleConfig
{
    std::size_t sample_count{1000000};
    std::uint64_t rng_seed{20240917};
    int grid_resolution{96};

    void validate() const;
};

struct McEstimate
{
    double estimate{0};
    double std_error{0};
};

//! One piece of a Monte-Carlo integral: integrand supported inside `region`.
struct McTerm
{
    Ball region;
    std::function<double(Vec3 const&)> integrand;
};

/*!
 * Monte-Carlo integral over the spheroid of a sum of localized integrands.
 *
 * Points are drawn about the focus y with density proportional to
 * 1 / |z - y|^2 (uniform direction in the cone subtending each region,
 * uniform distance across its radial shell), which cancels integrable
 * singularities at y; the spheroid is enforced by rejection.
 */
McEstimate mc_spheroid_integral(Spheroid const& spheroid,
                                std::vector<McTerm> const& terms,
                                OracleConfig const& cfg);

//! Single integrand sampled over the ball circumscribing the spheroid.
McEstimate mc_spheroid_integral(std::function<double(Vec3 const&)> const& integrand,
                                Spheroid const& spheroid,
                                OracleConfig const& cfg);

//! Monte-Carlo estimate of the three spheroid integrals of the kernel
//! (everything except the closed-form leading term).
McEstimate mc_kernel_integrals(Scene const& scene,
                               double t,
                               Vec3 const& x,
                               Vec3 const& y,
                               OracleConfig const& cfg);

//! Same, restricted to the alpha1 spheroid integral.
McEstimate mc_kernel_alpha_term(Scene const& scene,
                                double t,
                                Vec3 const& x,
                                Vec3 const& y,
                                OracleConfig const& cfg);

//! F(t) = int_{E_t} psi / (r1 r2) by dense focal quadrature.
double f_direct(AnalyticField const& psi, Vec3 const& x, Vec3 const& y, double t, OracleConfig const& cfg);

//! Adaptive Gauss-Kronrod integral of a 1D function.
double adaptive_integrate(std::function<double(double)> const& f,
                          double a,
                          double b,
                          double rel_tol = 1e-12);

//! Adaptive line integral of a field over a segment.
double adaptive_line_integral(AnalyticField const& field, Segment const& seg, double rel_tol = 1e-12);

/*!
 * Newton potential (1 / 4 pi) int lap psi(z) / |z - y| dz by a midpoint rule
 * on a cube lattice with grid_resolution cells across each support ball,
 * placed so y sits at a cell corner.
 */
double grid_newton_potential(AnalyticField const& psi, Vec3 const& y, OracleConfig const& cfg);

/*!
 * Radial wave solution: P0 = phi(|z - c|) gives
 * d/dt[(1 / 4 pi t) int_{|z-x|=t} P0] = ((r+t) phi(r+t) + (r-t) phi(|r-t|)) / (2r)
 * with r = |x - c| > 0 and phi even-extended.
 */
double radial_dalembert(std::function<double(double)> const& phi, double r, double t);

/*!
 * Plane integral of y -> (t - |y-x|)_+^2 / (8 pi |y-x|) f(y) by nested
 * adaptive quadrature in polar coordinates about the foot of x.
 */
double plane_free_kernel_integral(AnalyticField const& f,
                                  Plane const& plane,
                                  Vec3 const& x,
                                  double t,
                                  double rel_tol = 1e-10);

//---------------------------------------------------------------------------//
// Richardson extrapolation
//---------------------------------------------------------------------------//

/*!
 * Extrapolate values v_i = A + c_p h_i^p + c_{p+1} h_i^{p+1} + ... taken at
 * h_i = h_0 / 2^i (finest last or first, any order as long as the ratio is 2).
 */
double richardson(std::vector<double> const& h, std::vector<double> const& v, int first_order);

//! lim dK/dt at t -> |y-x|+ from K(d + delta) / delta, delta in `deltas`.
double kernel_dt_richardson(Scene const& scene,
                            Vec3 const& x,
                            Vec3 const& y,
                            std::vector<double> const& deltas,
                            QuadSpec const& quad);

//! lim d^2K/dt^2 from (K(d + 2 delta) - 2 K(d + delta)) / delta^2.
double kernel_dtt_richardson(Scene const& scene,
                             Vec3 const& x,
                             Vec3 const& y,
                             std::vector<double> const& deltas,
                             QuadSpec const& quad);

}  // namespace qpat
