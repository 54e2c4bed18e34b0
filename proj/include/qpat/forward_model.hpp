#pragma once

#include <vector>

#include "qpat/geometry.hpp"
#include "qpat/grid.hpp"
#include "qpat/kernel.hpp"
#include "qpat/phantom.hpp"
#include "qpat/transforms.hpp"

namespace qpat
{
//! Detector points on the sphere of radius `radius` about the origin.
struct DetectorSet
{
    double radius{3};
    std::vector<Vec3> points;

    std::size_t size() const { return points.size(); }

    //! Golden-angle spiral with n points.
    static DetectorSet fibonacci(int n, double radius);

    //! Indices of the k points closest to p, nearest first.
    std::vector<std::size_t> nearest(Vec3 const& p, std::size_t k) const;
};

//! Illumination planes: hemisphere directions times signed offsets.
struct PlaneFamily
{
    HemisphereSampling sampling;
    std::vector<double> offsets;

    std::size_t n_directions() const { return sampling.directions.size(); }
    std::size_t n_offsets() const { return offsets.size(); }
};

//! Measurements M_{r,theta}(t, x), laid out values[x][t][theta][r].
struct MeasurementSet
{
    DetectorSet detectors;
    std::vector<double> times;
    PlaneFamily planes;
    std::vector<double> values;

    std::size_t index(std::size_t x, std::size_t t, std::size_t dir, std::size_t off) const
    {
        return ((x * times.size() + t) * planes.n_directions() + dir) * planes.n_offsets() + off;
    }
    double at(std::size_t x, std::size_t t, std::size_t dir, std::size_t off) const
    {
        return values[index(x, t, dir, off)];
    }

    //! The (r, theta) slice at (x, t) as a sinogram.
    Sinogram3 sinogram(std::size_t x, std::size_t t) const;
};

//! Uniform grid of n times on [t_min, t_max].
std::vector<double> uniform_times(double t_min, double t_max, int n);

enum class SynthesisMode
{
    direct,  //!< full kernel quadrature at every plane node (slow reference)
    cached   //!< spheroid terms cached on a lattice over supp f per detector
};

struct SynthesisSpec
{
    SynthesisMode mode{SynthesisMode::cached};
    QuadSpec kernel{};          //!< direct mode
    ProfileSpec profile{};      //!< cached mode
    int cache_nodes{33};        //!< lattice nodes per axis over the supp f box
    int plane_radial{24};
    int plane_angular{48};
    double support_margin{0.0};  //!< extra t_max demanded beyond the support bound
};

//! Largest t_support_bound(x, y) over y in supp f.
double max_support_bound(Scene const& scene, Vec3 const& x);

/*!
 * Plane integrals of y -> K(t, x, y; eps) f(y) over E_{r,theta} ∩ B_t(x) for
 * every detector, time and plane. Entries whose plane misses B_t(x) ∩ supp f
 * are exactly 0.
 */
MeasurementSet synthesize(Scene const& scene,
                          DetectorSet const& detectors,
                          std::vector<double> const& times,
                          PlaneFamily const& planes,
                          SynthesisSpec const& spec = {});

//! Single entry in direct mode.
double measurement_direct(Scene const& scene,
                          double t,
                          Vec3 const& x,
                          Plane const& plane,
                          SynthesisSpec const& spec = {});

//! Shell decomposition of the volume integral: radial Gauss-Legendre nodes
//! times a spherical-cap rule on each shell |y - x| = r.
struct PressureSpec
{
    int n_radial{64};
    SphereQuadSpec shell{48, 48};
    QuadSpec kernel{24, 24, 16};
    double step{1e-2};
};

/*!
 * First-order pressure d^4/dt^4 int_{B_t(x)} K(t, x, y; eps) P0(y) dy by a
 * 7-point central difference of volume integrals (remainder dropped).
 */
double pressure_first_order(Scene const& scene,
                            double t,
                            Vec3 const& x,
                            AnalyticField const& p0,
                            PressureSpec const& spec = {});

//! V(t) = int_{B_t(x)} K(t, x, y; eps) P0(y) dy.
double kernel_volume_integral(Scene const& scene,
                              double t,
                              Vec3 const& x,
                              AnalyticField const& p0,
                              PressureSpec const& spec = {});

}  // namespace qpat
