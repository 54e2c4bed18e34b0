#pragma once

#include <vector>

#include "qpat/geometry.hpp"
#include "qpat/grid.hpp"
#include "qpat/phantom.hpp"

namespace qpat
{
//---------------------------------------------------------------------------//
// Radon transform (plane integrals)
//---------------------------------------------------------------------------//

//! Unit directions on the upper hemisphere with quadrature weights summing to 2 pi.
struct HemisphereSampling
{
    std::vector<Vec3> directions;
    std::vector<double> weights;

    //! Gauss-Legendre in cos(polar) on [0, 1] times a uniform azimuth grid.
    static HemisphereSampling product(int n_polar, int n_azimuth);
};

//! n uniformly spaced values symmetric about 0 spanning [-half_width, half_width].
std::vector<double> symmetric_offsets(double half_width, int n);

//! Plane-integral samples R f(r, theta) on hemisphere directions x offsets.
struct Sinogram3
{
    HemisphereSampling sampling;
    std::vector<double> offsets;
    std::vector<double> values;  //!< values[dir * offsets.size() + offset]

    std::size_t n_directions() const { return sampling.directions.size(); }
    std::size_t n_offsets() const { return offsets.size(); }
    double& at(std::size_t dir, std::size_t off) { return values[dir * offsets.size() + off]; }
    double at(std::size_t dir, std::size_t off) const { return values[dir * offsets.size() + off]; }

    //! Zero-valued sinogram with the given layout.
    static Sinogram3 zeros(HemisphereSampling sampling, std::vector<double> offsets);
};

//! Plane integral of an analytic field (per-bump polar quadrature, n_nodes per axis).
double radon3_forward(AnalyticField const& field, Plane const& plane, int n_nodes = 48);

//! Plane integral of a trilinearly interpolated grid over its bounding box.
double radon3_forward(GridField3 const& field, Plane const& plane, int n_nodes = 96);

//! Full sinogram of an analytic field.
Sinogram3 radon3_sinogram(AnalyticField const& field,
                          HemisphereSampling const& sampling,
                          std::vector<double> const& offsets,
                          int n_nodes = 48);

/*!
 * Inverse of the 3D Radon transform:
 * f(y) = -(1 / 8 pi^2) Laplacian int_{S^2} R f(y . theta, theta) d theta,
 * computed as a hemisphere backprojection (weights doubled) of the 4th-order
 * finite-difference second derivative of each profile.
 *
 * Throws PreconditionError for fewer than 2 directions or non-uniform
 * offsets and NumericalError when profiles do not decay at the offset ends.
 */
GridField3 radon3_inverse(Sinogram3 const& sino, GridGeometry const& target);

//---------------------------------------------------------------------------//
// X-ray transform (line integrals)
//---------------------------------------------------------------------------//

//! Integral of an analytic field over the full line {point + s dir}.
double xray3_forward(AnalyticField const& field, Vec3 const& point, Vec3 const& dir, int n_nodes = 64);

//! Line integral of a gridded field over the part of the line inside its box.
double xray3_forward(GridField3 const& field, Vec3 const& point, Vec3 const& dir, int n_nodes = 8);

/*!
 * Parallel-beam line data for slice-wise reconstruction on `target`.
 *
 * In slice k (z = z_k) the line (a, o) has normal n_a = (cos phi_a, sin phi_a, 0),
 * phi_a = pi a / n_angles, direction (-sin phi_a, cos phi_a, 0) and passes
 * through center + offsets[o] n_a, where center is the xy-centre of the lattice.
 */
struct ParallelBeamData
{
    GridGeometry target;
    int n_angles{0};
    std::vector<double> offsets;
    std::vector<double> values;  //!< values[(slice * n_angles + angle) * n_offsets + offset]

    std::size_t n_offsets() const { return offsets.size(); }
    std::size_t slot(int slice, int angle, std::size_t offset) const
    {
        return (static_cast<std::size_t>(slice) * n_angles + angle) * offsets.size() + offset;
    }
    double angle(int a) const;
    Vec3 center(int slice) const;
    Vec3 normal(int a) const;
    Vec3 direction(int a) const;
    Vec3 line_point(int slice, int a, std::size_t o) const;

    static ParallelBeamData zeros(GridGeometry const& target, int n_angles, std::vector<double> offsets);
};

//! Line data of an analytic field for every slice-parallel line.
ParallelBeamData xray3_parallel_beam(AnalyticField const& field,
                                     GridGeometry const& target,
                                     int n_angles,
                                     std::vector<double> const& offsets,
                                     int n_nodes = 64);

/*!
 * Slice-wise filtered backprojection (spatial Ram-Lak filter, linear
 * interpolation). Throws PreconditionError when data are missing (wrong size
 * or non-finite values) or offsets are not uniform.
 */
GridField3 xray3_inverse(ParallelBeamData const& data);

//! 2D filtered backprojection of one slice's sinogram into an nx x ny image
//! (exposed for slice-level tests). `sino` is n_angles x n_offsets.
std::vector<double> fbp_slice(std::vector<double> const& sino,
                              int n_angles,
                              std::vector<double> const& offsets,
                              GridGeometry const& target);

}  // namespace qpat
