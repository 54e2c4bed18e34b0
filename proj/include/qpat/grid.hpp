#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "qpat/geometry.hpp"

namespace qpat
{
//! Regular lattice: node (i, j, k) sits at origin + h (i, j, k).
struct GridGeometry
{
    int nx{2};
    int ny{2};
    int nz{2};
    double h{1};
    Vec3 origin;

    std::size_t size() const
    {
        return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny)
               * static_cast<std::size_t>(nz);
    }
    std::size_t index(int i, int j, int k) const
    {
        return static_cast<std::size_t>(i)
               + static_cast<std::size_t>(nx)
                     * (static_cast<std::size_t>(j) + static_cast<std::size_t>(ny) * k);
    }
    Vec3 point(int i, int j, int k) const { return origin + h * Vec3{double(i), double(j), double(k)}; }
    Vec3 point(std::size_t flat) const;
    Vec3 upper() const { return point(nx - 1, ny - 1, nz - 1); }

    //! Throws PreconditionError unless dims >= 2 and h > 0.
    void validate() const;

    //! n^3 nodes spanning the cube [-half_width, half_width]^3.
    static GridGeometry cube(double half_width, int n);

    friend bool operator==(GridGeometry const&, GridGeometry const&) = default;
};

//! Sampled scalar field on a GridGeometry (x index fastest).
class GridField3
{
  public:
    GridField3() = default;
    explicit GridField3(GridGeometry geom, double fill = 0);
    GridField3(GridGeometry geom, std::vector<double> values);

    GridGeometry const& geometry() const { return geom_; }
    std::vector<double> const& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    double& operator()(int i, int j, int k) { return values_[geom_.index(i, j, k)]; }
    double operator()(int i, int j, int k) const { return values_[geom_.index(i, j, k)]; }

    //! Trilinear interpolation; 0 outside the lattice box.
    double sample(Vec3 const& p) const;

    double max_abs() const;

  private:
    GridGeometry geom_;
    std::vector<double> values_;
};

//! Evaluate f at every node (in parallel).
GridField3 sample_field(GridGeometry const& geom, std::function<double(Vec3 const&)> const& f);

//! One pass of the separable [1 2 1] / 4 filter along each axis (zero padded).
GridField3 binomial_smooth(GridField3 const& field);

//! Second-order 7-point Laplacian; boundary nodes are set to 0.
GridField3 laplacian7(GridField3 const& field);

//! ||a - b|| / ||b|| over nodes where mask is true (all nodes if mask empty).
double relative_l2(GridField3 const& a, GridField3 const& b, std::vector<bool> const& mask = {});

//! Nodes inside any of the given balls.
std::vector<bool> ball_mask(GridGeometry const& geom, std::vector<Ball> const& balls);

}  // namespace qpat
