#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "qpat/forward_model.hpp"
#include "qpat/grid.hpp"
#include "qpat/phantom.hpp"
#include "qpat/quadrature.hpp"

namespace qpat
{
//---------------------------------------------------------------------------//
// Pointwise access to the four limit datasets
//---------------------------------------------------------------------------//

/*!
 * Source of M0_x(y), N0_x(y), Minf_x(y), Ninf_x(y) at arbitrary detector
 * points x on the detector sphere and lattice points y.
 */
class LimitSource
{
  public:
    virtual ~LimitSource() = default;

    virtual double m0(Vec3 const& x, Vec3 const& y) const = 0;
    virtual double n0(Vec3 const& x, Vec3 const& y) const = 0;
    virtual double ninf(Vec3 const& x, Vec3 const& y) const = 0;
    virtual double minf(Vec3 const& x, Vec3 const& y) const = 0;

    //! Radius of the detector sphere.
    virtual double sigma_radius() const = 0;
};

struct AnalyticLimitSpec
{
    int n_nodes{64};                 //!< Gauss-Legendre nodes per bump chord
    RayQuadSpec whole_space{48, 48, 32};  //!< Minf density integral
};

//! Closed-form limits evaluated from the scene at exact (x, y).
class AnalyticLimits final : public LimitSource
{
  public:
    explicit AnalyticLimits(Scene scene, AnalyticLimitSpec spec = {});

    double m0(Vec3 const& x, Vec3 const& y) const override;
    double n0(Vec3 const& x, Vec3 const& y) const override;
    double ninf(Vec3 const& x, Vec3 const& y) const override;
    double minf(Vec3 const& x, Vec3 const& y) const override;
    double sigma_radius() const override { return scene_.sigma_radius; }

    Scene const& scene() const { return scene_; }

  private:
    Scene scene_;
    AnalyticLimitSpec spec_;
};

/*!
 * (1 / 16 pi^2) int psi(z) grad(1/|z-x|) . grad(1/|z-y|) dz over the support
 * of psi, by spherical quadrature about y.
 */
double gradient_pair_integral(AnalyticField const& psi,
                              Vec3 const& x,
                              Vec3 const& y,
                              RayQuadSpec const& spec = {});

//---------------------------------------------------------------------------//
// Gridded limit datasets
//---------------------------------------------------------------------------//

//! The four limit fields of one detector on the reconstruction lattice.
struct DetectorLimits
{
    GridField3 m0;
    GridField3 n0;
    GridField3 minf;  //!< empty lattice values when not computed
    GridField3 ninf;
    std::vector<std::uint8_t> mask;  //!< 1 where |4 pi Ninf| exceeds the threshold
};

struct LimitData
{
    GridGeometry lattice;
    DetectorSet detectors;
    std::vector<DetectorLimits> fields;
    bool has_minf{false};
};

struct LimitGridSpec
{
    AnalyticLimitSpec analytic{};
    bool compute_minf{false};
    double mask_fraction{0.01};  //!< mask threshold relative to max |4 pi Ninf|
};

//! Evaluate the closed-form limits of every detector on the lattice.
LimitData limits_analytic(Scene const& scene,
                          DetectorSet const& detectors,
                          GridGeometry const& lattice,
                          LimitGridSpec const& spec = {});

/*!
 * Gridded limits sampled at arbitrary detector points: trilinear in y,
 * inverse-distance weighting over the nearest `neighbors` detectors in x.
 */
class GriddedLimits final : public LimitSource
{
  public:
    explicit GriddedLimits(LimitData data, std::size_t neighbors = 4);

    double m0(Vec3 const& x, Vec3 const& y) const override;
    double n0(Vec3 const& x, Vec3 const& y) const override;
    double ninf(Vec3 const& x, Vec3 const& y) const override;
    double minf(Vec3 const& x, Vec3 const& y) const override;
    double sigma_radius() const override { return data_.detectors.radius; }

    LimitData const& data() const { return data_; }

  private:
    template<class Pick>
    double blend(Vec3 const& x, Vec3 const& y, Pick&& pick) const;

    LimitData data_;
    std::size_t neighbors_;
};

//---------------------------------------------------------------------------//
// Limits from measurements
//---------------------------------------------------------------------------//

struct NumericLimitSpec
{
    double large_t_start{0};      //!< first time of the polynomial regime
    int min_large_t_samples{6};
    double mask_fraction{0.01};
    std::vector<int> wavefront_steps{3, 5, 9};  //!< delta in units of the time step
};

/*!
 * Invert the Radon transform of every (t, x) slice of the measurements onto
 * the lattice and take the wavefront limits (cubic interpolation in t, then a
 * polynomial fit through the origin at the wavefront offsets) and the
 * large-time limits (least-squares quadratic over samples past
 * large_t_start). Throws PreconditionError naming the violated sampling
 * bound.
 */
LimitData limits_numeric(MeasurementSet const& measurements,
                         GridGeometry const& lattice,
                         NumericLimitSpec const& spec);

//! Times past large_t_start and the wavefront resolution requirement checked
//! by limits_numeric (exposed for pre-flight checks). Throws on violation.
void check_numeric_sampling(MeasurementSet const& measurements,
                            GridGeometry const& lattice,
                            NumericLimitSpec const& spec);

}  // namespace qpat
