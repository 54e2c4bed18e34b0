#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qpat/grid.hpp"
#include "qpat/limits.hpp"
#include "qpat/transforms.hpp"

namespace qpat
{
/*!
 * A-priori knowledge of where the perturbations may live: the union of
 * `balls` contains supp alpha1 ∪ supp rho1. Reference points y0 are chosen
 * outside it, and lines missing it carry zero X-ray data.
 */
struct SupportPrior
{
    std::vector<Ball> balls;

    //! Perturbation supports of the scene, each grown by `pad`.
    static SupportPrior from_scene(Scene const& scene, double pad = 0.05);

    bool contains(Vec3 const& p) const;
    //! Signed distance to the union (negative inside).
    double distance_to(Vec3 const& p) const;
    bool hit_by_line(Vec3 const& point, Vec3 const& dir) const;
};

struct XraySpec
{
    int n_angles{180};
    int n_offsets{129};
    int n_candidates{96};          //!< y0 candidates per line
    double f_floor_fraction{0.1};  //!< of max 4 pi Ninf
    double max_missing{0.02};
};

struct XrayLineData
{
    ParallelBeamData lines;
    std::vector<std::uint8_t> missing;  //!< per line slot, before filling
    double missing_fraction{0};
};

/*!
 * X-ray data of eps alpha1 for the slice-parallel line family of `target`:
 * X = 8 pi (M0_x(y0)|y0-x| + M0_x'(y0)|y0-x'|) / (4 pi Ninf(y0)), with x, x'
 * the ends of the line on the detector sphere. Lines without an admissible
 * y0 are filled from their neighbours in offset; more than max_missing of
 * them raises NumericalError.
 */
XrayLineData xray_data_from_limits(LimitSource const& limits,
                                   GridGeometry const& target,
                                   SupportPrior const& prior,
                                   double omega_radius,
                                   XraySpec const& spec = {});

//! Value on one line, or nullopt when no admissible reference point exists.
std::optional<double> xray_line_value(LimitSource const& limits,
                                      Vec3 const& point,
                                      Vec3 const& dir,
                                      SupportPrior const& prior,
                                      double omega_radius,
                                      double f_floor,
                                      int n_candidates,
                                      bool swap_ends = false);

//! Filtered backprojection of the line data: eps alpha1 on the lattice.
GridField3 recover_alpha1(XrayLineData const& data);

//! Which detector feeds the pointwise f formula.
struct DetectorChoice
{
    std::optional<Vec3> fixed;  //!< use this detector everywhere
    int n_candidates{64};       //!< otherwise pick, per point, the Fibonacci
                                //!< candidate with the least |eps alpha1| on L_{x,y}
};

struct RecoverSpec
{
    DetectorChoice detector{};
    double min_denominator{0.5};
    double rho_floor_fraction{0.05};  //!< of max |f| for the rho division
    double panel_cells{1.0};          //!< line panels in units of the lattice spacing
};

struct FieldRecovery
{
    GridField3 field;
    double min_denominator{0};
};

/*!
 * f(y) = (8 pi |y-x| N0_x(y) - 4 pi Ninf_x(y))
 *        / (1 - eps alpha1(y) + 1/2 int_L (1 - s/|y-x|) s eps lap alpha1 ds)
 * at every lattice point with Ninf != 0, using the reconstructed eps alpha1
 * (one binomial smoothing pass before the 7-point Laplacian).
 */
FieldRecovery recover_f(LimitSource const& limits, GridField3 const& alpha1_eps, RecoverSpec const& spec = {});

//! eps rho1 = 1 - eps alpha1 - 4 pi Ninf / f where |f| >= floor, else 0.
GridField3 recover_rho1(LimitSource const& limits,
                        GridField3 const& alpha1_eps,
                        GridField3 const& f,
                        RecoverSpec const& spec = {});

//---------------------------------------------------------------------------//
// Pipeline
//---------------------------------------------------------------------------//

struct ReconResult
{
    GridField3 alpha1_eps;
    GridField3 f;
    GridField3 rho1_eps;
    std::map<std::string, double> diagnostics;
};

struct PipelineSpec
{
    GridGeometry lattice{GridGeometry::cube(1.0, 48)};
    XraySpec xray{};
    RecoverSpec recover{};
    double prior_pad{0.05};
    AnalyticLimitSpec analytic{};  //!< analytic path only
};

//! Relative L2 errors against the scene on the documented masks.
void add_truth_diagnostics(ReconResult& result, Scene const& scene);

//! Reconstruction from any limit source (stages tagged in errors).
ReconResult reconstruct(LimitSource const& limits,
                        SupportPrior const& prior,
                        double omega_radius,
                        PipelineSpec const& spec = {});

//! Analytic-limits path from a scene, with ground-truth diagnostics.
ReconResult full_pipeline_analytic(Scene const& scene, PipelineSpec const& spec = {});

//! Numeric path from measurements; the scene supplies support geometry and
//! ground truth for diagnostics.
ReconResult full_pipeline_numeric(Scene const& scene,
                                  MeasurementSet const& measurements,
                                  NumericLimitSpec const& limit_spec,
                                  PipelineSpec const& spec = {});

}  // namespace qpat
