#include "qpat/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qpat/error.hpp"
#include "qpat/parallel.hpp"

namespace qpat
{
namespace
{
constexpr double pi = std::numbers::pi;

// Largest 4 pi Ninf over the lattice, seen from an arbitrary detector
double max_source_proxy(LimitSource const& limits, GridGeometry const& lattice)
{
    Vec3 x{0, 0, limits.sigma_radius()};
    std::vector<double> vals(lattice.size());
    parallel_for(lattice.size(), [&](std::size_t n) {
        vals[n] = 4 * pi * std::fabs(limits.ninf(x, lattice.point(n)));
    });
    return *std::max_element(vals.begin(), vals.end());
}

std::vector<double> beam_offsets(GridGeometry const& g, int n)
{
    double hx = 0.5 * (g.nx - 1) * g.h;
    double hy = 0.5 * (g.ny - 1) * g.h;
    return symmetric_offsets(std::hypot(hx, hy), n);
}

// Fill missing slots of one (slice, angle) profile linearly in offset
void fill_profile(std::vector<double>& v, std::vector<std::uint8_t> const& missing, std::size_t base, std::size_t n)
{
    for (std::size_t o = 0; o < n; ++o)
    {
        if (!missing[base + o])
        {
            continue;
        }
        long lo = static_cast<long>(o) - 1;
        while (lo >= 0 && missing[base + lo])
        {
            --lo;
        }
        std::size_t hi = o + 1;
        while (hi < n && missing[base + hi])
        {
            ++hi;
        }
        double vlo = lo >= 0 ? v[base + lo] : 0.0;
        double vhi = hi < n ? v[base + hi] : 0.0;
        double plo = lo >= 0 ? lo : -1.0;
        double phi = hi < n ? static_cast<double>(hi) : static_cast<double>(n);
        v[base + o] = vlo + (vhi - vlo) * (o - plo) / (phi - plo);
    }
}

}  // namespace

//---------------------------------------------------------------------------//
// Support prior
//---------------------------------------------------------------------------//

SupportPrior SupportPrior::from_scene(Scene const& scene, double pad)
{
    SupportPrior prior;
    for (auto b : scene.perturbation_supports())
    {
        b.radius += pad;
        prior.balls.push_back(b);
    }
    return prior;
}

bool SupportPrior::contains(Vec3 const& p) const
{
    return distance_to(p) < 0;
}

double SupportPrior::distance_to(Vec3 const& p) const
{
    double best = std::numeric_limits<double>::infinity();
    for (auto const& b : balls)
    {
        best = std::min(best, distance(p, b.center) - b.radius);
    }
    return best;
}

bool SupportPrior::hit_by_line(Vec3 const& point, Vec3 const& dir) const
{
    for (auto const& b : balls)
    {
        Vec3 w = b.center - point;
        Vec3 perp = w - dot(w, dir) * dir;
        if (norm(perp) < b.radius)
        {
            return true;
        }
    }
    return false;
}

//---------------------------------------------------------------------------//
// X-ray data
//---------------------------------------------------------------------------//

std::optional<double> xray_line_value(LimitSource const& limits,
                                      Vec3 const& point,
                                      Vec3 const& dir,
                                      SupportPrior const& prior,
                                      double omega_radius,
                                      double f_floor,
                                      int n_candidates,
                                      bool swap_ends)
{
    if (!prior.hit_by_line(point, dir))
    {
        return 0.0;
    }
    auto [s_lo, s_hi] = line_sphere_parameters(point, dir, limits.sigma_radius());
    Vec3 x = point + s_lo * dir;
    Vec3 xp = point + s_hi * dir;
    if (swap_ends)
    {
        std::swap(x, xp);
    }
    auto [w_lo, w_hi] = line_sphere_parameters(point, dir, omega_radius);

    double best_margin = -1;
    double best_value = 0;
    for (int c = 0; c < n_candidates; ++c)
    {
        double s = w_lo + (w_hi - w_lo) * (c + 0.5) / n_candidates;
        Vec3 y0 = point + s * dir;
        double margin = prior.distance_to(y0);
        if (!(margin > 0) || margin <= best_margin)
        {
            continue;
        }
        double f0 = 4 * pi * limits.ninf(x, y0);
        if (!(std::fabs(f0) >= f_floor))
        {
            continue;
        }
        best_margin = margin;
        best_value = 8 * pi
                     * (limits.m0(x, y0) * distance(y0, x) + limits.m0(xp, y0) * distance(y0, xp))
                     / f0;
    }
    if (best_margin < 0)
    {
        return std::nullopt;
    }
    return best_value;
}

XrayLineData xray_data_from_limits(LimitSource const& limits,
                                   GridGeometry const& target,
                                   SupportPrior const& prior,
                                   double omega_radius,
                                   XraySpec const& spec)
{
    if (spec.n_angles < 1 || spec.n_offsets < 5 || spec.n_candidates < 1)
    {
        throw PreconditionError("xray data: invalid line sampling");
    }
    if (!(omega_radius < limits.sigma_radius()))
    {
        throw PreconditionError("xray data: omega must lie inside the detector sphere");
    }
    XrayLineData out;
    out.lines = ParallelBeamData::zeros(target, spec.n_angles, beam_offsets(target, spec.n_offsets));
    auto& lines = out.lines;
    double f_floor = spec.f_floor_fraction * max_source_proxy(limits, target);
    if (!(f_floor > 0))
    {
        throw NumericalError("xray data: the source proxy 4 pi Ninf vanishes on the lattice");
    }
    std::size_t n_off = lines.n_offsets();
    out.missing.assign(lines.values.size(), 0);
    parallel_for(lines.values.size(), [&](std::size_t n) {
        std::size_t o = n % n_off;
        int a = static_cast<int>((n / n_off) % spec.n_angles);
        int k = static_cast<int>(n / (n_off * spec.n_angles));
        Vec3 p = lines.line_point(k, a, o);
        Vec3 dir = lines.direction(a);
        if (norm(p - dot(p, dir) * dir) >= omega_radius)
        {
            return;
        }
        auto v = xray_line_value(limits, p, dir, prior, omega_radius, f_floor, spec.n_candidates);
        if (v)
        {
            lines.values[n] = *v;
        }
        else
        {
            out.missing[n] = 1;
        }
    });
    std::size_t count = std::count(out.missing.begin(), out.missing.end(), std::uint8_t{1});
    out.missing_fraction = static_cast<double>(count) / lines.values.size();
    if (out.missing_fraction > spec.max_missing)
    {
        throw NumericalError("xray data: " + std::to_string(count) + " of "
                             + std::to_string(lines.values.size())
                             + " lines have no admissible reference point");
    }
    for (std::size_t base = 0; base < lines.values.size(); base += n_off)
    {
        fill_profile(lines.values, out.missing, base, n_off);
    }
    return out;
}

GridField3 recover_alpha1(XrayLineData const& data)
{
    return xray3_inverse(data.lines);
}

//---------------------------------------------------------------------------//
// f and rho
//---------------------------------------------------------------------------//

FieldRecovery recover_f(LimitSource const& limits, GridField3 const& alpha1_eps, RecoverSpec const& spec)
{
    auto const& g = alpha1_eps.geometry();
    GridField3 lap = laplacian7(binomial_smooth(alpha1_eps));
    double panel = spec.panel_cells * g.h;
    DetectorSet candidates;
    if (!spec.detector.fixed)
    {
        if (spec.detector.n_candidates < 1)
        {
            throw PreconditionError("recover_f: need at least one detector candidate");
        }
        candidates = DetectorSet::fibonacci(spec.detector.n_candidates, limits.sigma_radius());
    }
    Vec3 probe = spec.detector.fixed ? *spec.detector.fixed : candidates.points.front();

    FieldRecovery out{GridField3(g), std::numeric_limits<double>::infinity()};
    std::vector<double> denominators(g.size(), std::numeric_limits<double>::infinity());
    parallel_for(g.size(), [&](std::size_t n) {
        Vec3 y = g.point(n);
        if (limits.ninf(probe, y) == 0)
        {
            return;
        }
        Vec3 x = probe;
        if (!spec.detector.fixed)
        {
            double best = std::numeric_limits<double>::infinity();
            for (auto const& c : candidates.points)
            {
                double load = line_integral_sampled(
                    [&](Vec3 const& z) { return std::fabs(alpha1_eps.sample(z)); },
                    Segment{c, y},
                    2 * panel,
                    2,
                    [](double) { return 1.0; });
                if (load < best)
                {
                    best = load;
                    x = c;
                }
            }
        }
        double d = distance(x, y);
        double line = line_integral_sampled([&](Vec3 const& z) { return lap.sample(z); },
                                            Segment{x, y},
                                            panel,
                                            4,
                                            [d](double s) { return (1 - s / d) * s; });
        double denom = 1 - alpha1_eps.sample(y) + 0.5 * line;
        denominators[n] = denom;
        out.field.values()[n] = (8 * pi * d * limits.n0(x, y) - 4 * pi * limits.ninf(x, y)) / denom;
    });
    for (double v : denominators)
    {
        out.min_denominator = std::min(out.min_denominator, std::fabs(v));
    }
    if (out.min_denominator < spec.min_denominator)
    {
        throw NumericalError("recover_f: denominator " + std::to_string(out.min_denominator)
                             + " below " + std::to_string(spec.min_denominator)
                             + " (eps too large for the linearized inversion)");
    }
    return out;
}

GridField3 recover_rho1(LimitSource const& limits,
                        GridField3 const& alpha1_eps,
                        GridField3 const& f,
                        RecoverSpec const& spec)
{
    auto const& g = f.geometry();
    if (!(alpha1_eps.geometry() == g))
    {
        throw PreconditionError("recover_rho1: fields live on different lattices");
    }
    double floor = spec.rho_floor_fraction * f.max_abs();
    Vec3 x = spec.detector.fixed ? *spec.detector.fixed : Vec3{0, 0, limits.sigma_radius()};
    GridField3 out(g);
    parallel_for(g.size(), [&](std::size_t n) {
        double fy = f.values()[n];
        if (!(std::fabs(fy) >= floor) || fy == 0)
        {
            return;
        }
        out.values()[n] = 1 - alpha1_eps.values()[n] - 4 * pi * limits.ninf(x, g.point(n)) / fy;
    });
    return out;
}

//---------------------------------------------------------------------------//
// Pipeline
//---------------------------------------------------------------------------//

void add_truth_diagnostics(ReconResult& result, Scene const& scene)
{
    auto const& g = result.f.geometry();
    double eps = scene.epsilon;
    GridField3 alpha = sample_field(g, [&](Vec3 const& p) { return eps * scene.alpha1.value(p); });
    GridField3 rho = sample_field(g, [&](Vec3 const& p) { return eps * scene.rho1.value(p); });
    GridField3 f = sample_field(g, [&](Vec3 const& p) { return scene.f.value(p); });

    double f_peak = f.max_abs();
    std::vector<bool> f_mask(g.size());
    for (std::size_t n = 0; n < g.size(); ++n)
    {
        f_mask[n] = f.values()[n] > 0.05 * f_peak;
    }
    auto alpha_mask = ball_mask(g, scene.alpha1.supports());
    auto rho_mask = ball_mask(g, scene.rho1.supports());

    auto norm_on = [](GridField3 const& a, std::vector<bool> const& mask) {
        double s = 0;
        for (std::size_t n = 0; n < a.values().size(); ++n)
        {
            if (mask.empty() || mask[n])
            {
                s += a.values()[n] * a.values()[n];
            }
        }
        return std::sqrt(s);
    };

    auto& diag = result.diagnostics;
    diag["f_rel_l2"] = relative_l2(result.f, f, f_mask);
    if (!scene.alpha1.empty() && eps > 0)
    {
        diag["alpha1_eps_rel_l2"] = relative_l2(result.alpha1_eps, alpha, alpha_mask);
    }
    if (!scene.rho1.empty() && eps > 0)
    {
        diag["rho1_eps_rel_l2"] = relative_l2(result.rho1_eps, rho, rho_mask);
    }
    diag["alpha1_eps_norm"] = norm_on(result.alpha1_eps, {});
    diag["rho1_eps_norm"] = norm_on(result.rho1_eps, {});
    diag["alpha1_eps_true_norm"] = norm_on(alpha, {});
    diag["rho1_eps_true_norm"] = norm_on(rho, {});
}

ReconResult reconstruct(LimitSource const& limits,
                        SupportPrior const& prior,
                        double omega_radius,
                        PipelineSpec const& spec)
{
    ReconResult result;
    auto lines = with_stage("xray data", [&] {
        return xray_data_from_limits(limits, spec.lattice, prior, omega_radius, spec.xray);
    });
    result.diagnostics["missing_line_fraction"] = lines.missing_fraction;
    result.alpha1_eps = with_stage("alpha1", [&] { return recover_alpha1(lines); });
    auto fr = with_stage("f", [&] { return recover_f(limits, result.alpha1_eps, spec.recover); });
    result.f = std::move(fr.field);
    result.diagnostics["min_denominator"] = fr.min_denominator;
    result.rho1_eps = with_stage(
        "rho1", [&] { return recover_rho1(limits, result.alpha1_eps, result.f, spec.recover); });
    return result;
}

ReconResult full_pipeline_analytic(Scene const& scene, PipelineSpec const& spec)
{
    with_stage("scene", [&] { scene.validate(); });
    AnalyticLimits limits(scene, spec.analytic);
    auto result = reconstruct(limits, SupportPrior::from_scene(scene, spec.prior_pad), scene.omega_radius, spec);
    add_truth_diagnostics(result, scene);
    return result;
}

ReconResult full_pipeline_numeric(Scene const& scene,
                                  MeasurementSet const& measurements,
                                  NumericLimitSpec const& limit_spec,
                                  PipelineSpec const& spec)
{
    with_stage("scene", [&] { scene.validate(); });
    LimitData data = with_stage("limits", [&] { return limits_numeric(measurements, spec.lattice, limit_spec); });
    GriddedLimits limits(std::move(data));
    auto result = reconstruct(limits, SupportPrior::from_scene(scene, spec.prior_pad), scene.omega_radius, spec);
    add_truth_diagnostics(result, scene);
    return result;
}

}  // namespace qpat
