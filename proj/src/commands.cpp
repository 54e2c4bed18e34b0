#include "qpat/commands.hpp"

#include <cmath>

#include "qpat/error.hpp"
#include "qpat/io.hpp"
#include "qpat/kernel.hpp"
#include "qpat/oracle.hpp"
#include "qpat/transforms.hpp"

namespace qpat
{
using nlohmann::json;

SynthesisOutput cmd_synthesize(RunConfig const& cfg, fs::path const& out_dir)
{
    MeasurementSet m = with_stage("synthesize", [&] {
        return synthesize(cfg.scene, cfg.detectors(), cfg.times(), cfg.planes(), cfg.sampling.synthesis);
    });
    SynthesisOutput out{out_dir / "measurements.bin", out_dir / "config.json"};
    write_measurements(out.measurements, m, scene_hash(cfg.scene));
    save_config(out.config, cfg);
    return out;
}

ReconResult cmd_reconstruct(RunConfig const& cfg, fs::path const& out_dir, std::optional<fs::path> const& input)
{
    PipelineSpec spec = cfg.pipeline_spec();
    ReconResult result;
    std::string hash = scene_hash(cfg.scene);
    if (cfg.path == PipelinePath::analytic)
    {
        result = full_pipeline_analytic(cfg.scene, spec);
    }
    else
    {
        fs::path in = input.value_or(out_dir / "measurements.bin");
        if (!fs::exists(in))
        {
            throw IoError("measurement file not found: " + in.string());
        }
        LoadedMeasurements loaded = read_measurements(in);
        if (loaded.scene_hash != hash)
        {
            throw ConfigError("measurement file " + in.string() + " was produced by scene " + loaded.scene_hash
                              + ", config scene is " + hash);
        }
        result = full_pipeline_numeric(cfg.scene, loaded.set, cfg.numeric_limit_spec(), spec);
    }

    json extra = {{"scene_hash", hash}, {"path", to_string(cfg.path)}};
    write_field(out_dir / "alpha1_eps.bin", result.alpha1_eps, "dimensionless", extra);
    write_field(out_dir / "f.bin", result.f, "absorbed energy", extra);
    write_field(out_dir / "rho1_eps.bin", result.rho1_eps, "dimensionless", extra);

    json diag = json::object();
    for (auto const& [k, v] : result.diagnostics)
    {
        diag[k] = v;
    }
    write_json(out_dir / "diagnostics.json",
               {{"path", to_string(cfg.path)}, {"scene_hash", hash}, {"diagnostics", diag}});
    return result;
}

//---------------------------------------------------------------------------//
// Oracle suite
//---------------------------------------------------------------------------//

namespace
{
VerifyCheck check_kernel_mc(RunConfig const& cfg)
{
    Scene const& scene = cfg.scene;
    Vec3 x{scene.sigma_radius, 0, 0};
    Vec3 y{0.3, 0.05, 0.1};
    double t = norm(y - x) + 0.6;
    KernelTerms k = kernel_eval(scene, t, x, y);
    double quad = k.total() - k.leading;
    McEstimate mc = mc_kernel_integrals(scene, t, x, y, cfg.oracle_config());
    double dev = std::fabs(quad - mc.estimate);
    VerifyCheck c{"kernel integrals vs Monte Carlo", false, 0, 3.0, ""};
    c.value = mc.std_error > 0 ? dev / mc.std_error : (dev == 0 ? 0 : INFINITY);
    c.passed = c.value <= c.tolerance;
    c.detail = "quadrature " + json(quad).dump() + ", Monte Carlo " + json(mc.estimate).dump() + " +- "
               + json(mc.std_error).dump() + " (deviation in standard errors)";
    return c;
}

VerifyCheck check_dt_limit(RunConfig const& cfg)
{
    Scene const& scene = cfg.scene;
    Vec3 x{scene.sigma_radius, 0, 0};
    Vec3 y{0.3, 0, 0.1};
    double exact = kernel_dt_limit(scene, x, y);
    double rich = kernel_dt_richardson(scene, x, y, {0.08, 0.04, 0.02}, QuadSpec{});
    VerifyCheck c{"wavefront time derivative vs Richardson", false, 0, 1e-3, ""};
    c.value = std::fabs(exact - rich) / std::fabs(exact);
    c.passed = c.value <= c.tolerance;
    c.detail = "closed form " + json(exact).dump() + ", extrapolated " + json(rich).dump() + " (relative)";
    return c;
}

VerifyCheck check_xray_round_trip(RunConfig const& cfg)
{
    double hw = 1.0;
    int n = 64;
    double h = 2 * hw / (n - 1);
    GridGeometry g{n, n, 3, h, {-hw, -hw, -h}};
    AnalyticField const& f = cfg.scene.f;
    auto data = xray3_parallel_beam(f, g, 180, symmetric_offsets(1.5, 129));
    GridField3 rec = xray3_inverse(data);
    GridField3 truth = sample_field(g, [&](Vec3 const& p) { return f.value(p); });
    VerifyCheck c{"x-ray slice filtered backprojection round trip", false, 0, 0.03, ""};
    c.value = relative_l2(rec, truth);
    c.passed = c.value <= c.tolerance;
    c.detail = "relative L2 on a 64x64x3 lattice, 180 angles, 129 offsets";
    return c;
}

}  // namespace

std::vector<VerifyCheck> cmd_verify(RunConfig const& cfg, fs::path const& out_dir)
{
    std::vector<VerifyCheck> checks;
    checks.push_back(check_kernel_mc(cfg));
    checks.push_back(check_dt_limit(cfg));
    checks.push_back(check_xray_round_trip(cfg));
    if (!out_dir.empty())
    {
        json report = json::array();
        for (auto const& c : checks)
        {
            report.push_back({{"name", c.name},
                              {"passed", c.passed},
                              {"value", c.value},
                              {"tolerance", c.tolerance},
                              {"detail", c.detail}});
        }
        write_json(out_dir / "verify.json", {{"seed", cfg.seed}, {"checks", report}});
    }
    return checks;
}

std::vector<fs::path> cmd_export_slices(fs::path const& field_path,
                                        int axis,
                                        std::vector<int> const& indices,
                                        fs::path const& out_dir)
{
    GridField3 field = read_field(field_path);
    static char const letters[] = {'x', 'y', 'z'};
    std::vector<fs::path> written;
    for (int idx : indices)
    {
        if (axis < 0 || axis > 2)
        {
            throw PreconditionError("slice axis must be 0, 1 or 2");
        }
        fs::path out = out_dir / (field_path.stem().string() + "_" + letters[axis] + std::to_string(idx) + ".png");
        export_slice(out, field, axis, idx);
        written.push_back(out);
    }
    return written;
}

}  // namespace qpat
