#include <doctest.h>

#include <cmath>
#include <fstream>
#include <iterator>

#include "qpat/commands.hpp"
#include "qpat/error.hpp"
#include "qpat/io.hpp"

using namespace qpat;

namespace
{
fs::path fresh_dir(std::string const& name)
{
    fs::path dir = fs::temp_directory_path() / "qpat_test_commands" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string bytes_of(fs::path const& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

RunConfig minimal_config(double eps)
{
    RunConfig c = parse_config(R"({
      "sampling": {"n_detectors": 2,
                   "times": {"t_min": 2.5, "t_max": 5.5, "count": 4},
                   "planes": {"n_polar": 2, "n_azimuth": 4, "n_offsets": 5},
                   "synthesis": {"plane_radial": 48, "plane_angular": 96,
                                 "cache_nodes": 9, "profile": {"box": {"n_sum": 12, "n_diff": 12, "n_phi": 8}}},
                   "lattice": {"nodes": 24}}
    })");
    c.scene.epsilon = eps;
    return c;
}
}  // namespace

TEST_CASE("synthesize writes measurements whose sidecar matches the config")
{
    RunConfig c = minimal_config(0.05);
    fs::path dir = fresh_dir("synth");
    auto out = cmd_synthesize(c, dir);
    REQUIRE(fs::exists(out.measurements));
    REQUIRE(fs::exists(sidecar_path(out.measurements)));
    REQUIRE(fs::exists(out.config));

    auto side = read_json(sidecar_path(out.measurements));
    CHECK(side.at("times").get<std::vector<double>>() == c.times());
    CHECK(side.at("offsets").get<std::vector<double>>() == c.planes().offsets);
    CHECK(side.at("directions").size() == 8);
    CHECK(side.at("detectors").size() == 2);
    CHECK(side.at("scene_hash") == scene_hash(c.scene));
    CHECK(fs::file_size(out.measurements) == 8 * 2 * 4 * 8 * 5);

    RunConfig echoed = load_config(out.config);
    CHECK(to_json(echoed) == to_json(c));

    fs::path again = fresh_dir("synth_again");
    auto out2 = cmd_synthesize(c, again);
    CHECK(bytes_of(out.measurements) == bytes_of(out2.measurements));
    CHECK(bytes_of(sidecar_path(out.measurements)) == bytes_of(sidecar_path(out2.measurements)));
}

TEST_CASE("eps = 0 synthesis matches the closed-form kernel path")
{
    RunConfig c = minimal_config(0);
    fs::path dir = fresh_dir("synth_free");
    auto out = cmd_synthesize(c, dir);
    auto m = read_measurements(out.measurements).set;

    SynthesisSpec reference;
    reference.mode = SynthesisMode::direct;
    reference.plane_radial = 96;
    reference.plane_angular = 192;
    double worst = 0;
    for (std::size_t ix = 0; ix < m.detectors.size(); ++ix)
    {
        for (std::size_t k = 0; k < m.times.size(); ++k)
        {
            for (std::size_t d = 0; d < m.planes.n_directions(); ++d)
            {
                for (std::size_t o = 0; o < m.planes.n_offsets(); ++o)
                {
                    Plane plane(m.planes.offsets[o], m.planes.sampling.directions[d]);
                    double ref = measurement_direct(c.scene, m.times[k], m.detectors.points[ix], plane, reference);
                    worst = std::max(worst, std::fabs(ref - m.at(ix, k, d, o)));
                }
            }
        }
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("reconstruct writes fields and diagnostics")
{
    RunConfig c = minimal_config(0.05);
    fs::path dir = fresh_dir("recon");
    ReconResult r = cmd_reconstruct(c, dir);
    for (char const* name : {"alpha1_eps.bin", "f.bin", "rho1_eps.bin"})
    {
        REQUIRE(fs::exists(dir / name));
    }
    CHECK(read_field(dir / "f.bin").values() == r.f.values());
    CHECK(read_field(dir / "rho1_eps.bin").values() == r.rho1_eps.values());
    auto diag = read_json(dir / "diagnostics.json");
    CHECK(diag.at("diagnostics").at("f_rel_l2").get<double>() == r.diagnostics.at("f_rel_l2"));
    CHECK(diag.at("diagnostics").contains("alpha1_eps_rel_l2"));
    CHECK(diag.at("diagnostics").contains("rho1_eps_rel_l2"));

    // zero-perturbation scene: perturbations far below 1% of the eps = 0.05 norms
    RunConfig z = minimal_config(0);
    ReconResult rz = cmd_reconstruct(z, fresh_dir("recon_null"));
    CHECK(rz.diagnostics.at("alpha1_eps_norm") <= 0.01 * r.diagnostics.at("alpha1_eps_true_norm"));
    CHECK(rz.diagnostics.at("rho1_eps_norm") <= 0.01 * r.diagnostics.at("rho1_eps_true_norm"));

    fs::path again = fresh_dir("recon_again");
    cmd_reconstruct(c, again);
    for (char const* name : {"alpha1_eps.bin", "f.bin", "rho1_eps.bin", "diagnostics.json"})
    {
        CHECK(bytes_of(dir / name) == bytes_of(again / name));
    }
}

TEST_CASE("numeric reconstruct checks its input")
{
    RunConfig c = minimal_config(0.05);
    c.path = PipelinePath::numeric;
    fs::path dir = fresh_dir("recon_numeric");
    try
    {
        cmd_reconstruct(c, dir, dir / "absent.bin");
        FAIL("expected an I/O error");
    }
    catch (IoError const& e)
    {
        CHECK(std::string(e.what()).find("absent.bin") != std::string::npos);
    }

    auto out = cmd_synthesize(c, dir);
    RunConfig other = c;
    other.scene.epsilon = 0.04;
    CHECK_THROWS_AS(cmd_reconstruct(other, dir, out.measurements), ConfigError);
    // the minimal sampling violates the wavefront bound and says so
    try
    {
        cmd_reconstruct(c, dir, out.measurements);
        FAIL("expected a precondition error");
    }
    catch (PreconditionError const& e)
    {
        CHECK(std::string(e.what()).find("limits: ") == 0);
    }
}

TEST_CASE("export slices and verify")
{
    RunConfig c = minimal_config(0.05);
    fs::path dir = fresh_dir("export");
    GridGeometry g = GridGeometry::cube(1.0, 9);
    write_field(dir / "bump.bin", sample_field(g, [&](Vec3 const& p) { return c.scene.f.value(p); }));
    auto written = cmd_export_slices(dir / "bump.bin", 1, {0, 4}, dir / "png");
    REQUIRE(written.size() == 2);
    CHECK(written[1].filename() == "bump_y4.png");
    CHECK(fs::exists(written[0]));
    CHECK(fs::exists(sidecar_path(written[1])));
    CHECK_THROWS_AS(cmd_export_slices(dir / "nothing.bin", 0, {0}, dir), IoError);

    c.oracle_samples = 200000;
    auto checks = cmd_verify(c, dir);
    CHECK(checks.size() == 3);
    for (auto const& chk : checks)
    {
        CHECK_MESSAGE(chk.passed, chk.name << ": " << chk.detail);
    }
    CHECK(fs::exists(dir / "verify.json"));
}
