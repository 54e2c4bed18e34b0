#include <doctest.h>

#include <string>

#include "qpat/config.hpp"
#include "qpat/error.hpp"

using namespace qpat;
using nlohmann::json;

namespace
{
std::string error_of(std::string const& text)
{
    try
    {
        parse_config(text, "cfg.json");
    }
    catch (ConfigError const& e)
    {
        return e.what();
    }
    return "";
}

bool contains(std::string const& s, std::string const& part)
{
    return s.find(part) != std::string::npos;
}
}  // namespace

TEST_CASE("empty config takes the design defaults")
{
    RunConfig c = parse_config("{}");
    CHECK(c.sampling.n_detectors == 64);
    CHECK(c.sampling.times.count == 96);
    CHECK(c.sampling.times.t_min == 0.1);
    CHECK(c.sampling.times.t_max == doctest::Approx(2 * (c.scene.sigma_radius + c.scene.omega_radius)));
    CHECK(c.sampling.planes.n_polar == 16);
    CHECK(c.sampling.planes.n_azimuth == 32);
    CHECK(c.sampling.planes.n_offsets == 97);
    CHECK(c.sampling.lattice_nodes == 48);
    CHECK(c.scene.epsilon == 0.05);
    CHECK(c.scene.f.bumps().size() == 1);
    CHECK(c.scene.alpha1.bumps()[0].center.x == 0.3);
    CHECK(c.scene.rho1.bumps()[0].center.x == -0.3);
    CHECK(c.limits.wavefront_steps == std::vector<int>{3, 5, 9});
    CHECK(c.limits.min_large_t_samples == 6);
    CHECK(c.xray.f_floor_fraction == 0.1);
    CHECK(c.recover.detector.n_candidates == 64);
    CHECK(c.path == PipelinePath::analytic);
    CHECK(c.planes().offsets.front() == -c.scene.omega_radius);
    CHECK(c.detectors().size() == 64);
}

TEST_CASE("config round trips losslessly")
{
    std::string text = R"({
      "scene": {"epsilon": 0.0123456789012345,
                "f": [{"center": [0.1, -0.2, 0.05], "radius": 0.9, "amplitude": 1.7}],
                "alpha1": [{"center": [0.2, 0, 0], "radius": 0.3}],
                "rho1": []},
      "sampling": {"n_detectors": 2, "times": {"t_min": 0.5, "t_max": 6.1, "count": 7},
                   "planes": {"n_polar": 2, "n_azimuth": 4, "n_offsets": 5, "offset_half_width": 1.1},
                   "synthesis": {"mode": "direct", "kernel": {"n_sum": 12, "n_diff": 10, "n_phi": 8}}},
      "limits": {"large_t_start": 5.5, "wavefront_steps": [2, 4, 8]},
      "recover": {"detector": {"fixed": [0, 0, 3]}},
      "path": "numeric",
      "seed": 18446744073709551615,
      "output": "runs/a"
    })";
    RunConfig c = parse_config(text);
    json j = to_json(c);
    RunConfig again = config_from_json(json::parse(j.dump()));
    CHECK(to_json(again) == j);
    CHECK(to_json(again).dump() == j.dump());
    CHECK(again.scene.epsilon == 0.0123456789012345);
    CHECK(again.seed == 18446744073709551615ULL);
    CHECK(again.sampling.synthesis.mode == SynthesisMode::direct);
    CHECK(*again.recover.detector.fixed == Vec3{0, 0, 3});
    CHECK(*again.sampling.planes.offset_half_width == 1.1);
    CHECK(again.numeric_limit_spec().large_t_start == 5.5);
    CHECK(again.scene.rho1.empty());

    // defaults written out read back to the same tree
    json d = to_json(RunConfig{});
    CHECK(to_json(config_from_json(d)) == d);
}

TEST_CASE("config errors name the field")
{
    CHECK(contains(error_of(R"({"sampling": {"n_detectors": 0}})"), "/sampling/n_detectors"));
    CHECK(contains(error_of(R"({"sampling": {"n_detectors": 2.5}})"), "expected an integer"));
    CHECK(contains(error_of(R"({"sampling": {"times": {"t_min": 3, "t_max": 2}}})"), "/sampling/times/t_max"));
    CHECK(contains(error_of(R"({"scene": {"epsilon": -1}})"), "/scene/epsilon"));
    CHECK(contains(error_of(R"({"scene": {"f": [{"radius": 1}]}})"), "/scene/f/0/center"));
    CHECK(contains(error_of(R"({"scene": {"f": [{"center": [0, 0]}]}})"), "/scene/f/0/center"));
    CHECK(contains(error_of(R"({"scene": {"sigma_radius": 1.0}})"), "/scene"));
    CHECK(contains(error_of(R"({"xray": {"f_floor_fraction": 1.5}})"), "/xray/f_floor_fraction"));
    CHECK(contains(error_of(R"({"limits": {"wavefront_steps": [5, 3, 9]}})"), "/limits/wavefront_steps"));
    CHECK(contains(error_of(R"({"path": "fast"})"), "/path"));
    CHECK(contains(error_of(R"({"sampling": {"lattice": {"nodez": 3}}})"), "/sampling/lattice/nodez: unknown key"));
    CHECK(contains(error_of(R"({"recover": {"detector": {"fixed": [1, 0, 0]}}})"), "/recover/detector/fixed"));
    CHECK(contains(error_of(R"({"seed": -4})"), "/seed"));
    CHECK(contains(error_of(R"({"oracle_samples": 10})"), "/oracle_samples"));
    CHECK(contains(error_of("[1, 2]"), "expected an object"));
}

TEST_CASE("syntax errors report line and column")
{
    std::string msg = error_of("{\n  \"seed\": 1,\n  \"path\": analytic\n}");
    CHECK(contains(msg, "cfg.json:3:"));
    msg = error_of("{\n  \"seed\": 1,,\n}");
    CHECK(contains(msg, "cfg.json:2:"));
}

TEST_CASE("scene hash tracks the scene only")
{
    RunConfig a;
    RunConfig b;
    b.output = "elsewhere";
    b.sampling.n_detectors = 3;
    CHECK(scene_hash(a.scene) == scene_hash(b.scene));
    b.scene.epsilon = 0.04;
    CHECK(scene_hash(a.scene) != scene_hash(b.scene));
    CHECK(scene_hash(a.scene).size() == 16);
}
