import json
import math

import numpy as np
import pytest

import qpat


def test_free_kernel_closed_form():
    scene = qpat.Scene.default()
    scene.epsilon = 0.0
    x, y = (3.0, 0.0, 0.0), (0.2, 0.1, 0.0)
    d = math.dist(x, y)
    k = qpat.kernel_eval(scene, d + 0.5, x, y)
    assert k["total"] == pytest.approx(0.25 / (8 * math.pi * d), rel=1e-14)
    assert qpat.kernel_eval(scene, d, x, y)["total"] == 0.0


def test_kernel_against_monte_carlo():
    scene = qpat.Scene.default()
    x, y = (3.0, 0.0, 0.0), (0.3, 0.05, 0.1)
    t = math.dist(x, y) + 0.6
    k = qpat.kernel_eval(scene, t, x, y)
    est, se = qpat.mc_kernel_integrals(scene, t, x, y, samples=200000, seed=3)
    assert abs(k["total"] - k["leading"] - est) <= 3 * se


def test_large_time_polynomial():
    scene = qpat.Scene.default()
    x, y = (0.0, 3.0, 0.0), (0.25, -0.1, 0.05)
    t = qpat.t_support_bound(scene, x, y) + 0.5
    k = qpat.kernel_eval(scene, t, x, y)["total"]
    assert k == pytest.approx(qpat.kernel_large_t(scene, t, x, y), rel=1e-4)


def test_scene_json_round_trip():
    scene = qpat.Scene.default()
    again = qpat.Scene.from_json(scene.to_json())
    assert again.hash() == scene.hash()
    assert json.loads(again.to_json())["epsilon"] == 0.05
    assert scene.f((0.0, 0.0, 0.0)) == pytest.approx(1.0)


def test_config_errors_are_typed():
    with pytest.raises(qpat.ConfigError, match="/sampling/n_detectors"):
        qpat.RunConfig.parse('{"sampling": {"n_detectors": 0}}')
    with pytest.raises(qpat.Error):
        qpat.RunConfig.parse("{", "broken.json")


def test_coarse_analytic_pipeline():
    r = qpat.pipeline_analytic(qpat.Scene.default(), nodes=24)
    assert r["f"].shape == (24, 24, 24)
    assert r["diagnostics"]["f_rel_l2"] < 0.05
    assert r["diagnostics"]["alpha1_eps_rel_l2"] < 0.1
    assert r["geometry"]["spacing"] == pytest.approx(2.0 / 23)


def test_field_round_trip(tmp_path):
    values = np.arange(4 * 3 * 2, dtype=float).reshape(4, 3, 2)
    path = tmp_path / "field.bin"
    qpat.write_field(path, values, 0.5, (1.0, 2.0, 3.0))
    back, geom = qpat.read_field(path)
    assert np.array_equal(back, values)
    assert geom["shape"] == (4, 3, 2)
    assert geom["origin"] == [1.0, 2.0, 3.0]
    pngs = qpat.export_slices(path, 2, [1], tmp_path / "png")
    assert pngs[0].name == "field_z1.png"


def test_reconstruct_command_writes_fields(tmp_path):
    cfg = qpat.RunConfig.parse('{"sampling": {"lattice": {"nodes": 16}}}')
    r = qpat.reconstruct(cfg, tmp_path)
    for name in ("alpha1_eps.bin", "f.bin", "rho1_eps.bin", "diagnostics.json"):
        assert (tmp_path / name).exists()
    f, _ = qpat.read_field(tmp_path / "f.bin")
    assert np.array_equal(f, r["f"])
    cfg.path = "numeric"
    with pytest.raises(qpat.IoError, match="measurements.bin"):
        qpat.reconstruct(cfg, tmp_path / "empty")
