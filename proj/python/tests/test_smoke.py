"""Smoke tests for the python bindings."""

import json
import math
import os

import pytest

import openbook as ob


def test_blend_endpoints():
    assert ob.blend(0.0, 3.0, 7.0) == 3.0
    assert ob.blend(1.0, 3.0, 7.0) == 7.0
    assert ob.blend(0.5, 0.0, 1.0) == 0.5


def test_profile_basics():
    p = ob.build_profile(c=0.1, kappa="-sqrt2/100")
    assert p.f(0.0) == 0.1
    assert p.g(0.0) == 0.0
    assert p.f(1.0) == 0.0
    assert p.g(1.0) == 1.0
    s = p.eval(0.1)
    assert s["D"] == pytest.approx(0.02, rel=1e-12)
    rep = p.verify(1000)
    assert rep["pass"]


def test_kappa_catalogue():
    cat = ob.kappa_catalogue()
    assert len(cat) == 9
    assert "-sqrt2/100" in cat
    with pytest.raises(ValueError):
        ob.build_profile(kappa="-phi/100")


def test_perturbation():
    p = ob.build_profile()
    pe = p.perturb(0.01)
    assert pe.f(1.0) == pytest.approx(0.01, rel=1e-12)
    assert pe.f(0.5) == p.f(0.5)  # identity below 1 - delta'


def test_half_cylinder():
    p = ob.build_profile()
    sol = ob.solve_half_cylinder(p, s_max=300.0)
    rho = sol["rho"]
    assert rho[0] == 1.0
    assert all(b < a for a, b in zip(rho, rho[1:]))
    assert sol["fit_exponent"] == pytest.approx(p.kappa, abs=1e-3)


def test_indices():
    assert ob.conley_zehnder_rotation(math.sqrt(2.0) / 100.0) == 1
    assert ob.conley_zehnder_rotation(1.004) == 3
    assert ob.fredholm_index(0, [1]) == 2
    assert ob.fredholm_index(2, [1]) == -2
    assert ob.normal_chern(2, 0, 0) == 0
    p = ob.build_profile()
    path = ob.linearized_return_rotation(p, 1)
    assert path["mu_cz"] == 1
    assert path["period"] == pytest.approx(0.1)


def test_pipeline(tmp_path):
    configs = os.path.join(os.path.dirname(__file__), "..", "..", "configs")
    cfg = os.path.join(configs, "tight-s3-disk.cfg")
    if not os.path.exists(cfg):
        pytest.skip("bundled configs not present")
    # shrink the grids through a temporary config copy to keep this quick
    text = open(cfg).read()
    for key in ("grid.theta", "grid.rho", "grid.phi", "grid.page"):
        text = text.replace(f"{key} = 50", f"{key} = 12")
    text = text.replace("foliation.points = 100000", "foliation.points = 2000")
    small = tmp_path / "small.cfg"
    small.write_text(text)
    out = tmp_path / "run"
    result = ob.run_pipeline(str(small), str(out))
    assert result["pass"]
    report = json.loads(result["report_json"])
    assert report["indices"]["fredholm_index"] == 2
    assert (out / "report.json").exists()
