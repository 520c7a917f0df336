import numpy as np
import pytest

import nilmoduli as nm


def test_describe():
    d = nm.describe("h9")
    assert d["nilpotency_step"] == 3
    assert d["derivation_dim"] == 15
    assert d["component_count"] == 8
    assert nm.describe("(0,0,0,0,0,0)")["nilpotency_step"] == 1
    assert nm.jacobi_residual("h6") == 0


def test_canonicalize_h6():
    g = np.diag([1, 1, 1, 1, 3, 2.0])
    c = nm.canonicalize("h6", g)
    assert c["form"]["params"]["a"] == pytest.approx(2)
    assert c["form"]["params"]["b"] == pytest.approx(3)


def test_orbit_invariance():
    form = {"algebra": "h4", "params": {"r": 0.5, "a": 1.3, "b": 0.2, "c": 0.8}}
    g = nm.realize(form)
    phi = nm.random_automorphism("h4", 7, 1)
    assert nm.is_automorphism("h4", phi)
    c = nm.canonicalize("h4", nm.pullback_metric(g, phi))
    for k, v in form["params"].items():
        assert c["form"]["params"][k] == pytest.approx(v, abs=1e-7)


def test_isometry_and_verify():
    form = {"algebra": "h6", "params": {"a": 1.5, "b": 2.5}}
    d = nm.isometry_group(form)
    assert d["finite_order"] == 16
    assert nm.verify_isometry_group(form, seed=3)["pass"]


def test_hermitian_h6():
    h = nm.hermitian({"algebra": "h6", "params": {"a": 1, "b": 1}})
    assert len(h["solutions"]) > 0


def test_search_h9hat():
    g = np.diag([1, 1, 1, 1, 4, 1.0])
    r = nm.hermitian_search("h9hat", g, budget=16, seed=1)
    assert not r["found"]
    assert r["best_residual"] > nm.SEARCH_NONE_THRESHOLD


def test_errors():
    bad = np.eye(6)
    bad[5, 5] = -1
    with pytest.raises(nm.NotSPD):
        nm.canonicalize("h6", bad)
    with pytest.raises(nm.Error):
        nm.isometry_group({"algebra": "h6", "params": {"a": 3, "b": 2}})
    with pytest.raises(nm.ParseError):
        nm.describe("(0,0,0,0,1x,0)")
