import math

import numpy as np
import pytest

import hiflab


def test_version():
    assert hiflab.__version__ == "0.1.0"


def test_eigenvalue_matches_closed_form():
    lam = hiflab.first_dirichlet_eigenvalue(33, 33)
    closed = hiflab.dirichlet_eigenvalue_closed_form(33, 33)
    assert lam == pytest.approx(closed, rel=1e-8)
    lam65 = hiflab.first_dirichlet_eigenvalue(65, 65)
    assert lam65 == pytest.approx(2.0 * math.pi**2, rel=1e-3)


def test_solve_manufactured_exp():
    case = hiflab.manufactured_case(65, 65, "exp", c=1.0)
    u, stats = hiflab.solve(case["a"], case["q"], case["u_exact"], tol=1e-12)
    assert stats["iterations"] > 0
    assert np.max(np.abs(u - case["u_exact"])) <= 1e-3


def test_field_io_round_trip(tmp_path):
    rng = np.random.default_rng(3)
    field = rng.normal(size=(9, 13))
    path = str(tmp_path / "f.hif")
    hiflab.write_field(path, field)
    back = hiflab.read_field(path)
    np.testing.assert_array_equal(field, back)

    planes = np.stack([np.full((7, 7), 2.0), np.zeros((7, 7)), np.ones((7, 7))])
    mpath = str(tmp_path / "m.hif")
    hiflab.write_field(mpath, planes)
    np.testing.assert_array_equal(planes, hiflab.read_field(mpath))


def test_bad_magic_raises(tmp_path):
    path = tmp_path / "junk.hif"
    path.write_bytes(b"XXXX" + b"\x00" * 32)
    with pytest.raises(hiflab.FieldFileError):
        hiflab.read_field(str(path))


def test_round_trip_reconstruction():
    n = 33
    ones = np.ones((n, n))
    q_true = 0.5 + 0.3 * hiflab.sample_coefficient(n, n, seed=5, amplitude=1.0,
                                                   lo=-1.0, hi=1.0)
    u, _ = hiflab.solve(ones, q_true, ones, tol=1e-12)
    h = hiflab.synthesize("qu", ones, q_true, u)
    res = hiflab.recover_q_from_qu(h, ones, ones)
    assert res["success"]
    assert res["rho_hat"] < 1.0
    assert np.max(np.abs(res["field"] - q_true)) <= 1e-6


def test_norms_and_gradient():
    n = 33
    x = np.linspace(0.0, 1.0, n)
    u = np.tile(x, (n, 1))
    dx, dy = hiflab.gradient(u)
    assert np.allclose(dx, 1.0, atol=1e-12)
    assert np.allclose(dy, 0.0, atol=1e-12)
    nb = hiflab.norms(u)
    assert nb["linf"] == pytest.approx(1.0)
    assert nb["lipschitz"] == pytest.approx(1.0)


def test_sampler_is_deterministic():
    a = hiflab.sample_coefficient(17, 17, seed=11, amplitude=0.5)
    b = hiflab.sample_coefficient(17, 17, seed=11, amplitude=0.5)
    np.testing.assert_array_equal(a, b)


def test_run_experiment_smoke():
    rep = hiflab.run_experiment("glb", grid_n=17, samples=2, seed=3,
                                options={"illumination": "linear_x"})
    assert rep["pass"]
    assert "eta_hat" in rep["summary"]
    assert rep["samples_csv"].startswith("# experiment=glb")
