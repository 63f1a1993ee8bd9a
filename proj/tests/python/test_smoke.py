import math

import numpy as np
import pytest

import muonlab


def test_orthogonalize_exact_identity():
    a = np.diag([3.0, 2.0])
    o, degenerate = muonlab.orthogonalize(a)
    assert not degenerate
    assert np.allclose(o, np.eye(2), atol=1e-12)


def test_orthogonalize_matches_numpy_polar():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((8, 5))
    o, _ = muonlab.orthogonalize(a)
    u, _, vt = np.linalg.svd(a, full_matrices=False)
    assert np.allclose(o, u @ vt, atol=1e-9)


def test_ns5_within_band():
    rng = np.random.default_rng(1)
    a = rng.standard_normal((16, 8))
    approx, _ = muonlab.orthogonalize(a, method="ns5")
    exact, _ = muonlab.orthogonalize(a, method="svd")
    assert np.linalg.norm(approx - exact) <= 0.35 * math.sqrt(8)


def test_scalar_quintic_one_step():
    assert muonlab.ns_scalar_iterate(1.0, steps=1) == pytest.approx(0.7010)


def test_singular_values_and_nuclear_norm():
    a = np.diag([3.0, 2.0])
    assert muonlab.singular_values(a) == pytest.approx([3.0, 2.0])
    assert muonlab.nuclear_norm(a) == pytest.approx(5.0)


def test_muon_step_update_norm():
    rng = np.random.default_rng(2)
    w = rng.standard_normal((6, 4))
    g = rng.standard_normal((6, 4))
    m0 = np.zeros((6, 4))
    w1, m1, update_norm, degenerate = muonlab.muon_step(w, g, m0, eta=0.5)
    assert not degenerate
    assert update_norm == pytest.approx(0.5 * 2.0)  # eta * sqrt(n)
    assert np.allclose(m1, 0.05 * g, atol=1e-12)
    assert w1.shape == w.shape


def test_predict_cbs_table():
    cbs = muonlab.predict_cbs(beta=0.95, lam=0.1, sigma2=1.0, epsilon=0.01)
    assert cbs["no_nesterov_no_wd"] == pytest.approx(10.0)
    assert cbs["nesterov_no_wd"] == pytest.approx(14.5)
    assert cbs["no_nesterov_wd"] == pytest.approx(20.0)
    assert cbs["nesterov_wd"] == pytest.approx(24.5)


def test_theorem_bound_ledger():
    bb = muonlab.theorem_bound(
        "nesterov_wd", 100, 8, L=1.0, sigma2=1.0, n=4,
        f_w0=10.0, w0_norm=5.0, wstar_norm=1.0, delta=2.0,
        eta=0.05, lam=0.1, beta=0.9,
    )
    recomposed = bb["x"] / 100 + bb["y"] / 8 + bb["sublinear"] + bb["z"]
    assert bb["total"] == pytest.approx(recomposed, rel=1e-12)
    # beta_bar = (2*0.9 + 1)(1 - 0.9)/2 = 0.14, plus lambda/2
    assert bb["y"] == pytest.approx((0.14 + 0.05) * 1.0)


def test_steps_needed_and_critical_batch():
    assert muonlab.steps_needed(100.0, 1.0, 0.1, 20) == pytest.approx(2000.0)
    assert muonlab.critical_batch(1.0, 0.1) == pytest.approx(20.0)


def test_param_norm_bound_cap():
    assert muonlab.param_norm_bound(5, n=4, w0_norm=7.0, eta=10.0, lam=0.1) \
        == pytest.approx(20.0)


def test_run_training_deterministic():
    kwargs = dict(m=8, n=4, sigma2=0.5, eta=0.1, lam=0.1, beta=0.9,
                  batch=4, steps=50, seed=3)
    a = muonlab.run_training(**kwargs)
    b = muonlab.run_training(**kwargs)
    assert a["status"] == "completed"
    assert a["loss"] == b["loss"]
    assert a["loss"][-1] < a["loss"][0]
    assert np.array_equal(a["final_w"], b["final_w"])


def test_audit_problem():
    audit = muonlab.audit_problem(m=6, n=4, sigma2=1.0)
    assert audit["all_ok"]
