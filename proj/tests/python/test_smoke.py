import json
import math

import numpy as np
import pytest

import cmvlab

BERNOULLI = "atoms:(0.5,0.5);(-0.5,0.5)"


def test_block_is_unitary():
    e = cmvlab.cmv_matrix(BERNOULLI, 0, 31, seed=3)
    assert e.shape == (32, 32)
    assert np.allclose(e.conj().T @ e, np.eye(32), atol=1e-12)


def test_e_is_lm():
    l = cmvlab.cmv_matrix(BERNOULLI, -3, 20, seed=1, which="L")
    m = cmvlab.cmv_matrix(BERNOULLI, -3, 20, seed=1, which="M")
    e = cmvlab.cmv_matrix(BERNOULLI, -3, 20, seed=1)
    assert np.allclose(l @ m, e, atol=1e-13)


def test_eigenvalues_match_numpy_and_determinant():
    vals = cmvlab.eigenvalues(BERNOULLI, 0, 23, seed=5)
    ref = np.linalg.eigvals(cmvlab.cmv_matrix(BERNOULLI, 0, 23, seed=5))
    assert np.allclose(np.abs(vals), 1.0, atol=1e-10)
    d = np.abs(vals[:, None] - ref[None, :]).min(axis=1)
    assert d.max() < 1e-8
    z = np.exp(0.7j)
    assert cmvlab.det_P(BERNOULLI, 0, 23, seed=5, z=z) == pytest.approx(np.prod(z - ref), rel=1e-8)


def test_constant_exponent():
    r = cmvlab.lyapunov("constant:0.5+0i", 0.0, n=10000, samples=1)
    assert abs(r["gamma_hat"] - math.acosh(2 / math.sqrt(3))) < 1e-6


def test_tail_and_resonance_are_proportions():
    t = cmvlab.ldt_tail(BERNOULLI, 1.0, 0.08, 20, "both", 200, 0.16, seed=2)
    assert 0.0 <= t["lo"] <= t["p"] <= t["hi"] <= 1.0
    r = cmvlab.resonance(BERNOULLI, 2, 0.0, 20)
    assert r["p"] == 1.0 and r["threshold"] == 2.0


def test_verify_suite_passes():
    for rep in cmvlab.verify_suite(20, seed=9):
        assert rep["failures"] == 0, rep


def test_bad_literal_raises():
    with pytest.raises(ValueError):
        cmvlab.coefficients("atoms:(1.5,1)", 0, 3)


def test_cli_in_process():
    code, out, _ = cmvlab.run_cli(["verify", "--samples", "10"])
    assert code == 0
    assert len(json.loads(out)) == 7
    code, _, err = cmvlab.run_cli(["lyapunov", "--dist", "atoms:(1.5,1)"])
    assert code == 2 and "Usage" in err
