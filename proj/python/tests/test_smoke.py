"""End-to-end smoke tests for the python module."""

import json

import numpy as np
import pytest

import glx


def path_cov():
    m = np.eye(4)
    for i, j, v in [(0, 1, 0.55), (1, 2, -0.5), (2, 3, 0.45)]:
        m[i, j] = m[j, i] = v
    return m


def test_lambda_for_k():
    sigma = path_cov()
    # Magnitude ladder 0.55, 0.5, 0.45: midpoints between consecutive rungs.
    assert glx.lambda_for_k(sigma, 1) == pytest.approx(0.525, abs=1e-12)
    assert glx.lambda_for_k(sigma, 3) == pytest.approx(0.225, abs=1e-12)


def test_check_reports_exactness():
    rep = glx.check(path_cov(), 0.3)
    assert rep["all_exact"] is True
    assert rep["acyclic"] is True
    assert rep["alpha"] == pytest.approx(0.25, abs=1e-12)
    assert rep["components"] and rep["components"][0]["exact"] is True


def test_closed_matches_numerical_solver():
    sigma = path_cov()
    closed = glx.estimate(sigma, 0.3, method="closed")
    solved = glx.estimate(sigma, 0.3, method="glasso", tol=1e-9)
    assert closed["method"] == "closed_exact"
    assert closed["kkt_residual"] <= 1e-10
    assert np.max(np.abs(closed["estimate"] - solved["estimate"])) <= 1e-7
    assert closed["nnz_offdiag"] == 3


def test_closed_refuses_failed_conditions():
    triangle = np.eye(3)
    for i, j in [(0, 1), (1, 2), (0, 2)]:
        triangle[i, j] = triangle[j, i] = 0.5
    with pytest.raises(RuntimeError):
        glx.estimate(triangle, 0.1, method="closed")
    # The ungated approximate formula still answers.
    approx = glx.estimate(triangle, 0.1, method="approx")
    assert approx["method"] == "closed_approx"


def test_epsilon_certificate_acyclic_is_zero():
    cert = glx.epsilon_certificate(path_cov(), 0.3)
    assert cert["unbounded"] is False
    assert cert["epsilon"] == 0.0
    assert cert["girth"] == 0


def test_asymmetric_input_rejected():
    bad = np.eye(3)
    bad[0, 1] = 0.5  # not mirrored
    with pytest.raises(ValueError):
        glx.check(bad, 0.1)


def test_run_cli_roundtrip(tmp_path):
    cov = str(tmp_path / "cov.mtx")
    report = str(tmp_path / "report.json")
    assert glx.run_cli(["gen", "tree", "--d", "10", "--omega", "0.05",
                        "--seed", "3", "--out", cov, "--report", report]) == 0
    lam = json.load(open(report))["metrics"]["lambda_recommended"]
    est_report = str(tmp_path / "est.json")
    rc = glx.run_cli(["estimate", "--cov", cov, "--lambda", repr(lam),
                      "--method", "closed", "--report", est_report])
    assert rc == 0
    assert json.load(open(est_report))["metrics"]["method"] == "closed_exact"
