"""Sparse inverse covariance estimation via thresholding closed forms."""

from ._glx import (
    check,
    epsilon_certificate,
    estimate,
    lambda_for_k,
    run_cli,
)

__all__ = [
    "check",
    "epsilon_certificate",
    "estimate",
    "lambda_for_k",
    "run_cli",
]
