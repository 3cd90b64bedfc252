"""Shared test oracles: finite differences and gradient agreement checks."""

from __future__ import annotations

import numpy as np
import pytest


def central_difference(f, flat: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """Central finite-difference gradient of scalar f over a flat vector.

    Perturbs the vector in place coordinate by coordinate, restoring it
    afterwards, so ``f`` may close over live parameter views.
    """
    grad = np.empty_like(flat)
    for k in range(flat.shape[0]):
        original = flat[k]
        flat[k] = original + h
        up = f()
        flat[k] = original - h
        down = f()
        flat[k] = original
        grad[k] = (up - down) / (2.0 * h)
    return grad


def assert_grads_close(
    analytic: np.ndarray,
    numeric: np.ndarray,
    rel_tol: float = 1e-4,
    abs_floor: float = 1e-7,
) -> None:
    """Elementwise |a - n| <= rel_tol * max(|a|, |n|) + abs_floor."""
    analytic = np.asarray(analytic).ravel()
    numeric = np.asarray(numeric).ravel()
    assert analytic.shape == numeric.shape
    scale = np.maximum(np.abs(analytic), np.abs(numeric))
    gap = np.abs(analytic - numeric)
    bad = gap > rel_tol * scale + abs_floor
    assert not bad.any(), (
        f"{bad.sum()} of {bad.size} gradient entries disagree; worst "
        f"gap={gap.max():.3e} at scale={scale[gap.argmax()]:.3e}"
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
