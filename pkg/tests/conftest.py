"""Shared fixtures: the three reference models and a random stable generator."""

import numpy as np
import pytest

from mcarma import validate_model


@pytest.fixture(scope="session")
def m1():
    """First-order bivariate model with roots -3, -2."""
    return validate_model({
        "p": 1, "q": 0, "d": 2,
        "A": [[[3.0, 1.0], [0.0, 2.0]]],
        "B": [[[1.0, 0.0], [0.0, 1.0]]],
        "SigmaL": [[1.0, 0.0], [0.0, 1.0]],
    })


@pytest.fixture(scope="session")
def m2():
    """Scalar second-order model, characteristic polynomial (z+1)(z+2)."""
    return validate_model({
        "p": 2, "q": 0, "d": 1,
        "A": [[[3.0]], [[2.0]]],
        "B": [[[1.0]]],
        "SigmaL": [[1.0]],
    })


@pytest.fixture(scope="session")
def repeated_root():
    """Scalar model with characteristic polynomial (z+1)^2."""
    return validate_model({
        "p": 2, "q": 0, "d": 1,
        "A": [[[2.0]], [[1.0]]],
        "B": [[[1.0]]],
        "SigmaL": [[1.0]],
    })


def random_stable_model(rng, d=None, p=None, q=None):
    """Random stable model with d <= 3, p <= 3, q < p.

    The autoregressive polynomial is built as a product of first-order
    factors with explicitly stabilized matrices, so stability holds by
    construction and validation cannot reject.
    """
    d = int(d if d is not None else rng.integers(1, 4))
    p = int(p if p is not None else rng.integers(1, 4))
    q = int(q if q is not None else rng.integers(0, p))
    coeffs = [np.eye(d)]
    for _ in range(p):
        raw = rng.uniform(-1.0, 1.0, (d, d))
        shift = max(np.linalg.eigvals(raw).real) + rng.uniform(0.35, 1.2)
        factor = raw - shift * np.eye(d)
        nxt = [np.zeros((d, d)) for _ in range(len(coeffs) + 1)]
        for j, c in enumerate(coeffs):
            nxt[j + 1] += c
            nxt[j] -= c @ factor
        coeffs = nxt
    ar = [coeffs[p - i] for i in range(1, p + 1)]
    ma = rng.uniform(-1.0, 1.0, (q + 1, d, d))
    half = rng.uniform(-1.0, 1.0, (d, d))
    sigma = half @ half.T + 0.3 * np.eye(d)
    return validate_model({"p": p, "q": q, "d": d, "A": [a.tolist() for a in ar],
                           "B": ma.tolist(), "SigmaL": sigma.tolist()})
