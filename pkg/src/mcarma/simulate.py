"""Exact second-order Gaussian simulation of the sampled process through the
state space, empirical autocovariances, and statistical verification against
the analytic autocovariance.

The one-step law of the linear state equation is exact: the state transition
is the matrix exponential and the innovation covariance is the stationary
covariance minus its one-step image, so no time-discretization error enters.
Gaussian noise suffices because every quantity this package verifies is a
second-order statement.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import LyapunovIllConditioned, NotPSD
from .filter_ma import Filter, filtered_acov, sampling_filter
from .model import McarmaModel, StateSpace, state_space
from .spectral import RationalSpectrum


@dataclass(frozen=True)
class StationaryCov:
    """Stationary state covariance: solution of the continuous Lyapunov equation."""

    gamma_g: np.ndarray     # (pd, pd), symmetric PSD
    residual: float         # relative residual of the Lyapunov solve


@dataclass(frozen=True)
class SimulationPath:
    """Equidistant observations with the full configuration that produced them."""

    delta: float
    n: int
    seed: int
    replication_id: int
    obs: np.ndarray         # (d, n)


def stationary_state_cov(ss: StateSpace, sigma_l: np.ndarray) -> StationaryCov:
    """Solve A G + G A^T + B SigmaL B^T = 0 by Kronecker vectorization.

    The vectorized system has dimension (pd)^2, small at desk scale; the
    relative residual is checked against 1e-7 and reported.
    """
    a = ss.a_mat
    rhs = ss.b_mat @ sigma_l @ ss.b_mat.T
    n = a.shape[0]
    eye = np.eye(n)
    big = np.kron(eye, a) + np.kron(a, eye)
    vec = np.linalg.solve(big, -rhs.reshape(-1, order="F"))
    g = vec.reshape((n, n), order="F")
    g = (g + g.T) / 2.0
    scale = max(np.abs(rhs).max(), 1e-300)
    residual = np.abs(a @ g + g @ a.T + rhs).max() / scale
    if residual > 1e-7:
        raise LyapunovIllConditioned(
            f"Lyapunov residual {residual:.3e} exceeds 1e-7 of the source scale")
    w = np.linalg.eigvalsh(g)
    if w.min() < -1e-10 * max(1.0, w.max()):
        raise NotPSD(f"stationary covariance has eigenvalue {w.min():.3e}")
    g.setflags(write=False)
    return StationaryCov(gamma_g=g, residual=float(residual))


def discretize(ss: StateSpace, gamma_g: np.ndarray, delta: float):
    """Exact one-step transition and innovation covariance for step ``delta``.

    T = expm(A delta) (scaling and squaring); the innovation covariance is
    Gamma_G - T Gamma_G T^T, which is exact and avoids quadrature of the
    noise integral.  Eigenvalues in [-1e-10, 0) are clipped to 0; anything
    lower raises ``NotPSD``.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    t = expm(ss.a_mat * delta)
    sig = gamma_g - t @ gamma_g @ t.T
    sig = (sig + sig.T) / 2.0
    w, v = np.linalg.eigh(sig)
    scale = max(1.0, w.max())
    if w.min() < -1e-10 * scale:
        raise NotPSD(f"innovation covariance has eigenvalue {w.min():.3e}")
    sig = (v * np.clip(w, 0.0, None)) @ v.T
    return t, (sig + sig.T) / 2.0


def _sqrt_psd(mat: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh((mat + mat.T) / 2.0)
    return v * np.sqrt(np.clip(w, 0.0, None))


def simulate_path(model: McarmaModel, delta: float, n: int, seed: int,
                  replication_id: int = 0) -> SimulationPath:
    """Draw one stationary path of the sampled process.

    The generator is counter-based (Philox) keyed by (seed, replication_id),
    so paths are reproducible bit-for-bit and replications are independent
    streams regardless of scheduling; no global RNG state is touched.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    ss = state_space(model)
    gamma_g = stationary_state_cov(ss, model.sigma_l).gamma_g
    t, sig = discretize(ss, gamma_g, delta)
    rng = np.random.Generator(np.random.Philox(key=[int(seed), int(replication_id)]))
    pd_ = ss.a_mat.shape[0]
    draws = rng.standard_normal((n, pd_))
    state = _sqrt_psd(gamma_g) @ draws[0]
    eps = draws[1:] @ _sqrt_psd(sig).T
    c = ss.c_mat
    obs = np.empty((model.d, n))
    obs[:, 0] = c @ state
    for k in range(1, n):
        state = t @ state + eps[k - 1]
        obs[:, k] = c @ state
    obs.setflags(write=False)
    return SimulationPath(delta=float(delta), n=int(n), seed=int(seed),
                          replication_id=int(replication_id), obs=obs)


def simulate_paths(model: McarmaModel, delta: float, n: int, seed: int,
                   replication_ids, max_workers: int | None = None):
    """Independent replications, embarrassingly parallel and deterministic.

    Respects the MCARMA_THREADS cap (default: hardware count); results are
    identical for any worker count because each replication owns its stream.
    """
    ids = list(replication_ids)
    if max_workers is None:
        max_workers = thread_count()
    if max_workers <= 1 or len(ids) <= 1:
        return [simulate_path(model, delta, n, seed, r) for r in ids]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        futs = [pool.submit(simulate_path, model, delta, n, seed, r) for r in ids]
        return [f.result() for f in futs]


def thread_count() -> int:
    """Parallelism cap: MCARMA_THREADS if set, else the hardware count."""
    env = os.environ.get("MCARMA_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def sample_acov(path, h_max: int) -> np.ndarray:
    """Biased empirical autocovariances at lags 0..h_max.

    Accepts a SimulationPath or a raw (d, n) observation array; normalization
    is 1/n at every lag.
    """
    obs = path.obs if isinstance(path, SimulationPath) else np.asarray(path, dtype=float)
    d, n = obs.shape
    if h_max >= n / 10:
        raise ValueError(f"h_max={h_max} too large for n={n} (need h_max < n/10)")
    out = np.empty((h_max + 1, d, d))
    for h in range(h_max + 1):
        out[h] = obs[:, h:] @ obs[:, :n - h].T / n
    return out


def apply_filter(path, filt: Filter) -> np.ndarray:
    """Run the sampling filter over a path; returns the valid part, (d, n - order)."""
    obs = path.obs if isinstance(path, SimulationPath) else np.asarray(path, dtype=float)
    n = obs.shape[1]
    m = filt.order
    if n <= m:
        raise ValueError(f"path of length {n} is too short for a filter of order {m}")
    out = np.zeros((obs.shape[0], n - m))
    for j, c in enumerate(filt.coeffs):
        out += c * obs[:, m - j:n - j]
    return out


# ---------------------------------------------------------------------------
# statistical verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    quantity: str
    lag: int
    z: float
    passed: bool


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple[CheckResult, ...]
    passed: bool

    def to_json_dict(self) -> dict:
        return {
            "checks": [
                {"quantity": c.quantity, "lag": c.lag, "z": c.z, "pass": c.passed}
                for c in self.checks
            ],
            "pass": self.passed,
        }


N_BATCHES = 20
Z_LIMIT = 4.0


def _batch_acovs(obs: np.ndarray, h_max: int) -> np.ndarray:
    """Per-batch biased autocovariances, (N_BATCHES, h_max+1, d, d)."""
    d, n = obs.shape
    length = n // N_BATCHES
    out = np.empty((N_BATCHES, h_max + 1, d, d))
    for b in range(N_BATCHES):
        seg = obs[:, b * length:(b + 1) * length]
        for h in range(h_max + 1):
            out[b, h] = seg[:, h:] @ seg[:, :length - h].T / length
    return out


def _zscores(obs: np.ndarray, theory: np.ndarray, h_max: int, label: str):
    full = np.empty_like(theory)
    d, n = obs.shape
    for h in range(h_max + 1):
        full[h] = obs[:, h:] @ obs[:, :n - h].T / n
    batches = _batch_acovs(obs, h_max)
    se = batches.std(axis=0, ddof=1) / np.sqrt(N_BATCHES)
    se = np.maximum(se, 1e-300)
    z = (full - theory) / se
    checks = []
    for h in range(h_max + 1):
        for i in range(d):
            for j in range(d):
                checks.append(CheckResult(quantity=f"{label}[{i},{j}]", lag=h,
                                          z=float(z[h, i, j]),
                                          passed=bool(abs(z[h, i, j]) <= Z_LIMIT)))
    return checks


def verify_model(model: McarmaModel, delta: float, n: int, seed: int,
                 h_max: int = 5) -> VerificationReport:
    """Simulate one path and test the sample autocovariances against theory.

    Componentwise z-scores use batch-means standard errors (20 batches) to
    absorb serial dependence; the report passes when every |z| <= 4.  The
    filtered chain is verified too: the filtered path's sample
    autocovariances are compared against the bilinear-identity values at lags
    0..p*d, which includes the vanishing lag p*d.
    """
    spec = RationalSpectrum.derive(model)
    path = simulate_path(model, delta, n, seed)
    theory = spec.autocov(delta * np.arange(h_max + 1))
    checks = _zscores(path.obs, theory, h_max, "gamma")
    filt = sampling_filter(model, delta)
    filtered = apply_filter(path, filt)
    fh = filt.order
    f_theory = np.array([filtered_acov(model, delta, h) for h in range(fh + 1)])
    checks += _zscores(filtered, f_theory, fh, "gamma_x")
    passed = all(c.passed for c in checks)
    return VerificationReport(checks=tuple(checks), passed=passed)
