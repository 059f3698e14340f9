"""High-frequency sampling filter, the filtered-process spectrum as a matrix
trigonometric polynomial, moving-average factorization, and the small-step
asymptotic moving-average representation.

Filtering the sampled process with ``prod_i (1 - e^{delta lam_i} B)`` (one
factor per characteristic root, counted with multiplicity) turns it into a
vector moving average of order strictly less than p*d; as the step shrinks
the representation collapses onto a scalar polynomial with ``p(d-1)+q`` unit
roots and ``p-q-1`` roots supplied by the unit-disc map of the packaged
polynomial roots, with all covariance structure pushed into the innovation
covariance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import eulerian
from .errors import DegreeReductionFailed, NoConvergence, NotPD, RootOnCircle
from .model import McarmaModel, char_roots
from .spectral import RationalSpectrum

TWO_PI = 2.0 * np.pi


# ---------------------------------------------------------------------------
# the sampling filter
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Filter:
    """Scalar filter ``prod_i (1 - e^{delta lam_i} z)``; coeffs[0] == 1."""

    coeffs: np.ndarray      # (pd + 1,), real
    delta: float

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1


def sampling_filter(model: McarmaModel, delta: float) -> Filter:
    """Expand the filter polynomial over all roots with multiplicity.

    Conjugate root pairs make the coefficients real; the imaginary residue is
    checked against 1e-12 before being discarded.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    lams = char_roots(model).expanded()
    coeffs = np.array([1.0 + 0j])
    for lam in lams:
        coeffs = np.convolve(coeffs, np.array([1.0, -np.exp(delta * lam)]))
    scale = max(1.0, np.abs(coeffs).max())
    if np.abs(coeffs.imag).max() > 1e-12 * scale:
        raise ArithmeticError(
            f"filter coefficients have imaginary residue {np.abs(coeffs.imag).max():.3e}")
    out = coeffs.real.copy()
    out[0] = 1.0
    out.setflags(write=False)
    return Filter(coeffs=out, delta=float(delta))


def power_transfer(filt: Filter, omega) -> float | np.ndarray:
    """Squared modulus of the filter frequency response at ``omega``."""
    z = np.exp(1j * np.asarray(omega, dtype=float))
    val = np.polynomial.polynomial.polyval(z, filt.coeffs)
    out = np.abs(val) ** 2
    return float(out) if np.isscalar(omega) or np.ndim(omega) == 0 else out


# ---------------------------------------------------------------------------
# filtered spectrum and autocovariance
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrigMatrixPolynomial:
    """Matrix trigonometric polynomial ``sum_k F_k e^{i k omega}``.

    ``coeffs[i]`` holds the coefficient of index ``k = i - order``; the
    function is Hermitian-matrix valued, i.e. ``F_{-k} = F_k*``.
    """

    order: int
    coeffs: np.ndarray      # (2*order + 1, d, d), complex

    def coeff(self, k: int) -> np.ndarray:
        if abs(k) > self.order:
            return np.zeros_like(self.coeffs[0])
        return self.coeffs[k + self.order]

    def __call__(self, omega):
        ks = np.arange(-self.order, self.order + 1)
        phases = np.exp(1j * np.multiply.outer(np.asarray(omega, dtype=float), ks))
        out = np.tensordot(phases, self.coeffs, axes=([phases.ndim - 1], [0]))
        return out


def filtered_spectrum(model: McarmaModel, delta: float) -> TrigMatrixPolynomial:
    """Spectral density of the filtered process as a trigonometric polynomial.

    The product of the power transfer function with the sampled density is a
    trigonometric polynomial whose degree drops from p*d to p*d - 1 because
    the top coefficient is proportional to the (vanishing) sum of residue
    asymmetries.  It is recovered here by sampling at 4 p d + 1 equispaced
    frequencies and inverse discrete Fourier interpolation (robust for
    repeated roots, no closed-form bookkeeping); the order-p*d coefficient is
    asserted to vanish and the result truncated to order p*d - 1.
    """
    spec = RationalSpectrum.derive(model)
    filt = sampling_filter(model, delta)
    n = model.p * model.d
    nodes = 4 * n + 1
    omegas = TWO_PI * np.arange(nodes) / nodes
    vals = np.array([power_transfer(filt, w) * spec.f_sampled_exact(delta, w)
                     for w in omegas])
    ks = np.arange(-n, n + 1)
    phases = np.exp(-1j * np.outer(ks, omegas))
    fk = np.tensordot(phases, vals, axes=1) / nodes
    norms = np.array([np.abs(fk[i]).max() for i in range(len(ks))])
    top = max(norms[0], norms[-1])
    if top > 1e-9 * norms.max():
        raise DegreeReductionFailed(
            f"order-{n} coefficient has size {top:.3e}, above 1e-9 of the "
            f"largest coefficient {norms.max():.3e}")
    m = n - 1
    out = fk[1:-1].copy()
    for k in range(1, m + 1):
        avg = (out[m + k] + out[m - k].conj().T) / 2.0
        out[m + k] = avg
        out[m - k] = avg.conj().T
    out[m] = (out[m] + out[m].conj().T) / 2.0
    out.setflags(write=False)
    return TrigMatrixPolynomial(order=m, coeffs=out)


def filtered_acov(model: McarmaModel, delta: float, h: int) -> np.ndarray:
    """Autocovariance of the filtered process at integer lag ``h``.

    Bilinear filter identity: the filter's coefficient autocorrelation
    weights the continuous autocovariance on the step grid.  Vanishes for
    ``|h| >= p*d`` (moving-average order bound) and equals ``2 pi`` times the
    Fourier coefficient of index ``-h`` of the filtered spectrum.
    """
    spec = RationalSpectrum.derive(model)
    phi = sampling_filter(model, delta).coeffs
    n = len(phi) - 1
    h = int(h)
    acc = np.zeros((model.d, model.d))
    grid = spec.autocov(delta * np.arange(0, n + abs(h) + 1))

    def gamma(t_idx: int) -> np.ndarray:
        return grid[t_idx] if t_idx >= 0 else grid[-t_idx].T

    for r in range(-n, n + 1):
        w = float(phi[max(0, -r):len(phi) - max(0, r)] @ phi[max(0, r):len(phi) - max(0, -r)])
        acc += w * gamma(h + r)
    return acc


# ---------------------------------------------------------------------------
# moving-average factorization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MaRepresentation:
    """Moving-average coefficients with identity leading matrix.

    ``psi[0]`` is the identity; ``sigma_z`` carries all scale.  ``residual``
    is the largest relative mismatch between the autocovariances implied by
    (psi, sigma_z) and the fitted input.
    """

    psi: np.ndarray         # (m+1, d, d), real, psi[0] = I
    sigma_z: np.ndarray     # (d, d), symmetric PSD
    residual: float
    iterations: int
    converged: bool

    @property
    def order(self) -> int:
        return len(self.psi) - 1

    def implied_acov(self, h: int) -> np.ndarray:
        h = abs(int(h))
        m = self.order
        acc = np.zeros_like(self.sigma_z)
        for j in range(0, m - h + 1):
            acc += self.psi[j + h] @ self.sigma_z @ self.psi[j].T
        return acc


def _as_matrix_seq(acov) -> np.ndarray:
    arr = np.asarray(acov, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None, None]
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
        raise ValueError(f"autocovariance sequence must be (m+1, d, d), got {arr.shape}")
    return arr


def _reconstruction_residual(psi: np.ndarray, sigma: np.ndarray, gam: np.ndarray) -> float:
    scale = max(np.abs(gam[0]).max(), 1e-300)
    worst = 0.0
    m = len(psi) - 1
    for h in range(len(gam)):
        acc = np.zeros_like(sigma)
        for j in range(0, m - h + 1):
            acc += psi[j + h] @ sigma @ psi[j].T
        worst = max(worst, np.abs(acc - gam[h]).max() / scale)
    return worst


def innovations_factorization(acov, m: int | None = None, tol: float = 1e-10,
                              max_iters: int = 100000) -> MaRepresentation:
    """Fit an invertible vector MA(m) to the autocovariances by the
    innovations recursion.

    Runs the multivariate one-step-prediction recursion on the Toeplitz
    kernel of the input until the banded prediction coefficients change by
    less than ``tol`` in Frobenius norm, then reads the limiting band off as
    the MA coefficients and the limiting prediction-error covariance as the
    innovation covariance.  Near a unit-root MA the iteration converges
    slowly (the budget is the caller's knob); exhausting ``max_iters`` raises
    ``NoConvergence`` carrying the last reconstruction residual.
    """
    gam = _as_matrix_seq(acov)
    if m is None:
        m = len(gam) - 1
    if m > len(gam) - 1:
        raise ValueError(f"m={m} exceeds the available lags {len(gam) - 1}")
    d = gam.shape[1]
    g0 = gam[0]
    scale = max(np.abs(g0).max(), 1e-300)
    if np.abs(g0 - g0.T).max() > 1e-10 * scale:
        raise NotPD("lag-zero autocovariance is not symmetric")
    w = np.linalg.eigvalsh((g0 + g0.T) / 2.0)
    if w.min() <= 1e-12 * max(1.0, w.max()):
        raise NotPD(f"lag-zero autocovariance is singular (eigenvalue {w.min():.3e})")
    if m == 0:
        return MaRepresentation(psi=np.eye(d)[None].copy(), sigma_z=g0.copy(),
                                residual=0.0, iterations=0, converged=True)

    def gamma(h: int) -> np.ndarray:
        h = abs(h)
        return gam[h] if h <= len(gam) - 1 else np.zeros((d, d))

    vs = [g0]
    thetas: list[dict[int, np.ndarray]] = [dict()]     # thetas[n][j], j = 1..m
    iterations = 0
    for n in range(1, max_iters + 1):
        iterations = n
        row: dict[int, np.ndarray] = {}
        for k in range(max(0, n - m), n):
            j1 = n - k
            acc = gamma(j1).copy()
            for i in range(max(0, n - m), k):
                tki = thetas[k].get(k - i)
                if tki is None:
                    continue
                acc -= row[n - i] @ vs[i] @ tki.T
            row[j1] = np.linalg.solve(vs[k].T, acc.T).T
        vn = g0.copy()
        for i in range(max(0, n - m), n):
            t = row[n - i]
            vn -= t @ vs[i] @ t.T
        thetas.append(row)
        vs.append((vn + vn.T) / 2.0)
        if n > m:
            change = 0.0
            for j in range(1, m + 1):
                cur = row.get(j, np.zeros((d, d)))
                prev = thetas[n - 1].get(j, np.zeros((d, d)))
                change = max(change, float(np.linalg.norm(cur - prev)))
            if change < tol:
                psi = np.concatenate([np.eye(d)[None],
                                      [row.get(j, np.zeros((d, d))) for j in range(1, m + 1)]])
                sigma = vs[-1]
                resid = _reconstruction_residual(psi, sigma, gam)
                return MaRepresentation(psi=psi, sigma_z=sigma, residual=resid,
                                        iterations=iterations, converged=True)
    row = thetas[-1]
    psi = np.concatenate([np.eye(d)[None],
                          [row.get(j, np.zeros((d, d))) for j in range(1, m + 1)]])
    resid = _reconstruction_residual(psi, vs[-1], gam)
    raise NoConvergence(resid, f"innovations recursion did not converge in "
                               f"{max_iters} iterations; last residual {resid:.3e}")


def scalar_factorization(acov) -> MaRepresentation:
    """Exact MA factorization for one-dimensional autocovariances.

    Factors the autocovariance generating polynomial by its roots, keeps the
    representative with all roots outside the unit disc, and rescales.  Used
    as the independent oracle for the innovations route.  A root within
    1e-10 of the unit circle is a genuine boundary case and is reported, not
    guessed around.
    """
    gam = _as_matrix_seq(acov)
    if gam.shape[1] != 1:
        raise ValueError("scalar factorization requires d = 1")
    g = gam[:, 0, 0]
    scale = np.abs(g).max()
    if scale == 0.0:
        raise NotPD("autocovariance sequence is identically zero")
    m = len(g) - 1
    while m > 0 and abs(g[m]) <= 1e-14 * scale:
        m -= 1
    g = g[:m + 1]
    if g[0] <= 0:
        raise NotPD(f"lag-zero autocovariance must be positive, got {g[0]}")
    if m == 0:
        return MaRepresentation(psi=np.ones((1, 1, 1)), sigma_z=np.array([[g[0]]]),
                                residual=0.0, iterations=0, converged=True)
    full = np.concatenate([g[::-1], g[1:]])           # ascending coeffs of z^m * G(z)
    roots = np.roots(full[::-1])
    mods = np.abs(roots)
    on_circle = np.abs(mods - 1.0) < 1e-10
    if np.any(on_circle):
        raise RootOnCircle(
            f"generating-polynomial root {roots[on_circle][0]} lies on the unit circle")
    outside = roots[mods > 1.0]
    if len(outside) != m:
        raise ArithmeticError(
            f"expected {m} roots outside the unit circle, found {len(outside)}")
    psi_c = np.array([1.0 + 0j])
    for r in outside:
        psi_c = np.convolve(psi_c, np.array([1.0, -1.0 / r]))
    if np.abs(psi_c.imag).max() > 1e-10 * max(1.0, np.abs(psi_c).max()):
        raise ArithmeticError("factor coefficients have non-negligible imaginary part")
    psi = psi_c.real
    sigma = g[0] / float(psi @ psi)
    resid = _reconstruction_residual(psi[:, None, None], np.array([[sigma]]),
                                     g[:, None, None])
    return MaRepresentation(psi=psi[:, None, None].copy(), sigma_z=np.array([[sigma]]),
                            residual=resid, iterations=0, converged=True)


# ---------------------------------------------------------------------------
# asymptotic representation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AsymptoticMa:
    """Small-step limit of the filtered process' moving-average form.

    The scalar MA polynomial is ``(1 - z)^u prod_j (1 - eta_j z)`` with
    ``u = p(d-1) + q`` unit roots and the eta_j inside the unit disc; the
    innovation covariance scales like ``delta^(2(p-q)-1)`` times a constant
    matrix.
    """

    unit_root_multiplicity: int
    eta_roots: np.ndarray          # (p - q - 1,), complex, possibly empty
    sigma_z_exponent: int          # 2 (p - q) - 1
    sigma_z_prefactor: np.ndarray  # (d, d)

    def sigma_z(self, delta: float) -> np.ndarray:
        """Innovation covariance of the limiting representation at step ``delta``."""
        return delta ** self.sigma_z_exponent * self.sigma_z_prefactor

    def ma_poly(self) -> np.ndarray:
        """Real ascending coefficients of the limiting scalar MA polynomial."""
        c = np.array([1.0 + 0j])
        for _ in range(self.unit_root_multiplicity):
            c = np.convolve(c, np.array([1.0, -1.0]))
        for e in self.eta_roots:
            c = np.convolve(c, np.array([1.0, -e]))
        if np.abs(c.imag).max() > 1e-10 * max(1.0, np.abs(c).max()):
            raise ArithmeticError("limiting MA polynomial has complex coefficients")
        return c.real

    def acov(self, delta: float, h: int) -> np.ndarray:
        """Autocovariance implied by the limiting representation."""
        c = self.ma_poly()
        h = abs(int(h))
        sig = self.sigma_z(delta)
        acc = np.zeros_like(sig)
        for j in range(0, len(c) - h):
            acc += c[j + h] * c[j] * sig
        return acc


def asymptotic_ma(model: McarmaModel) -> AsymptoticMa:
    """Limiting moving-average data of the filtered process as the step shrinks."""
    p, q, d = model.p, model.q, model.d
    unit = p * (d - 1) + q
    k = p - q
    if k >= 2:
        etas = eulerian.xi_roots(k, "odd").eta
    else:
        etas = np.zeros(0, dtype=complex)
    b0 = model.ma_coeffs[0]
    base = b0 @ model.sigma_l @ b0.T
    denom = math.factorial(2 * k - 1) * float(np.prod(np.abs(etas))) if len(etas) \
        else float(math.factorial(2 * k - 1))
    prefactor = base / denom
    prefactor.setflags(write=False)
    return AsymptoticMa(unit_root_multiplicity=unit, eta_roots=etas,
                        sigma_z_exponent=2 * k - 1, sigma_z_prefactor=prefactor)


# ---------------------------------------------------------------------------
# closed-form filtered spectrum for first-order bivariate models
# ---------------------------------------------------------------------------

def closed_form_filtered_spectrum(model: McarmaModel, delta: float, omega) -> np.ndarray:
    """Hand-expanded filtered spectrum for p=1, q=0, d=2 with distinct roots.

    This is an independent route kept for cross-checking the generic
    interpolation evaluator: everything is expressed directly in the two
    roots and the three product-polynomial coefficients, with no Fourier
    interpolation involved.
    """
    if (model.p, model.q, model.d) != (1, 0, 2):
        raise ValueError("closed form requires p=1, q=0, d=2")
    spec = RationalSpectrum.derive(model)
    roots = spec.roots
    if len(roots.roots) != 2:
        raise ValueError("closed form requires distinct characteristic roots")
    (l1, _), (l2, _) = roots.roots
    st0, st1, st2 = spec.s_tilde[0], spec.s_tilde[1], spec.s_tilde[2]
    omega = np.asarray(omega, dtype=float)
    sh1, sh2 = np.sinh(l1 * delta), np.sinh(l2 * delta)
    ch1, ch2 = np.cosh(l1 * delta), np.cosh(l2 * delta)
    pref = 2.0 * np.exp(delta * (l1 + l2)) / (TWO_PI * (l1 ** 2 - l2 ** 2))
    cos_part = (st0 * (sh1 / l1 - sh2 / l2) + st2 * (l1 * sh1 - l2 * sh2))
    sin_part = st1 * (ch1 - ch2)
    const = (st0 * (ch1 * sh2 / l2 - ch2 * sh1 / l1)
             + st2 * (l2 * ch1 * sh2 - l1 * ch2 * sh1))
    out = (np.multiply.outer(np.cos(omega), cos_part)
           + 1j * np.multiply.outer(np.sin(omega), sin_part)
           + np.multiply.outer(np.ones_like(omega), const))
    return pref * out
