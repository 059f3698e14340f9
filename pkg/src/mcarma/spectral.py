"""Spectral quantities of the continuous-time process and of its equidistant
samples: the rational spectrum, its power-series coefficients, its partial
fractions, the autocovariance, and three independent evaluators of the
sampled spectral density.

The three evaluators are deliberately redundant:

* ``f_sampled_taylor`` sums the power series in the step size (valid for
  small ``delta * |root|`` relative to ``|omega|``),
* ``f_sampled_exact`` sums closed-form pole contributions (valid for every
  ``omega``, any root multiplicities),
* ``f_sampled_reference`` folds the autocovariance directly (slow, tolerance
  driven) and serves as the independent oracle for the other two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import eulerian
from .errors import BudgetExceeded, OmegaZero, PoleEvaluation, SeriesDomain
from .model import (
    McarmaModel,
    MatrixPolynomial,
    RootSet,
    ScalarPolynomial,
    _matpoly_val,
    _p_ascending,
    _q_ascending,
    adjugate_q,
    char_roots,
    det_poly,
    s_tilde,
    scalar_polynomial,
    shift_poly,
)

TWO_PI = 2.0 * np.pi


# ---------------------------------------------------------------------------
# derived data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThetaSeries:
    """Power-series coefficient matrices of the reflected rational spectrum.

    Coefficients below ``start = 2 (p - q) - 1`` vanish identically and are
    not stored; ``coeffs[0]`` is the coefficient of index ``start``.
    """

    start: int
    coeffs: np.ndarray      # (K - start + 1, d, d), real

    def coeff(self, k: int) -> np.ndarray:
        if k < self.start:
            return np.zeros_like(self.coeffs[0])
        return self.coeffs[k - self.start]

    @property
    def last(self) -> int:
        return self.start + len(self.coeffs) - 1


@dataclass(frozen=True)
class PartialFractionTerm:
    lam: complex
    nu: int
    alphas: np.ndarray      # (nu, d, d) complex; alphas[j-1] goes with (z-lam)^-j


@dataclass(frozen=True)
class PartialFraction:
    """Pole data of the rational spectrum at the left-half-plane roots.

    The right-half-plane coefficients are not stored: the coefficient at
    ``-lam`` of order j equals the transpose of ``alphas[j-1]`` at ``lam``.
    Conjugate roots carry conjugate coefficient matrices.
    """

    terms: tuple[PartialFractionTerm, ...]


@dataclass(frozen=True)
class RationalSpectrum:
    """Everything derived once from a model that spectral evaluation needs.

    Immutable; derive once and share read-only across threads.
    """

    model: McarmaModel
    det_p: ScalarPolynomial
    s_poly: MatrixPolynomial       # adj P * Q
    s_tilde: np.ndarray            # (2L+1, d, d)
    denom: np.ndarray              # ascending coeffs of det P(z) det P(-z), even
    roots: RootSet
    pfrac: PartialFraction

    # -- construction -------------------------------------------------------

    @classmethod
    def derive(cls, model: McarmaModel) -> "RationalSpectrum":
        det_p = det_poly(model)
        s_poly = adjugate_q(model)
        st = s_tilde(model)
        dm = det_p.coeffs * (-1.0) ** np.arange(len(det_p.coeffs))
        denom = np.convolve(det_p.coeffs, dm)
        denom[1::2] = 0.0
        denom.setflags(write=False)
        roots = char_roots(model)
        pfrac = _partial_fractions(st, denom, roots)
        return cls(model=model, det_p=det_p, s_poly=s_poly, s_tilde=st,
                   denom=denom, roots=roots, pfrac=pfrac)

    # -- evaluators ----------------------------------------------------------

    def r_eval(self, z: complex) -> np.ndarray:
        """Rational spectrum S(z) / (det P(z) det P(-z)) away from the poles."""
        z = complex(z)
        lams = self.roots.expanded()
        dist = min(np.abs(z - lams).min(), np.abs(z + lams).min())
        if dist < 1e-8:
            raise PoleEvaluation(f"z={z} is within 1e-8 of a pole")
        num = _matpoly_val(self.s_tilde, z)
        den = complex(np.polynomial.polynomial.polyval(z, self.denom))
        scale = float(np.abs(self.denom).max()) * max(1.0, abs(z)) ** (len(self.denom) - 1)
        if abs(den) <= 1e-12 * scale:
            raise PoleEvaluation(f"denominator vanishes at z={z}")
        return num / den

    def f_y(self, lam: float) -> np.ndarray:
        """Spectral density of the continuous-time process at frequency ``lam``."""
        pc = _p_ascending(self.model.p, self.model.d, self.model.ar_coeffs)
        qc = _q_ascending(self.model.q, self.model.d, self.model.ma_coeffs)
        z = 1j * float(lam)
        m = np.linalg.solve(_matpoly_val(pc, z), _matpoly_val(qc, z))
        out = m @ self.model.sigma_l @ m.conj().T / TWO_PI
        return (out + out.conj().T) / 2.0

    def theta_raw(self, upto: int) -> np.ndarray:
        """Coefficients of index 0..upto from the linear recursion.

        With D(z) = det P(z) det P(-z) = sum_m d_{2m} z^{2m} the coefficients
        solve  sum_{m=0..pd} d_{2(pd-m)} Theta_{k-2m} = N_k  with
        N_k = s_tilde[2 pd - 1 - k] (zero outside range).  Only coefficient
        arrays enter -- no root locations -- so root-finding error cannot
        leak in.
        """
        d = self.model.d
        n = self.model.p * d
        dd = self.denom[::2]                      # d_0, d_2, ..., d_{2 pd}
        st = self.s_tilde
        out = np.zeros((upto + 1, d, d))
        for k in range(upto + 1):
            idx = 2 * n - 1 - k
            acc = st[idx].copy() if 0 <= idx < len(st) else np.zeros((d, d))
            for m in range(1, n + 1):
                if k - 2 * m >= 0:
                    acc -= dd[n - m] * out[k - 2 * m]
            out[k] = acc / dd[n]
        return out

    def theta_series(self, upto: int) -> ThetaSeries:
        start = 2 * (self.model.p - self.model.q) - 1
        if upto < start:
            raise ValueError(f"series order {upto} is below the first index {start}")
        raw = self.theta_raw(upto)
        coeffs = raw[start:].copy()
        coeffs.setflags(write=False)
        return ThetaSeries(start=start, coeffs=coeffs)

    def autocov(self, ts) -> np.ndarray:
        """Autocovariance on a grid of non-negative lags (vectorized)."""
        return _gamma_grid(self.pfrac, np.asarray(ts, dtype=float), self.model.d)

    def autocovariance(self, t: float) -> np.ndarray:
        t = float(t)
        g = self.autocov([abs(t)])[0]
        return g.T if t < 0 else g

    def f_sampled_taylor(self, delta: float, omega: float, order: int) -> np.ndarray:
        if omega == 0.0:
            raise OmegaZero("the series evaluator excludes omega = 0")
        start = 2 * (self.model.p - self.model.q) - 1
        if order < start:
            raise ValueError(f"order {order} is below the first series index {start}")
        if delta * self.roots.max_abs >= abs(omega):
            raise SeriesDomain(
                f"delta * max|root| = {delta * self.roots.max_abs:.3g} must be "
                f"< |omega| = {abs(omega):.3g} for controlled convergence")
        theta = self.theta_raw(order)
        d = self.model.d
        acc = np.zeros((d, d), dtype=complex)
        for k in range(start, order + 1):
            acc += (-delta) ** k * eulerian.c_tilde(k, omega) * theta[k]
        return -acc / TWO_PI

    def f_sampled_exact(self, delta: float, omega: float) -> np.ndarray:
        """Sampled spectral density from closed-form pole contributions.

        Simple poles contribute rational functions of ``exp(delta*lam -+ i
        omega)``; a pole of multiplicity nu additionally needs derivatives of
        the sampling kernel up to order nu - 1, which have the closed form
        ``delta^n y A_n(y) / (1 - y)^(n+1)`` with the n-th Eulerian
        polynomial A_n.  Valid for every omega in (-pi, pi] including 0.
        """
        d = self.model.d
        acc = np.zeros((d, d), dtype=complex)
        for term in self.pfrac.terms:
            y1 = np.exp(delta * term.lam - 1j * omega)    # e^{delta z - i w} branch
            y2 = np.exp(delta * term.lam + 1j * omega)    # e^{delta z + i w} branch
            for j in range(1, term.nu + 1):
                n = j - 1
                if n == 0:
                    g1 = y1 / (1.0 - y1)
                    g2 = 1.0 / (1.0 - y2)
                else:
                    g1 = delta ** n * y1 * eulerian.a_poly_value(n, y1) / (1.0 - y1) ** (n + 1)
                    g2 = delta ** n * y2 * eulerian.a_poly_value(n, y2) / (1.0 - y2) ** (n + 1)
                a = term.alphas[n]
                acc += (g1 * a + g2 * a.T) / math.factorial(n)
        acc /= TWO_PI
        return (acc + acc.conj().T) / 2.0

    def f_sampled_reference(self, delta: float, omega: float, tol: float) -> np.ndarray:
        """Oracle evaluator: direct folding of the autocovariance.

        Sums ``exp(-i k omega) Gamma(delta k)`` over ``|k| <= K`` with K
        chosen so the discarded tail is below ``tol``; declared accuracy is
        O(tol).  Raises ``BudgetExceeded`` when K would exceed 10^7.
        """
        if tol <= 0:
            raise ValueError("tol must be positive")
        rate = -self.roots.max_real
        k_max = int(np.ceil(np.log(1.0 / tol) / (delta * rate)))
        if k_max > 10 ** 7:
            raise BudgetExceeded(f"reference sum needs K={k_max} > 1e7 terms")
        acc = self.autocov([0.0])[0].astype(complex)
        chunk = 65536
        for lo in range(1, k_max + 1, chunk):
            ks = np.arange(lo, min(lo + chunk, k_max + 1))
            gs = self.autocov(delta * ks)
            phases = np.exp(-1j * ks * omega)
            part = np.tensordot(phases, gs, axes=1)
            acc += part + part.conj().T
        return acc / TWO_PI


# ---------------------------------------------------------------------------
# partial fractions and the autocovariance kernel
# ---------------------------------------------------------------------------

def _laurent_block(st: np.ndarray, denom: np.ndarray, lam: complex, nu: int) -> np.ndarray:
    """Principal-part coefficients of S/D at a root of D of multiplicity nu.

    The local expansion of ``(z - lam)^nu S(z)/D(z)`` is obtained by shifting
    both polynomials to w = z - lam and dividing the power series -- no
    numerical differentiation is involved.  Returns (nu, d, d); entry j-1 is
    the coefficient of ``(z - lam)^-j``.
    """
    d = st.shape[1]
    d_shift = shift_poly(denom, lam)
    e = d_shift[nu:]                 # the factor with e[0] = D^(nu)(lam)/nu! != 0
    einv = np.zeros(nu, dtype=complex)
    einv[0] = 1.0 / e[0]
    for n in range(1, nu):
        acc = 0j
        for i in range(1, min(n, len(e) - 1) + 1):
            acc += e[i] * einv[n - i]
        einv[n] = -acc / e[0]
    s_shift = np.zeros((nu, d, d), dtype=complex)
    for n in range(nu):
        for j in range(n, len(st)):
            s_shift[n] += st[j] * math.comb(j, n) * lam ** (j - n)
    ts = np.zeros((nu, d, d), dtype=complex)
    for n in range(nu):
        for i in range(n + 1):
            ts[n] += s_shift[i] * einv[n - i]
    out = np.empty((nu, d, d), dtype=complex)
    for j in range(1, nu + 1):
        out[j - 1] = ts[nu - j]
    return out


def _partial_fractions(st: np.ndarray, denom: np.ndarray, roots: RootSet) -> PartialFraction:
    by_key = {}
    terms = []
    for lam, nu in roots.roots:
        if lam.imag < 0.0 and lam.conjugate() in by_key:
            alphas = by_key[lam.conjugate()].conj()
        else:
            alphas = _laurent_block(st, denom, lam, nu)
            if lam.imag == 0.0:
                alphas = alphas.real.astype(complex)
        by_key[lam] = alphas
        terms.append(PartialFractionTerm(lam=lam, nu=nu, alphas=alphas))
    return PartialFraction(terms=tuple(terms))


def _gamma_grid(pfrac: PartialFraction, ts: np.ndarray, d: int) -> np.ndarray:
    """Autocovariance at non-negative lags: pole sums of t^{j-1} e^{lam t}/(j-1)!."""
    if np.any(ts < 0):
        raise ValueError("lags must be non-negative here")
    acc = np.zeros((len(ts), d, d), dtype=complex)
    for term in pfrac.terms:
        grow = np.exp(term.lam * ts)
        for j in range(1, term.nu + 1):
            weight = grow * ts ** (j - 1) / math.factorial(j - 1)
            acc += weight[:, None, None] * term.alphas[j - 1]
    scale = max(np.abs(acc.real).max(), 1e-300)
    if np.abs(acc.imag).max() > 1e-9 * scale:
        raise ArithmeticError(
            f"autocovariance has imaginary residue {np.abs(acc.imag).max():.3e} "
            f"above 1e-9 of scale {scale:.3e}")
    return acc.real


# ---------------------------------------------------------------------------
# module-level operations (thin wrappers deriving the spectrum per call)
# ---------------------------------------------------------------------------

def r_eval(model: McarmaModel, z: complex) -> np.ndarray:
    """Rational spectrum at ``z``; satisfies ``r_eval(-z).T == r_eval(z)``."""
    return RationalSpectrum.derive(model).r_eval(z)


def f_y(model: McarmaModel, lam: float) -> np.ndarray:
    """Spectral density of the continuous-time process (Hermitian PSD)."""
    return RationalSpectrum.derive(model).f_y(lam)


def theta_series(model: McarmaModel, order: int) -> ThetaSeries:
    """Series coefficients up to ``order`` from the linear recursion."""
    return RationalSpectrum.derive(model).theta_series(order)


def partial_fractions(model: McarmaModel) -> PartialFraction:
    """Principal parts of the rational spectrum at the stable roots."""
    return RationalSpectrum.derive(model).pfrac


def autocovariance(model: McarmaModel, t: float) -> np.ndarray:
    """Autocovariance of the continuous-time process; Gamma(-t) = Gamma(t)^T."""
    return RationalSpectrum.derive(model).autocovariance(t)


def f_sampled_taylor(model: McarmaModel, delta: float, omega: float, order: int) -> np.ndarray:
    """Sampled spectral density by series in the step size (omega != 0)."""
    return RationalSpectrum.derive(model).f_sampled_taylor(delta, omega, order)


def f_sampled_exact(model: McarmaModel, delta: float, omega: float) -> np.ndarray:
    """Sampled spectral density from closed-form pole contributions."""
    return RationalSpectrum.derive(model).f_sampled_exact(delta, omega)


def f_sampled_reference(model: McarmaModel, delta: float, omega: float, tol: float) -> np.ndarray:
    """Tolerance-driven autocovariance-folding oracle for the sampled density."""
    return RationalSpectrum.derive(model).f_sampled_reference(delta, omega, tol)
