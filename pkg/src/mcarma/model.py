"""Model definition and validation, the companion state space, and the
polynomial objects every other module consumes.

A model is the data (p, q, d, A_1..A_p, B_0..B_q, Sigma_L) of the matrix
polynomials

    P(z) = I z^p + A_1 z^(p-1) + ... + A_p        (autoregressive)
    Q(z) = B_0 z^q + B_1 z^(q-1) + ... + B_q      (moving average)

driven by noise with covariance Sigma_L.  Stationarity requires every zero
of det P to have negative real part; validation enforces that with a strict
margin so that the discretized dynamics stay inside the unit disc in double
precision.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import BadCovariance, BadOrders, RootClusterAmbiguous, Unstable

STABILITY_MARGIN = 1e-10   # max Re(root) must stay below -STABILITY_MARGIN
CLUSTER_TOL = 1e-7         # root clustering, scaled by max(1, |root|)


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class McarmaModel:
    """Validated model: orders, coefficient matrices, driving covariance.

    Arrays are read-only; every operation on a model is a pure function, so
    instances can be shared freely across threads.
    """

    p: int
    q: int
    d: int
    ar_coeffs: np.ndarray   # (p, d, d): A_1..A_p
    ma_coeffs: np.ndarray   # (q+1, d, d): B_0..B_q
    sigma_l: np.ndarray     # (d, d), symmetric PSD


@dataclass(frozen=True)
class StateSpace:
    """Companion-form realization (a_mat, b_mat, c_mat) of a model."""

    a_mat: np.ndarray       # (pd, pd)
    b_mat: np.ndarray       # (pd, d)
    c_mat: np.ndarray       # (d, pd)


@dataclass(frozen=True)
class ScalarPolynomial:
    """Dense real polynomial, ascending coefficients, trailing zeros trimmed."""

    coeffs: np.ndarray

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z):
        return npoly.polyval(z, self.coeffs)

    def derivative(self) -> "ScalarPolynomial":
        return ScalarPolynomial(npoly.polyder(self.coeffs))


def scalar_polynomial(coeffs) -> ScalarPolynomial:
    c = np.atleast_1d(np.asarray(coeffs, dtype=float))
    n = len(c)
    while n > 1 and c[n - 1] == 0.0:
        n -= 1
    out = c[:n].copy()
    out.setflags(write=False)
    return ScalarPolynomial(out)


@dataclass(frozen=True)
class MatrixPolynomial:
    """Matrix-valued polynomial; ``coeffs[j]`` multiplies ``z**j``."""

    coeffs: np.ndarray      # (n+1, d, d)

    @property
    def degree(self):
        for j in range(len(self.coeffs) - 1, -1, -1):
            if np.any(self.coeffs[j] != 0.0):
                return j
        return float("-inf")

    def __call__(self, z):
        acc = np.zeros_like(self.coeffs[0], dtype=np.result_type(self.coeffs.dtype, type(z)))
        for c in self.coeffs[::-1]:
            acc = acc * z + c
        return acc


@dataclass(frozen=True)
class RootSet:
    """Distinct characteristic roots with multiplicities (conjugate-symmetric)."""

    roots: tuple[tuple[complex, int], ...]

    @property
    def total(self) -> int:
        return sum(nu for _, nu in self.roots)

    def expanded(self) -> np.ndarray:
        """All roots repeated by multiplicity."""
        return np.concatenate([[lam] * nu for lam, nu in self.roots]).astype(complex)

    @property
    def max_abs(self) -> float:
        return max(abs(lam) for lam, _ in self.roots)

    @property
    def max_real(self) -> float:
        return max(lam.real for lam, _ in self.roots)


# ---------------------------------------------------------------------------
# raw-array helpers (usable before a model has been validated)
# ---------------------------------------------------------------------------

def _p_ascending(p: int, d: int, ar: np.ndarray) -> np.ndarray:
    """(p+1, d, d) ascending coefficients of P(z); leading block is I."""
    out = np.empty((p + 1, d, d))
    for j in range(p):
        out[j] = ar[p - 1 - j]
    out[p] = np.eye(d)
    return out


def _q_ascending(q: int, d: int, ma: np.ndarray) -> np.ndarray:
    """(q+1, d, d) ascending coefficients of Q(z)."""
    out = np.empty((q + 1, d, d))
    for j in range(q + 1):
        out[j] = ma[q - j]
    return out


def _matpoly_val(coeffs: np.ndarray, z) -> np.ndarray:
    acc = np.zeros(coeffs.shape[1:], dtype=np.result_type(coeffs.dtype, type(z)))
    for c in coeffs[::-1]:
        acc = acc * z + c
    return acc


def _int_nodes(count: int) -> list[int]:
    """``count`` integer interpolation nodes centered on 0."""
    half = count // 2
    return [x - half for x in range(count)]


def _fr_poly_at(coeffs_fr, x: int):
    """Matrix-polynomial value at an integer node, exact Fractions."""
    acc = None
    for c in reversed(coeffs_fr):
        if acc is None:
            acc = [row[:] for row in c]
        else:
            acc = [[acc[i][j] * x + c[i][j] for j in range(len(c))] for i in range(len(c))]
    return acc


def _fr_det(m) -> Fraction:
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    acc = Fraction(0)
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        acc += (-1) ** j * m[0][j] * _fr_det(minor)
    return acc


def _fr_adjugate(m):
    n = len(m)
    if n == 1:
        return [[Fraction(1)]]
    out = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(m) if k != i]
            out[j][i] = (-1) ** (i + j) * _fr_det(minor)
    return out


def _fr_matmul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    return [[sum(a[i][t] * b[t][j] for t in range(k)) for j in range(m)]
            for i in range(n)]


def _fr_coeffs(arr: np.ndarray):
    """(n, d, d) float array -> list of Fraction matrices (exact)."""
    return [[[Fraction(v) for v in row] for row in mat] for mat in arr]


def _interp_exact(nodes: list[int], values) -> list[Fraction]:
    """Exact Newton interpolation through integer nodes, monomial output."""
    n = len(nodes)
    table = list(values)
    newton = [table[0]]
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            table[i] = (table[i] - table[i - 1]) / (nodes[i] - nodes[i - j])
        newton.append(table[j])
    poly = [newton[-1]]
    for k in range(n - 2, -1, -1):
        nxt = [Fraction(0)] * (len(poly) + 1)
        for i, c in enumerate(poly):
            nxt[i + 1] += c
            nxt[i] -= c * nodes[k]
        nxt[0] += newton[k]
        poly = nxt
    return poly


def _detp_coeffs(p: int, d: int, ar: np.ndarray) -> np.ndarray:
    """Monic ascending coefficients of det P, degree exactly p*d.

    det P is evaluated at p*d + 1 integer points spread around the origin
    and interpolated -- in exact rational arithmetic, which the float inputs
    embed into losslessly.  This sidesteps both symbolic cofactor expansion
    and the Vandermonde conditioning that plain floating-point interpolation
    would suffer at degree ~10; each output coefficient is exact up to one
    final rounding.
    """
    n = p * d
    coeffs_fr = _fr_coeffs(_p_ascending(p, d, ar))
    nodes = _int_nodes(n + 1)
    vals = [_fr_det(_fr_poly_at(coeffs_fr, x)) for x in nodes]
    poly = _interp_exact(nodes, vals)
    assert poly[-1] == 1
    return np.array([float(c) for c in poly])


def _cluster_roots(raw: np.ndarray, tol_scale: float = CLUSTER_TOL):
    """Greedy union of roots within the absolute tolerance, mean representative."""
    order = np.lexsort((raw.imag, raw.real))
    clusters: list[list[complex]] = []
    for r in raw[order]:
        for c in clusters:
            rep = np.mean(c)
            if abs(r - rep) <= tol_scale * max(1.0, abs(rep)):
                c.append(r)
                break
        else:
            clusters.append([complex(r)])
    reps = [complex(np.mean(c)) for c in clusters]
    mults = [len(c) for c in clusters]
    for i in range(len(reps)):
        for j in range(i + 1, len(reps)):
            tol = tol_scale * max(1.0, abs(reps[i]), abs(reps[j]))
            if abs(reps[i] - reps[j]) < 10.0 * tol:
                raise RootClusterAmbiguous(
                    f"root clusters {reps[i]} and {reps[j]} are separated by less "
                    f"than 10x the clustering tolerance {tol:.1e}")
    return reps, mults


def _conjugate_symmetrize(reps, mults, tol_scale: float = CLUSTER_TOL):
    """Snap near-real roots to the axis and force exact conjugate pairs."""
    items = [[complex(r), m] for r, m in zip(reps, mults)]
    for it in items:
        if abs(it[0].imag) <= tol_scale * max(1.0, abs(it[0])):
            it[0] = complex(it[0].real, 0.0)
    done: list[tuple[complex, int]] = []
    pending = sorted((it for it in items), key=lambda it: (it[0].real, it[0].imag))
    used = [False] * len(pending)
    for i, (r, m) in enumerate(pending):
        if used[i]:
            continue
        used[i] = True
        if r.imag == 0.0:
            done.append((r, m))
            continue
        best, best_dist = None, np.inf
        for j in range(len(pending)):
            if used[j] or pending[j][0].imag * r.imag >= 0:
                continue
            dist = abs(pending[j][0] - r.conjugate())
            if dist < best_dist:
                best, best_dist = j, dist
        if best is None or pending[best][1] != m:
            raise RootClusterAmbiguous(
                f"complex root {r} has no conjugate partner of equal multiplicity")
        used[best] = True
        avg = (r + pending[best][0].conjugate()) / 2.0
        pair = (avg, avg.conjugate()) if avg.imag > 0 else (avg.conjugate(), avg)
        done.append((pair[0], m))
        done.append((pair[1], m))
    done.sort(key=lambda t: (t[0].real, t[0].imag))
    return done


def _roots_of(detp: np.ndarray, polish: bool = False) -> RootSet:
    raw = np.roots(detp[::-1])
    if polish:
        dp = npoly.polyder(detp)
        for _ in range(3):
            val = npoly.polyval(raw, detp)
            der = npoly.polyval(raw, dp)
            step = np.where(np.abs(der) > 0, val / np.where(der == 0, 1.0, der), 0.0)
            raw = raw - step
    reps, mults = _cluster_roots(raw)
    pairs = _conjugate_symmetrize(reps, mults)
    rs = RootSet(tuple(pairs))
    if rs.total != len(detp) - 1:
        raise RootClusterAmbiguous(
            f"multiplicities sum to {rs.total}, expected {len(detp) - 1}")
    return rs


def shift_poly(coeffs: np.ndarray, center: complex) -> np.ndarray:
    """Coefficients of p(center + w) in powers of w (exact binomial shift)."""
    n = len(coeffs)
    out = np.zeros(n, dtype=np.result_type(coeffs.dtype, type(center)))
    for j in range(n):
        cj = coeffs[j]
        if np.all(cj == 0):
            continue
        for k in range(j + 1):
            out[k] = out[k] + cj * comb(j, k) * center ** (j - k)
    return out


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def validate_model(raw) -> McarmaModel:
    """Check a raw model description and return an immutable validated model.

    ``raw`` is a mapping with keys ``p``, ``q``, ``d``, ``A`` (list of the p
    autoregressive matrices), ``B`` (list of the q+1 moving-average
    matrices) and ``SigmaL``, matrices row-major -- the same schema as the
    JSON model file.  Ragged arrays are rejected.

    Raises ``BadOrders`` when q >= p, ``BadCovariance`` when SigmaL is
    asymmetric beyond 1e-12 or indefinite, and ``Unstable`` when a zero of
    det P has real part >= -1e-10 (the offending root is reported).
    """
    try:
        p = int(raw["p"])
        q = int(raw["q"])
        d = int(raw["d"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"model description missing or malformed orders: {exc}") from exc
    if p < 1 or d < 1 or q < 0:
        raise ValueError(f"orders must satisfy p >= 1, d >= 1, q >= 0; got p={p}, q={q}, d={d}")
    if q >= p:
        raise BadOrders(f"moving-average order must satisfy q < p; got q={q}, p={p}")

    def _matrices(key, count):
        try:
            arr = np.asarray(raw[key], dtype=float)
        except (ValueError, TypeError) as exc:
            raise ValueError(f"'{key}' is ragged or non-numeric: {exc}") from exc
        if arr.shape != (count, d, d):
            raise ValueError(f"'{key}' must have shape {(count, d, d)}, got {arr.shape}")
        return arr

    ar = _matrices("A", p)
    ma = _matrices("B", q + 1)
    try:
        sig = np.asarray(raw["SigmaL"], dtype=float)
    except (ValueError, TypeError) as exc:
        raise ValueError(f"'SigmaL' is ragged or non-numeric: {exc}") from exc
    if sig.shape != (d, d):
        raise ValueError(f"'SigmaL' must have shape {(d, d)}, got {sig.shape}")

    scale = max(1.0, np.abs(sig).max())
    if np.abs(sig - sig.T).max() > 1e-12 * scale:
        raise BadCovariance("SigmaL is asymmetric beyond 1e-12")
    sym = (sig + sig.T) / 2.0
    w, v = np.linalg.eigh(sym)
    if w.min() < -1e-12 * max(1.0, np.abs(w).max()):
        raise BadCovariance(f"SigmaL is indefinite (eigenvalue {w.min():.3e})")
    sym = (v * np.clip(w, 0.0, None)) @ v.T
    sym = (sym + sym.T) / 2.0

    detp = _detp_coeffs(p, d, ar)
    roots = _roots_of(detp)
    if roots.max_real >= -STABILITY_MARGIN:
        worst = max((lam for lam, _ in roots.roots), key=lambda z: z.real)
        raise Unstable(worst)

    for arr in (ar, ma, sym):
        arr.setflags(write=False)
    return McarmaModel(p=p, q=q, d=d, ar_coeffs=ar, ma_coeffs=ma, sigma_l=sym)


def load_model(path) -> McarmaModel:
    """Read and validate a JSON model file."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    return validate_model(doc)


def model_to_dict(model: McarmaModel) -> dict:
    """Model-file representation of a validated model."""
    return {
        "p": model.p,
        "q": model.q,
        "d": model.d,
        "A": model.ar_coeffs.tolist(),
        "B": model.ma_coeffs.tolist(),
        "SigmaL": model.sigma_l.tolist(),
    }


def state_space(model: McarmaModel) -> StateSpace:
    """Companion realization; the noise-loading rows follow the recursion

        beta_{p-j} = -sum_{i=1..p-j-1} A_i beta_{p-j-i} - B_{q-j},  0 <= j <= q,

    with beta_{p-j} = 0 for j > q.  The overall sign of b_mat only flips the
    driving noise, so no second-order quantity depends on it.
    """
    p, q, d = model.p, model.q, model.d
    ar, ma = model.ar_coeffs, model.ma_coeffs
    n = p * d
    a = np.zeros((n, n))
    if p > 1:
        a[:d * (p - 1), d:] = np.eye(d * (p - 1))
    for i in range(p):
        a[d * (p - 1):, d * i:d * (i + 1)] = -ar[p - 1 - i]
    c = np.zeros((d, n))
    c[:, :d] = np.eye(d)
    beta = {i: np.zeros((d, d)) for i in range(1, p + 1)}
    for j in range(q, -1, -1):
        acc = np.zeros((d, d))
        for i in range(1, p - j):
            acc += ar[i - 1] @ beta[p - j - i]
        beta[p - j] = -acc - ma[q - j]
    b = np.vstack([beta[i] for i in range(1, p + 1)])
    for arr in (a, b, c):
        arr.setflags(write=False)
    return StateSpace(a_mat=a, b_mat=b, c_mat=c)


def det_poly(model: McarmaModel) -> ScalarPolynomial:
    """Monic determinant polynomial of P, degree exactly p*d.

    Computed by sampling det P at Chebyshev points on [-pd, pd] and
    interpolating (see ``_detp_coeffs`` for the conditioning argument); this
    avoids symbolic cofactor expansion entirely.
    """
    return scalar_polynomial(_detp_coeffs(model.p, model.d, model.ar_coeffs))


def char_roots(model: McarmaModel, polish: bool = False) -> RootSet:
    """Zeros of det P with multiplicities.

    Roots come from the balanced companion matrix of the determinant
    polynomial; ``polish=True`` adds three Newton corrections (useful for
    well-separated roots, counterproductive at high multiplicity).  Roots
    within ``1e-7 * max(1, |root|)`` of each other are merged into one
    cluster whose representative is the arithmetic mean; clusters closer
    than ten times that tolerance raise ``RootClusterAmbiguous``.
    """
    detp = _detp_coeffs(model.p, model.d, model.ar_coeffs)
    return _roots_of(detp, polish=polish)


def adjugate_q(model: McarmaModel) -> MatrixPolynomial:
    """Coefficients of adj P(z) * Q(z), degree (d-1) p + q.

    Computed by exact rational interpolation at integer nodes, entry by
    entry (see ``_detp_coeffs``).  The top coefficient equals B_0: the
    diagonal of adj P is monic of degree (d-1) p while every other entry has
    strictly lower degree.
    """
    p, q, d = model.p, model.q, model.d
    deg = (d - 1) * p + q
    pc = _fr_coeffs(_p_ascending(p, d, model.ar_coeffs))
    qc = _fr_coeffs(_q_ascending(q, d, model.ma_coeffs))
    nodes = _int_nodes(deg + 1)
    vals = [_fr_matmul(_fr_adjugate(_fr_poly_at(pc, x)), _fr_poly_at(qc, x))
            for x in nodes]
    coeffs = np.zeros((deg + 1, d, d))
    for i in range(d):
        for j in range(d):
            poly = _interp_exact(nodes, [v[i][j] for v in vals])
            coeffs[:, i, j] = [float(c) for c in poly]
    coeffs.setflags(write=False)
    return MatrixPolynomial(coeffs)


def s_tilde(model: McarmaModel) -> np.ndarray:
    """Coefficients of S(z) = (adj P Q)(z) SigmaL (adj P Q)(-z)^T.

    Returns the (2 [(d-1) p + q] + 1, d, d) ascending array.  Coefficients of
    even order are symmetric, of odd order antisymmetric (so they vanish for
    d = 1); both facts are enforced exactly by a final symmetrization.
    """
    s = adjugate_q(model).coeffs
    sig = model.sigma_l
    n = len(s)
    out = np.zeros((2 * n - 1, model.d, model.d))
    for a in range(n):
        lhs = s[a] @ sig
        for b in range(n):
            out[a + b] += (-1) ** b * (lhs @ s[b].T)
    for j in range(len(out)):
        out[j] = (out[j] + (-1) ** j * out[j].T) / 2.0
    out.setflags(write=False)
    return out
