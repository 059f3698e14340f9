"""Exact combinatorial layer: Eulerian numbers, sampling-kernel series
coefficients, the integer polynomials packaging them, their roots, and the
unit-disc root map.

Everything in this module that can be integer arithmetic is integer
arithmetic (Python ints, arbitrary precision); floating point enters only
when polynomials are evaluated or their roots are located.
"""

from __future__ import annotations

import cmath
import math
import threading
from dataclasses import dataclass

import numpy as np

from .errors import OmegaZero, UnitModulusEta

N_MAX = 64          # Eulerian rows overflow nothing (arbitrary precision), but
                    # downstream float evaluation is only supported this far
K_MAX = 32          # largest packaged-polynomial index


@dataclass(frozen=True)
class EulerianTable:
    """Triangular array of Eulerian numbers plus the reduced even rows.

    ``rows[n-1]`` holds ``(A(n,0), ..., A(n,n-1))``, the ascending
    coefficients of the degree-(n-1) Eulerian polynomial.  ``reduced[k-1]``
    holds the ascending coefficients of the symmetric degree-(2k-2) factor
    left after dividing row ``2k`` by ``(1 + y)``; it exists for ``2k <=
    n_max``.
    """

    n_max: int
    rows: tuple[tuple[int, ...], ...]
    reduced: tuple[tuple[int, ...], ...]

    def row(self, n: int) -> tuple[int, ...]:
        return self.rows[n - 1]

    def a(self, n: int, k: int) -> int:
        return self.rows[n - 1][k]

    def reduced_row(self, k: int) -> tuple[int, ...]:
        return self.reduced[k - 1]

    def poly_value(self, n: int, y: complex) -> complex:
        """Evaluate the n-th Eulerian polynomial at ``y`` (Horner)."""
        acc = 0j
        for c in reversed(self.rows[n - 1]):
            acc = acc * y + c
        return acc


def eulerian_table(n_max: int) -> EulerianTable:
    """Build the Eulerian triangle up to row ``n_max``.

    Rows follow ``A(n+1,k) = (k+1) A(n,k) + (n+1-k) A(n,k-1)``.  Each even
    row ``2k`` is divisible by ``(1 + y)``; the quotient is stored as the
    reduced row ``k`` (exact synthetic division, zero remainder).
    """
    if not 1 <= n_max <= N_MAX:
        raise ValueError(f"n_max must be in [1, {N_MAX}], got {n_max}")
    rows = [(1,)]
    for n in range(1, n_max):
        prev = rows[-1]
        nxt = []
        for k in range(n + 1):
            t = (k + 1) * prev[k] if k < n else 0
            if 0 <= k - 1 < n:
                t += (n + 1 - k) * prev[k - 1]
            nxt.append(t)
        rows.append(tuple(nxt))
    reduced = []
    for k in range(1, n_max // 2 + 1):
        c = rows[2 * k - 1]                     # ascending coeffs of row 2k
        quot = [c[0]]
        for i in range(1, len(c) - 1):
            quot.append(c[i] - quot[-1])
        if c[-1] - quot[-1] != 0:
            raise ArithmeticError(f"row {2 * k} is not divisible by (1 + y)")
        reduced.append(tuple(quot))
    return EulerianTable(n_max=n_max, rows=tuple(rows), reduced=tuple(reduced))


_shared_lock = threading.Lock()
_shared_table: EulerianTable | None = None


def _shared(n: int) -> EulerianTable:
    """Process-wide table, grown on demand (immutable once built)."""
    global _shared_table
    if n > N_MAX:
        raise ValueError(f"Eulerian row {n} exceeds the supported maximum {N_MAX}")
    with _shared_lock:
        if _shared_table is None or _shared_table.n_max < n:
            _shared_table = eulerian_table(min(max(2 * n, 16), N_MAX))
        return _shared_table


def a_poly_value(n: int, y: complex) -> complex:
    """Value of the n-th Eulerian polynomial at ``y`` (shared table)."""
    return _shared(n).poly_value(n, y)


def c_tilde(k: int, omega: float) -> complex:
    """Taylor coefficient of order ``k`` of z -> 1/(1 - e^{z + i*omega}) at z = 0.

    Evaluated through the Eulerian closed form
    ``k! c_k = e^{i w} A_k(e^{i w}) / (1 - e^{i w})^{k+1}`` rather than a term
    recursion; this is stable for moderate ``omega`` but the magnitude (and
    the relative error) grows like ``|omega|^{-(k+1)}`` as ``omega -> 0``.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if omega == 0.0:
        raise OmegaZero("c_tilde is undefined at omega = 0 (pole of the kernel)")
    y = cmath.exp(1j * omega)
    if k == 0:
        return 1.0 / (1.0 - y)
    value = _shared(k).poly_value(k, y) / math.factorial(k)
    return y * value / (1.0 - y) ** (k + 1)


def d_tilde(k: int, omega: float) -> complex:
    """Companion coefficient of the reflected kernel: ``(-1)^(k+1) c_tilde(k)``."""
    return (-1) ** (k + 1) * c_tilde(k, omega)


@dataclass(frozen=True)
class IntPolynomial:
    """Dense integer polynomial, ascending coefficients, trailing zeros trimmed."""

    coeffs: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        acc = 0.0 if not isinstance(x, complex) else 0j
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def descending(self) -> tuple[int, ...]:
        return tuple(reversed(self.coeffs))


def _trimmed(coeffs) -> IntPolynomial:
    c = list(coeffs)
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return IntPolynomial(tuple(int(v) for v in c))


def _add_scaled(acc: list[int], poly: tuple[int, ...], scale: int) -> None:
    for i, c in enumerate(poly):
        acc[i] += scale * c


def chebyshev_t(n: int) -> IntPolynomial:
    """Chebyshev polynomial of the first kind, exact integer coefficients."""
    if n < 0:
        raise ValueError("n must be non-negative")
    prev, cur = [1], [0, 1]
    if n == 0:
        return IntPolynomial((1,))
    for _ in range(n - 1):
        nxt = [0] + [2 * c for c in cur]
        for i, c in enumerate(prev):
            nxt[i] -= c
        prev, cur = cur, nxt
    return _trimmed(cur)


def qr_polys(k: int) -> tuple[IntPolynomial, IntPolynomial]:
    """The degree-(k-1) integer polynomials packaging the series coefficients.

    The first packages the odd coefficient of order 2k-1, the second the even
    coefficient of order 2k; both are Chebyshev combinations of one Eulerian
    row (respectively its reduced form), with exact integer coefficients,
    leading coefficients 2^(k-1) and 2^k.
    """
    if not 1 <= k <= K_MAX:
        raise ValueError(f"k must be in [1, {K_MAX}], got {k}")
    tab = _shared(2 * k)
    row = tab.row(2 * k - 1)
    red = tab.reduced_row(k)
    qacc = [0] * k
    racc = [0] * k
    for j in range(k - 1):
        t = chebyshev_t(k - 1 - j).coeffs
        _add_scaled(qacc, t, 2 * row[j])
        _add_scaled(racc, t, 4 * red[j])
    qacc[0] += row[k - 1]
    racc[0] += 2 * red[k - 1]
    return _trimmed(qacc), _trimmed(racc)


@dataclass(frozen=True)
class XiEta:
    """Shifted roots of a packaged polynomial and their unit-disc images."""

    k: int
    parity: str                # "odd" or "even"
    xi: np.ndarray             # complex, sorted by (Re, Im)
    eta: np.ndarray            # matched values, each of modulus < 1


def eta(xi: complex) -> complex:
    """Root of ``e^2 - 2 (1 - xi) e + 1 = 0`` lying inside the unit disc.

    The two candidate roots multiply to 1, so exactly one lies inside unless
    both sit on the circle (possible only for real xi in (0, 2)).
    """
    xi = complex(xi)
    s = cmath.sqrt(xi * xi - 2.0 * xi)
    cand = (1.0 - xi + s, 1.0 - xi - s)
    mods = (abs(cand[0]), abs(cand[1]))
    if abs(mods[0] - 1.0) < 1e-12 and abs(mods[1] - 1.0) < 1e-12:
        raise UnitModulusEta(f"both candidate roots for xi={xi} have unit modulus")
    return cand[0] if mods[0] < mods[1] else cand[1]


def xi_roots(k: int, which: str) -> XiEta:
    """Roots of the packaged polynomial of index ``k``, shifted by ``x -> 1 - x``.

    ``which`` selects the odd- or even-order polynomial.  Roots are located as
    companion-matrix eigenvalues of the exact integer coefficients; the exact
    product of the shifted roots is used as a consistency check.
    """
    if which not in ("odd", "even"):
        raise ValueError("which must be 'odd' or 'even'")
    if not 2 <= k <= K_MAX:
        raise ValueError(f"k must be in [2, {K_MAX}], got {k}")
    qp, rp = qr_polys(k)
    poly = qp if which == "odd" else rp
    roots = np.roots([float(c) for c in poly.descending()])
    near_real = np.abs(roots.imag) <= 1e-9 * (1.0 + np.abs(roots))
    roots = np.where(near_real, roots.real + 0j, roots)
    order = np.lexsort((roots.imag, roots.real))
    roots = roots[order]
    xi = 1.0 - roots
    target = math.factorial(2 * k - 1) / 2 ** (k - 1) if which == "odd" \
        else math.factorial(2 * k) / 2 ** k
    prod = complex(np.prod(xi))
    if abs(prod - target) > 1e-9 * abs(target):
        raise ArithmeticError(
            f"product of shifted roots {prod} deviates from the exact value {target}")
    etas = np.array([eta(x) for x in xi], dtype=complex)
    return XiEta(k=k, parity=which, xi=xi, eta=etas)
