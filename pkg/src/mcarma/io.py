"""Plot-ready CSV and JSON emission with atomic writes.

All numbers are formatted with 17 significant digits in the C locale
(CSV) or shortest-roundtrip repr (JSON), so a given configuration always
produces byte-identical files.
"""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def atomic_write_text(path: str, text: str) -> None:
    """Write through a temporary file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def render_table(header: list[str], rows, fmt_kind: str = "csv") -> str:
    """Render a rectangular numeric table as CSV or as JSON records."""
    if fmt_kind == "json":
        return json_text([dict(zip(header, row)) for row in rows])
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def spectrum_table(omegas, values):
    """Spectrum table: omega, then re_ij, im_ij per component (1-based)."""
    values = np.asarray(values)
    d = values.shape[1]
    header = ["omega"]
    for i in range(d):
        for j in range(d):
            header += [f"re_{i + 1}{j + 1}", f"im_{i + 1}{j + 1}"]
    rows = []
    for w, v in zip(omegas, values):
        row = [float(w)]
        for i in range(d):
            for j in range(d):
                row += [float(np.real(v[i, j])), float(np.imag(v[i, j]))]
        rows.append(row)
    return header, rows


def acov_table(ts, gammas):
    """Autocovariance table: t, gamma_ij per component (1-based)."""
    gammas = np.asarray(gammas)
    d = gammas.shape[1]
    header = ["t"] + [f"gamma_{i + 1}{j + 1}" for i in range(d) for j in range(d)]
    rows = [[float(t)] + [float(g[i, j]) for i in range(d) for j in range(d)]
            for t, g in zip(ts, gammas)]
    return header, rows


def theta_table(start: int, coeffs):
    coeffs = np.asarray(coeffs)
    d = coeffs.shape[1]
    header = ["k"] + [f"theta_{i + 1}{j + 1}" for i in range(d) for j in range(d)]
    rows = [[start + idx] + [float(c[i, j]) for i in range(d) for j in range(d)]
            for idx, c in enumerate(coeffs)]
    return header, rows


def filter_table(coeffs):
    header = ["j", "phi_j"]
    rows = [[j, float(c)] for j, c in enumerate(coeffs)]
    return header, rows


def path_table(delta: float, obs):
    obs = np.asarray(obs)
    d, n = obs.shape
    header = ["t"] + [f"y_{i + 1}" for i in range(d)]
    rows = [[k * delta] + [float(obs[i, k]) for i in range(d)] for k in range(n)]
    return header, rows


def _fmt_root(z: complex) -> str:
    if z.imag == 0.0:
        return fmt(z.real)
    return f"{fmt(z.real)}{'+' if z.imag >= 0 else '-'}{fmt(abs(z.imag))}j"


def _poly_roots(poly) -> np.ndarray:
    roots = np.roots([float(c) for c in poly.descending()])
    near_real = np.abs(roots.imag) <= 1e-9 * (1.0 + np.abs(roots))
    roots = np.where(near_real, roots.real + 0j, roots)
    return roots[np.lexsort((roots.imag, roots.real))]


def polys_text(k_max: int, fmt_kind: str = "csv") -> str:
    """Integer-polynomial tables with roots, for indices 1..k_max.

    The CSV rows are ragged on purpose (one value column per coefficient or
    root); coefficients are printed exactly, descending, as integers.
    """
    from . import eulerian

    if fmt_kind == "json":
        doc = []
        for name, pick in (("q", 0), ("r", 1)):
            for k in range(1, k_max + 1):
                poly = eulerian.qr_polys(k)[pick]
                entry = {"name": name, "k": k,
                         "coefficients": list(poly.descending())}
                if k >= 2:
                    entry["roots"] = [{"re": z.real, "im": z.imag}
                                      for z in _poly_roots(poly)]
                doc.append(entry)
        return json_text(doc)
    lines = ["name,k,values"]
    for name, pick in (("q", 0), ("r", 1)):
        for k in range(1, k_max + 1):
            poly = eulerian.qr_polys(k)[pick]
            lines.append(",".join([name, str(k)] + [str(c) for c in poly.descending()]))
    for name, pick in (("q_roots", 0), ("r_roots", 1)):
        for k in range(2, k_max + 1):
            poly = eulerian.qr_polys(k)[pick]
            lines.append(",".join([name, str(k)] +
                                  [_fmt_root(z) for z in _poly_roots(poly)]))
    return "\n".join(lines) + "\n"


def _jsonify(obj):
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, np.ndarray):
        return _jsonify(obj.tolist())
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    return obj


def json_text(obj) -> str:
    return json.dumps(_jsonify(obj), indent=2, sort_keys=True) + "\n"
