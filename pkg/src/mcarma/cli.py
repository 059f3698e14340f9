"""Command-line entry point tying the analytic pipeline together.

Exit codes: 0 success, 2 validation error, 3 numerical failure,
4 verification failure.  Outputs are written atomically and are
byte-identical for identical configurations.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import filter_ma, io, simulate
from .errors import BadCovariance, BadOrders, McarmaError, Unstable
from .model import char_roots, load_model
from .spectral import RationalSpectrum

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_VERIFY_FAIL = 4

DEFAULT_GRID = (-3.0, 3.0, 101)


@dataclass(frozen=True)
class RunConfig:
    """One batch invocation: the command plus every knob it may consume."""

    command: str
    model_path: str | None = None
    kind: str | None = None
    delta: float = 0.1
    omega_grid: tuple[float, float, int] = DEFAULT_GRID
    order: int = 40
    n: int = 50
    seed: int = 1
    k: int = 6
    h: int | None = None
    tol: float = 1e-8
    output_path: str | None = None
    format: str = "csv"


def _emit(config: RunConfig, text: str) -> None:
    if config.output_path:
        io.atomic_write_text(config.output_path, text)
    else:
        sys.stdout.write(text)


def _require_model(config: RunConfig):
    if not config.model_path:
        raise ValueError("this command requires --model PATH")
    return load_model(config.model_path)


def _omegas(config: RunConfig, drop_zero: bool) -> np.ndarray:
    lo, hi, count = config.omega_grid
    if count < 2:
        raise ValueError("omega grid must have at least 2 points")
    if not (-math.pi < lo < math.pi and -math.pi < hi < math.pi):
        raise ValueError("omega grid must lie inside (-pi, pi)")
    grid = np.linspace(lo, hi, count)
    if drop_zero:
        grid = grid[grid != 0.0]
    return grid


def _cmd_model_validate(config: RunConfig) -> int:
    model = _require_model(config)
    roots = char_roots(model)
    doc = {
        "valid": True,
        "p": model.p, "q": model.q, "d": model.d,
        "roots": [{"re": lam.real, "im": lam.imag, "multiplicity": nu}
                  for lam, nu in roots.roots],
    }
    _emit(config, io.json_text(doc))
    return EXIT_OK


def _cmd_spectrum(config: RunConfig) -> int:
    model = _require_model(config)
    spec = RationalSpectrum.derive(model)
    kind = config.kind or "sampled-exact"
    if kind == "sampled":
        kind = "sampled-exact"
    omegas = _omegas(config, drop_zero=(kind == "sampled-taylor"))
    if kind == "exact":
        vals = np.array([spec.f_y(w) for w in omegas])
    elif kind == "sampled-exact":
        vals = np.array([spec.f_sampled_exact(config.delta, w) for w in omegas])
    elif kind == "sampled-taylor":
        vals = np.array([spec.f_sampled_taylor(config.delta, w, config.order)
                         for w in omegas])
    elif kind == "filtered":
        poly = filter_ma.filtered_spectrum(model, config.delta)
        vals = poly(omegas)
    else:
        raise ValueError(f"unknown spectrum kind '{kind}'")
    header, rows = io.spectrum_table(omegas, vals)
    _emit(config, io.render_table(header, rows, config.format))
    return EXIT_OK


def _cmd_theta(config: RunConfig) -> int:
    model = _require_model(config)
    series = RationalSpectrum.derive(model).theta_series(config.order)
    header, rows = io.theta_table(series.start, series.coeffs)
    _emit(config, io.render_table(header, rows, config.format))
    return EXIT_OK


def _cmd_pfrac(config: RunConfig) -> int:
    model = _require_model(config)
    pf = RationalSpectrum.derive(model).pfrac
    doc = {"terms": [{"lambda": {"re": t.lam.real, "im": t.lam.imag},
                      "nu": t.nu,
                      "alphas": t.alphas}
                     for t in pf.terms]}
    _emit(config, io.json_text(doc))
    return EXIT_OK


def _cmd_acov(config: RunConfig) -> int:
    model = _require_model(config)
    spec = RationalSpectrum.derive(model)
    ts = config.delta * np.arange(config.n)
    header, rows = io.acov_table(ts, spec.autocov(ts))
    _emit(config, io.render_table(header, rows, config.format))
    return EXIT_OK


def _cmd_polys(config: RunConfig) -> int:
    _emit(config, io.polys_text(config.k, config.format))
    return EXIT_OK


def _cmd_filter(config: RunConfig) -> int:
    model = _require_model(config)
    filt = filter_ma.sampling_filter(model, config.delta)
    header, rows = io.filter_table(filt.coeffs)
    _emit(config, io.render_table(header, rows, config.format))
    return EXIT_OK


def _cmd_ma(config: RunConfig) -> int:
    model = _require_model(config)
    m = model.p * model.d - 1
    acov = [filter_ma.filtered_acov(model, config.delta, h) for h in range(m + 1)]
    budget = min(int(math.ceil(200.0 / config.delta)), 100000)
    rep = filter_ma.innovations_factorization(acov, m=m, tol=config.tol,
                                              max_iters=budget)
    doc = {"delta": config.delta, "order": rep.order, "psi": rep.psi,
           "sigma_z": rep.sigma_z, "residual": rep.residual,
           "iterations": rep.iterations, "converged": rep.converged}
    _emit(config, io.json_text(doc))
    return EXIT_OK


def _cmd_asymptotic(config: RunConfig) -> int:
    model = _require_model(config)
    asym = filter_ma.asymptotic_ma(model)
    doc = {
        "unit_root_multiplicity": asym.unit_root_multiplicity,
        "eta": [{"re": e.real, "im": e.imag} for e in asym.eta_roots],
        "ma_poly": asym.ma_poly(),
        "sigma_z_exponent": asym.sigma_z_exponent,
        "sigma_z_prefactor": asym.sigma_z_prefactor,
    }
    _emit(config, io.json_text(doc))
    return EXIT_OK


def _cmd_simulate(config: RunConfig) -> int:
    model = _require_model(config)
    path = simulate.simulate_path(model, config.delta, config.n, config.seed)
    header, rows = io.path_table(config.delta, path.obs)
    _emit(config, io.render_table(header, rows, config.format))
    return EXIT_OK


def _cmd_verify(config: RunConfig) -> int:
    model = _require_model(config)
    report = simulate.verify_model(model, config.delta, config.n, config.seed,
                                   h_max=config.h if config.h is not None else 5)
    _emit(config, io.json_text(report.to_json_dict()))
    return EXIT_OK if report.passed else EXIT_VERIFY_FAIL


def _cmd_golden(config: RunConfig) -> int:
    """Cross-check the generic filtered spectrum against the closed form.

    Runs the first-order bivariate suite: a 101-point frequency grid at three
    step sizes, relative tolerance 1e-9.
    """
    model = _require_model(config)
    if (model.p, model.q, model.d) != (1, 0, 2):
        raise ValueError("the golden suite requires a model with p=1, q=0, d=2")
    omegas = np.linspace(-3.1, 3.1, 101)
    checks = []
    for delta in (0.05, 0.1, 0.5):
        poly = filter_ma.filtered_spectrum(model, delta)
        generic = poly(omegas)
        closed = filter_ma.closed_form_filtered_spectrum(model, delta, omegas)
        scale = np.abs(closed).max()
        err = float(np.abs(generic - closed).max() / scale)
        checks.append({"delta": delta, "max_rel_err": err, "pass": err <= 1e-9})
    doc = {"checks": checks, "pass": all(c["pass"] for c in checks)}
    _emit(config, io.json_text(doc))
    return EXIT_OK if doc["pass"] else EXIT_VERIFY_FAIL


_COMMANDS = {
    "model-validate": _cmd_model_validate,
    "spectrum": _cmd_spectrum,
    "theta": _cmd_theta,
    "pfrac": _cmd_pfrac,
    "acov": _cmd_acov,
    "polys": _cmd_polys,
    "filter": _cmd_filter,
    "ma": _cmd_ma,
    "asymptotic": _cmd_asymptotic,
    "simulate": _cmd_simulate,
    "verify": _cmd_verify,
    "golden": _cmd_golden,
}


def run(config: RunConfig) -> int:
    """Dispatch one configuration; map error classes onto exit codes."""
    try:
        return _COMMANDS[config.command](config)
    except (BadOrders, BadCovariance, Unstable, ValueError, OSError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except McarmaError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ArithmeticError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--model", dest="model_path", default=None,
                        help="path to a JSON model file")
    parser.add_argument("--delta", type=float, default=0.1, help="sampling step")
    parser.add_argument("--omega-min", type=float, default=DEFAULT_GRID[0])
    parser.add_argument("--omega-max", type=float, default=DEFAULT_GRID[1])
    parser.add_argument("--omega-count", type=int, default=DEFAULT_GRID[2])
    parser.add_argument("--order", type=int, default=40,
                        help="series truncation order")
    parser.add_argument("--n", type=int, default=50,
                        help="observation / grid count")
    parser.add_argument("--seed", type=int, default=1, help="64-bit RNG seed")
    parser.add_argument("--k", type=int, default=6,
                        help="largest packaged-polynomial index")
    parser.add_argument("--lag", dest="h", type=int, default=None)
    parser.add_argument("--tol", type=float, default=1e-8)
    parser.add_argument("--out", dest="output_path", default=None,
                        help="output file (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mcarma",
        description="Spectral analysis, filtering, MA factorization and exact "
                    "simulation of continuous-time vector ARMA models under "
                    "high-frequency sampling.")
    sub = parser.add_subparsers(dest="command", required=True)

    model_p = sub.add_parser("model", help="model-file operations")
    model_sub = model_p.add_subparsers(dest="model_command", required=True)
    validate_p = model_sub.add_parser("validate", help="validate a model file")
    _add_common(validate_p)

    for name, extra in (
        ("spectrum", "spectral density tables"),
        ("theta", "series coefficient table"),
        ("pfrac", "partial-fraction data"),
        ("acov", "autocovariance table on the step grid"),
        ("polys", "integer polynomial tables and roots"),
        ("filter", "sampling-filter coefficients"),
        ("ma", "moving-average factorization of the filtered process"),
        ("asymptotic", "small-step limiting MA representation"),
        ("simulate", "draw one path"),
        ("verify", "simulate and test against analytic autocovariances"),
        ("golden", "closed-form cross-check suite (p=1, q=0, d=2)"),
    ):
        p = sub.add_parser(name, help=extra)
        _add_common(p)
        if name == "spectrum":
            p.add_argument("--kind", default="sampled-exact",
                           choices=("exact", "sampled", "sampled-exact",
                                    "sampled-taylor", "filtered"))
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    command = args.command
    if command == "model":
        command = "model-validate"
    return RunConfig(
        command=command,
        model_path=args.model_path,
        kind=getattr(args, "kind", None),
        delta=args.delta,
        omega_grid=(args.omega_min, args.omega_max, args.omega_count),
        order=args.order,
        n=args.n,
        seed=args.seed,
        k=args.k,
        h=args.h,
        tol=args.tol,
        output_path=args.output_path,
        format=args.format,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return run(config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
