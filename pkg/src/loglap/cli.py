"""Command-line entry point: ``loglap apply|fundsol|verify|decay-fit``.

Exit codes: 0 success, 1 a residual exceeded its threshold, 2 usage or
configuration error, 3 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from . import distverify as dv
from . import fundsol as fs
from . import logop
from .quadrature import DivergenceError, QuadratureSpec, heat_time_integral, integrate_adaptive
from .specfun import EULER_GAMMA, log_constants

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NONCONVERGED = 0, 1, 2, 3

SUITES = ("division", "liouville", "classification", "constants", "schwinger")


class UsageError(Exception):
    pass


def fmt(x) -> str:
    return "" if x is None else format(float(x), ".17g")


# -- configuration ----------------------------------------------------------

_CONFIG_KEYS = {
    "dim": int, "rmin": float, "rmax": float, "points": int, "grid": str,
    "tol_abs": float, "tol_rel": float, "out": str, "workers": int,
}

_DEFAULTS = {
    "apply": dict(dim=1, rmin=0.0, rmax=2.0, points=5, grid="linear"),
    "fundsol": dict(dim=2, rmin=2.0, rmax=200.0, points=200, grid="log"),
    "verify": dict(dim=2),
    "decay-fit": dict(),
}


@dataclass(frozen=True)
class RunConfig:
    dim: int = 2
    r_min: float = 2.0
    r_max: float = 200.0
    points: int = 200
    grid: str = "log"
    tol_abs: float = 1e-10
    tol_rel: float = 1e-10
    output_path: str | None = None
    workers: int | None = None

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise UsageError(f"--dim must be 1, 2 or 3, got {self.dim}")
        if self.points < 2:
            raise UsageError("--points must be at least 2")
        if not self.r_min < self.r_max:
            raise UsageError("--rmin must be below --rmax")
        if self.r_min < 0:
            raise UsageError("--rmin must be nonnegative")
        if self.grid not in ("linear", "log"):
            raise UsageError("--grid must be linear or log")
        if self.grid == "log" and self.r_min <= 0:
            raise UsageError("a log grid needs --rmin > 0")
        if not (self.tol_abs > 0 and self.tol_rel > 0):
            raise UsageError("tolerances must be positive")

    @property
    def spec(self) -> QuadratureSpec:
        return QuadratureSpec(abs_tol=self.tol_abs, rel_tol=self.tol_rel)

    def radii(self) -> np.ndarray:
        if self.grid == "log":
            return np.geomspace(self.r_min, self.r_max, self.points)
        return np.linspace(self.r_min, self.r_max, self.points)


def read_config(path: str) -> dict:
    """Flat ``key = value`` file; '#' starts a comment."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in _CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: expected one of {sorted(_CONFIG_KEYS)} as 'key = value'")
        try:
            out[key] = _CONFIG_KEYS[key](value.strip())
        except ValueError as exc:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {value.strip()!r}") from exc
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    merged = {"tol_abs": 1e-10, "tol_rel": 1e-10, **_DEFAULTS[args.command]}
    if args.config:
        merged.update(read_config(args.config))
    for key in _CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    kwargs = dict(
        dim=merged.get("dim", 2), tol_abs=merged["tol_abs"], tol_rel=merged["tol_rel"],
        output_path=merged.get("out"), workers=merged.get("workers"),
    )
    for src, dst in (("rmin", "r_min"), ("rmax", "r_max"), ("points", "points"), ("grid", "grid")):
        if src in merged:
            kwargs[dst] = merged[src]
    return RunConfig(**kwargs)


def write_csv(path: str | None, header: Iterable[str], rows: Iterable[Iterable[str]]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    if path is None or path == "-":
        sys.stdout.write(buf.getvalue())
    else:
        Path(path).write_text(buf.getvalue())


# -- commands ---------------------------------------------------------------

def cmd_apply(cfg: RunConfig, profile: str, method: str, diff_tol: float) -> int:
    d = cfg.dim
    if profile == "gaussian":
        f, fhat = logop.gaussian_profile(), logop.gaussian_fourier_profile(d)
    elif profile == "eigenfunction":
        if method != "integral":
            raise UsageError("the eigenfunction profile has no decaying Fourier profile; use --method integral")
        f, fhat = logop.eigenfunction_profile(d), None
    else:
        raise UsageError(f"unknown profile {profile!r}")
    rows, ok, converged = [], True, True
    for r in cfg.radii():
        vi = vs = diff = None
        if method in ("integral", "both"):
            res = logop.apply_integral_form(f, float(r), d, spec=cfg.spec)
            vi, converged = res.value, converged and res.converged
        if method in ("spectral", "both"):
            res = logop.apply_spectral_radial(fhat, float(r), d, cfg.spec)
            vs, converged = float(res.value), converged and res.converged
        if method == "both":
            diff = abs(vi - vs)
            ok = ok and diff <= diff_tol
        rows.append([fmt(r), fmt(vi), fmt(vs), fmt(diff)])
    write_csv(cfg.output_path, ["r", "value_integral", "value_spectral", "abs_diff"], rows)
    if not converged:
        return EXIT_NONCONVERGED
    return EXIT_OK if ok else EXIT_FAIL


def cmd_fundsol(cfg: RunConfig) -> int:
    if cfg.r_min <= 0:
        raise UsageError("fundsol needs --rmin > 0")
    table = fs.fundamental_solution(cfg.dim, cfg.radii(), cfg.spec, workers=cfg.workers)
    rows = [
        [fmt(r), fmt(p.real), fmt(p.imag), fmt(a), fmt(b), fmt(t.real), fmt(t.imag), fmt(e)]
        for r, p, a, b, t, e in zip(table.radii, table.phi, table.e1_rem, table.e2_rem, table.total, table.err_estimate)
    ]
    write_csv(cfg.output_path,
              ["r", "phi_re", "phi_im", "e1_rem", "e2_rem", "total_re", "total_im", "err_estimate"], rows)
    bad = [f"r={r:g}: {msg}" for r, msg in zip(table.radii, table.errors) if msg]
    for line in bad:
        print(line, file=sys.stderr)
    return EXIT_NONCONVERGED if bad else EXIT_OK


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    threshold: float

    @property
    def passed(self) -> bool:
        return math.isfinite(self.value) and self.value <= self.threshold


def _collapse_residual() -> float:
    """max over samples of |int_0^1 s^{-2t} dt * s^2/(s^2-1) - 1/(2 log s)|."""
    worst = 0.0
    for s in (0.5, 0.9, 1.1, 2.0, 5.0):
        t_integral = integrate_adaptive(lambda t: s ** (-2.0 * t), 0.0, 1.0, QuadratureSpec(1e-14, 1e-14)).value
        worst = max(worst, abs(t_integral * s * s / (s * s - 1.0) - 0.5 / math.log(s)))
    return worst


def suite_constants(d: int, spec: QuadratureSpec) -> list[Check]:
    closed = {1: -2 * EULER_GAMMA, 2: 2 * math.log(2) - 2 * EULER_GAMMA, 3: 2 - 2 * EULER_GAMMA}[d]
    c = log_constants(d)
    return [
        Check(f"rho_{d}_closed_form", abs(c.rho_d - closed), 1e-10),
        Check(f"gamma_{d}_times_omega_minus_2", abs(c.gamma_d * c.omega - 2.0), 1e-12),
        Check("fourier_collapse", _collapse_residual(), 1e-10),
    ]


def suite_schwinger(d: int, spec: QuadratureSpec) -> list[Check]:
    return [
        Check(f"heat_time_integral_3_r{r:g}_rel", abs(heat_time_integral(3, r) * 4 * math.pi * r - 1.0), 1e-10)
        for r in (0.5, 1.0, 2.0)
    ]


def suite_division(d: int, spec: QuadratureSpec) -> list[Check]:
    return [Check(f"division_{w.name}_d{d}", dv.division_residual(w, d, spec), 1e-5) for w in dv.builtin_witnesses()]


def suite_liouville(d: int, spec: QuadratureSpec) -> list[Check]:
    out = [Check(f"eigenfunction_identity_d{d}", logop.eigenfunction_identity_residual(d, spec), 1e-6)]
    eig = logop.eigenfunction_profile(d)
    for r in (0.0, 2.0):
        out.append(Check(f"eigenfunction_physical_d{d}_r{r:g}",
                         abs(logop.apply_integral_form(eig, r, d, spec=spec).value), 1e-5))
    uniform = dv.SingleLayerSpec("uniform_measure")
    for w in dv.builtin_witnesses():
        out.append(Check(f"annihilation_{w.name}", abs(dv.liouville_annihilation(uniform, w, d)), 0.0))
        out.append(Check(f"counterexample_{w.name}",
                         abs(dv.liouville_counterexample(w, d) - dv.counterexample_certificate(w, d)), 1e-8))
    return out


def suite_classification(d: int, spec: QuadratureSpec) -> list[Check]:
    return [Check(f"classification_{w.name}_d{d}", dv.classification_crosscheck(w, d, spec), 1e-6)
            for w in dv.builtin_witnesses()]


_SUITE_FUNCS: dict[str, Callable[[int, QuadratureSpec], list[Check]]] = {
    "constants": suite_constants,
    "schwinger": suite_schwinger,
    "division": suite_division,
    "liouville": suite_liouville,
    "classification": suite_classification,
}


def cmd_verify(cfg: RunConfig, suite: str) -> int:
    names = SUITES if suite == "all" else (suite,)
    if any(n not in _SUITE_FUNCS for n in names):
        raise UsageError(f"unknown suite {suite!r}")
    checks = [c for n in names for c in _SUITE_FUNCS[n](cfg.dim, cfg.spec)]
    write_csv(cfg.output_path, ["name", "value", "threshold", "pass"],
              [[c.name, fmt(c.value), fmt(c.threshold), str(c.passed).lower()] for c in checks])
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.value:.3e} (threshold {c.threshold:.1e})", file=sys.stderr)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAIL


def read_table(path: str) -> fs.FundSolTable:
    """Parse a ``fundsol`` CSV; errors name the offending line."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if not header:
        raise UsageError(f"{path}:1: empty file, expected a fundsol header")
    need = ("r", "phi_re", "phi_im", "e1_rem", "e2_rem", "total_re", "total_im")
    missing = [k for k in need if k not in header]
    if missing:
        raise UsageError(f"{path}:1: header lacks columns {missing}")
    idx = {k: header.index(k) for k in need}
    cols: dict[str, list[float]] = {k: [] for k in need}
    for lineno, row in enumerate(reader, 2):
        if not row:
            continue
        try:
            for k in need:
                cols[k].append(float(row[idx[k]]))
        except (IndexError, ValueError) as exc:
            raise UsageError(f"{path}:{lineno}: malformed row ({exc})") from exc
    if not cols["r"]:
        raise UsageError(f"{path}:2: no data rows")
    try:
        return fs.FundSolTable.from_parts(
            0, cols["r"], np.array(cols["phi_re"]) + 1j * np.array(cols["phi_im"]),
            cols["e1_rem"], cols["e2_rem"],
        )
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def cmd_decay_fit(path: str, kappa: float, log_weight: bool, window, slope_max: float | None,
                  out: str | None) -> int:
    table = read_table(path)
    lo, hi = window if window else (None, None)
    try:
        rep = fs.decay_fit(table, kappa, log_weight, lo, hi)
    except fs.InsufficientDataError as exc:
        raise UsageError(str(exc)) from exc
    slope_max = -kappa + 0.05 if slope_max is None else slope_max
    checks = [Check("sup_scaled", rep.sup_scaled, math.inf), Check("slope", rep.slope, slope_max)]
    info = [("kappa", rep.kappa), ("log_weight", float(rep.log_weight)), ("r_lo", rep.range[0]),
            ("r_hi", rep.range[1]), ("n_points", rep.n_points), ("slope_residual", rep.slope_residual)]
    rows = [[c.name, fmt(c.value), fmt(c.threshold), str(c.passed).lower()] for c in checks]
    rows += [[name, fmt(v), "", ""] for name, v in info]
    write_csv(out, ["name", "value", "threshold", "pass"], rows)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAIL


# -- argument parsing -------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dim", type=int)
    common.add_argument("--rmin", type=float)
    common.add_argument("--rmax", type=float)
    common.add_argument("--points", type=int)
    common.add_argument("--grid", choices=("linear", "log"))
    common.add_argument("--tol-abs", dest="tol_abs", type=float)
    common.add_argument("--tol-rel", dest="tol_rel", type=float)
    common.add_argument("--config")
    common.add_argument("--out")

    parser = argparse.ArgumentParser(prog="loglap", description="Logarithmic Laplacian numerics.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("apply", parents=[common], help="evaluate log(-Lap) on a radial profile")
    p.add_argument("--profile", default="gaussian")
    p.add_argument("--method", choices=("integral", "spectral", "both"), default="both")
    p.add_argument("--diff-tol", dest="diff_tol", type=float, default=1e-6)

    p = sub.add_parser("fundsol", parents=[common], help="tabulate the fundamental solution")
    p.add_argument("--workers", type=int)

    p = sub.add_parser("verify", parents=[common], help="run residual suites")
    p.add_argument("suite", nargs="?", default="all")

    p = sub.add_parser("decay-fit", parents=[common], help="fit decay of a fundsol table")
    p.add_argument("input")
    p.add_argument("--kappa", type=float, default=0.5)
    p.add_argument("--log-weight", dest="log_weight", action="store_true")
    p.add_argument("--window", nargs=2, type=float, metavar=("RLO", "RHI"))
    p.add_argument("--slope-max", dest="slope_max", type=float)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "decay-fit":
            out = args.out
            if args.config:
                out = out or read_config(args.config).get("out")
            return cmd_decay_fit(args.input, args.kappa, args.log_weight, args.window, args.slope_max, out)
        cfg = build_config(args)
        if args.command == "apply":
            return cmd_apply(cfg, args.profile, args.method, args.diff_tol)
        if args.command == "fundsol":
            return cmd_fundsol(cfg)
        return cmd_verify(cfg, args.suite)
    except UsageError as exc:
        print(f"loglap: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DivergenceError as exc:
        print(f"loglap: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED


if __name__ == "__main__":
    sys.exit(main())
