"""Fundamental solutions of the logarithmic Laplacian by Helmholtz comparison.

The fundamental solution is assembled as

    E = Phi + E1_rem + E2_rem,      E2_rem = E2_log - E2_helm,

where Phi is the outgoing Helmholtz Green's function of -Lap - 1, E1_rem
is the inverse radial Fourier transform of the bounded symbol

    h(s) = 1/log(s^2) - 1/(s^2 - 1)    on 0 < s < 2,

and E2_log, E2_helm invert 1/(2 log s) and 1/(s^2 - 1) on s > 2.  The
outer transforms are not absolutely convergent.  They are evaluated by
integrating by parts against s^{nu+1} J_nu(s r) (nu = (d-2)/2) until the
remaining Bessel integral converges absolutely or is an alternating tail
handled by :func:`integrate_osc_bessel`; the oscillating boundary terms at
s = N -> infinity are dropped, which is the value of the limit in the sense
of tempered distributions.  Pointwise those terms do not decay, so values
here are the distributional limit, not a truncated integral.

Values for r < 2 in d = 1, 2 are exploratory: whether the d = 2 remainder
G2 is a regular distribution near the origin is not known.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Sequence

import numpy as np

from .quadrature import (
    DEFAULT_SPEC,
    DivergenceError,
    IntegralResult,
    QuadratureSpec,
    combine,
    geometric_points,
    integrate_adaptive,
    integrate_bessel_blocks,
    integrate_osc_bessel,
)
from .specfun import DomainError, SingularityError, _jv, hankel1, normalized_bessel, riesz_constant, sphere_area

LOG2 = math.log(2.0)


class InsufficientDataError(ValueError):
    """Too few table rows inside a fitting window."""


@dataclass(frozen=True)
class FundSolTable:
    d: int
    radii: np.ndarray
    phi: np.ndarray
    e1_rem: np.ndarray
    e2_rem: np.ndarray
    total: np.ndarray
    err_estimate: np.ndarray
    errors: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.radii.size and (np.any(self.radii <= 0) or np.any(np.diff(self.radii) <= 0)):
            raise ValueError("radii must be positive and strictly increasing")

    @classmethod
    def from_parts(cls, d, radii, phi, e1, e2, err=None, errors=()):
        radii = np.asarray(radii, dtype=float)
        phi = np.asarray(phi, dtype=complex)
        e1 = np.asarray(e1, dtype=float)
        e2 = np.asarray(e2, dtype=float)
        err = np.zeros_like(radii) if err is None else np.asarray(err, dtype=float)
        errors = tuple(errors) or ("",) * radii.size
        return cls(d, radii, phi, e1, e2, phi + e1 + e2, err, errors)


@dataclass(frozen=True)
class DecayFitReport:
    kappa: float
    log_weight: bool
    sup_scaled: float
    slope: float
    slope_residual: float
    range: tuple[float, float]
    n_points: int


# -- Helmholtz part ---------------------------------------------------------

def helmholtz_phi(d: int, r):
    """Outgoing solution of -Lap u - u = delta_0.

    d = 1: (i/2) e^{i r};  d >= 2: (i/4) (2 pi r)^{-(d-2)/2} H^(1)_{(d-2)/2}(r),
    which for d = 3 is e^{i r} / (4 pi r).
    """
    r = np.asarray(r, dtype=float)
    if d == 1:
        return 0.5j * np.exp(1j * r)
    if np.any(r <= 0):
        raise SingularityError("helmholtz_phi is singular at r = 0 for d >= 2")
    nu = (d - 2) / 2
    return 0.25j * (2 * math.pi * r) ** (-nu) * hankel1(nu, r)


def helmholtz_ode_residual(d: int, r: float, h: float = 1e-3) -> float:
    """|Phi'' + (d-1)/r Phi' + Phi| by central differences; O(h^2)."""
    if not r > 2 * h > 0:
        raise ValueError("need r > 2h > 0")
    p = helmholtz_phi(d, np.array([r - h, r, r + h]))
    d2 = (p[2] - 2 * p[1] + p[0]) / (h * h)
    d1 = (p[2] - p[0]) / (2 * h)
    return float(abs(d2 + (d - 1) / r * d1 + p[1]))


# -- symbols ----------------------------------------------------------------

# Gregory coefficients: 1/log(1+e) = 1/e + sum G_k e^k
_GREGORY = (1 / 2, -1 / 12, 1 / 24, -19 / 720, 3 / 160, -863 / 60480, 275 / 24192, -33953 / 3628800)


def remainder_symbol(s):
    """h(s) = 1/log(s^2) - 1/(s^2 - 1), continuously extended (h(0)=1, h(1)=1/2)."""
    s = np.asarray(s, dtype=float)
    eps = s * s - 1.0
    near = np.abs(eps) < 0.02
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = 1.0 / np.log(s * s) - 1.0 / eps
    series = np.zeros_like(eps)
    for c in reversed(_GREGORY):
        series = series * eps + c
    out = np.where(near, series, direct)
    out = np.where(s == 0.0, 1.0, out)
    return out if out.ndim else float(out)


# -- inverse transforms of the symbol pieces ------------------------------

def _check_radius(r: float) -> float:
    r = float(r)
    if not r > 0:
        raise DivergenceError("outer-region transforms diverge at r = 0")
    return r


def e1_rem(d: int, r: float, spec: QuadratureSpec = DEFAULT_SPEC) -> IntegralResult:
    """(2 pi)^{-d} omega_{d-1} int_0^2 h(s) c_d(s r) s^{d-1} ds."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    nu = (d - 2) / 2
    pts = [1.0] + geometric_points(1.0, 30)
    if r > 0:
        step = math.pi / r
        pts += list(np.arange(step, 2.0, step))
    res = integrate_adaptive(
        lambda s: remainder_symbol(s) * normalized_bessel(nu, s * r) * s ** (d - 1), 0.0, 2.0, spec, pts
    )
    return res.scaled(sphere_area(d) / (2 * math.pi) ** d)


def outer_transform(
    chain: Sequence[Callable],
    d: int,
    r: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> IntegralResult:
    """Inverse radial transform of a symbol m on s > 2, by integration by parts.

    ``chain`` = [m_0, ..., m_K] with m_0 = m and m_{k+1}(s) = m_k'(s) / s.
    With I_k = int_2^inf m_k(s) s^{nu+k+1} J_{nu+k}(s r) ds and
    d/ds [s^{mu} J_mu(s r)] = r s^{mu} J_{mu-1}(s r),

        I_k = -m_k(2) 2^{nu+k+1} J_{nu+k+1}(2 r) / r - I_{k+1} / r,

    so K integrations by parts leave I_K, evaluated as an oscillatory tail.
    The result is (2 pi)^{-d/2} r^{-nu} I_0.
    """
    r = _check_radius(r)
    nu = (d - 2) / 2
    K = len(chain) - 1
    mK = chain[K]
    tail = integrate_osc_bessel(lambda s: mK(s) * s ** (nu + K + 1), nu + K, r, 2.0, spec)
    value = tail.value
    for k in range(K - 1, -1, -1):
        boundary = -chain[k](2.0) * 2.0 ** (nu + k + 1) * _jv(nu + k + 1, 2.0 * r) / r
        value = boundary - value / r
    scale = (2 * math.pi) ** (-d / 2) * r ** (-nu) * r ** (-K)
    return IntegralResult(
        float((2 * math.pi) ** (-d / 2) * r ** (-nu) * value),
        tail.err_estimate * abs(scale),
        tail.converged,
    )


def _log_chain():
    """1/(2 log s) and its first two reduced derivatives m_{k+1} = m_k' / s."""
    return [
        lambda s: 0.5 / np.log(s),
        lambda s: -0.5 / (s**2 * np.log(s) ** 2),
        lambda s: (1.0 / np.log(s) ** 2 + 1.0 / np.log(s) ** 3) / s**4,
    ]


def _helm_chain():
    return [lambda s: 1.0 / (s * s - 1.0)]


def e2_helm(d: int, r: float, spec: QuadratureSpec = DEFAULT_SPEC) -> IntegralResult:
    """Inverse transform of 1/(s^2 - 1) on s > 2.

    d = 1: (1/pi) int_2^inf cos(s r) / (s^2 - 1) ds (absolutely convergent);
    d = 2: (2 pi)^{-1} int_2^inf s J_0(s r) / (s^2 - 1) ds;
    d = 3: (2 pi^2 r)^{-1} int_2^inf s sin(s r) / (s^2 - 1) ds (conditionally).
    """
    if d not in (1, 2, 3):
        raise ValueError("e2_helm implemented for d in (1, 2, 3)")
    return outer_transform(_helm_chain(), d, r, spec)


def g1(r: float) -> float:
    """Boundary term of the first integration by parts in d = 2: -(2/log 2) J_1(2r)/r."""
    r = _check_radius(r)
    return float(-2.0 / LOG2 * _jv(1.0, 2.0 * r) / r)


def g2_scaled(r: float, spec: QuadratureSpec = DEFAULT_SPEC) -> IntegralResult:
    """r^2 G2(r) = J_0(2r)/log^2 2 - 2 int_2^inf J_0(s r) / (s log^3 s) ds.

    The second integration by parts uses J_1(s r) = -(1/r) d/ds J_0(s r), so
    the remaining integrand carries J_0 and the factor 2 from
    d/ds log^{-2} s = -2 / (s log^3 s).  Bounded by 2 / log^2 2.
    """
    r = _check_radius(r)
    tail = integrate_osc_bessel(lambda s: 1.0 / (s * np.log(s) ** 3), 0.0, r, 2.0, spec)
    return IntegralResult(_jv(0.0, 2.0 * r) / LOG2**2 - 2.0 * tail.value, 2.0 * tail.err_estimate, tail.converged)


def e2_log(d: int, r: float, spec: QuadratureSpec = DEFAULT_SPEC) -> IntegralResult:
    """Inverse transform of 1/(2 log s) on s > 2.

    d = 1 uses one integration by parts:
        -sin(2r)/(2 pi r log 2) + (1/(2 pi r)) int_2^inf sin(s r)/(s log^2 s) ds.
    d = 2 uses two, in the G1 + G2 form:  (G1(r) + G2(r)) / (4 pi), where
    G1 + G2 stands for int_2^inf s J_0(s r) / log s ds.
    d = 3 uses two with the generic order-raising chain.
    """
    if d == 1:
        return outer_transform(_log_chain()[:2], 1, r, spec)
    if d == 2:
        r = _check_radius(r)
        g2 = g2_scaled(r, spec)
        value = float((g1(r) + g2.value / r**2) / (4 * math.pi))
        return IntegralResult(value, g2.err_estimate / (4 * math.pi * r**2), g2.converged)
    if d == 3:
        return outer_transform(_log_chain(), 3, r, spec)
    raise ValueError("e2_log implemented for d in (1, 2, 3)")


def e2_log_chain(d: int, r: float, spec: QuadratureSpec = DEFAULT_SPEC, ibp: int = 2) -> IntegralResult:
    """E2_log through the generic chain with ``ibp`` integrations by parts (cross-check)."""
    return outer_transform(_log_chain()[: ibp + 1], d, r, spec)


def finite_n_ibp_residual(r: float, N: float, spec: QuadratureSpec | None = None) -> dict:
    """Check the two-step integration by parts on the truncated range [2, N].

    Returns the direct value of int_2^N s J_0(r s) / log s ds, the
    decomposition G1_N + G2_N and the absolute residual.
    """
    spec = spec or QuadratureSpec(abs_tol=1e-12, rel_tol=1e-12)
    r = _check_radius(r)
    direct = integrate_bessel_blocks(lambda s: s / np.log(s), 0.0, r, 2.0, N, spec)
    inner = integrate_bessel_blocks(lambda s: 1.0 / (s * np.log(s) ** 3), 0.0, r, 2.0, N, spec)
    g1n = N * _jv(1.0, N * r) / (r * math.log(N)) - 2.0 * _jv(1.0, 2.0 * r) / (r * LOG2)
    g2n = (_jv(0.0, 2.0 * r) / (r * r * LOG2**2) - _jv(0.0, N * r) / (r * r * math.log(N) ** 2)
           - 2.0 * inner.value / r**2)
    return {
        "direct": direct.value,
        "g1": g1n,
        "g2": g2n,
        "residual": abs(direct.value - g1n - g2n),
        "err_estimate": direct.err_estimate + 2.0 * inner.err_estimate / r**2,
    }


# -- Riesz-potential (first) term for d >= 3 --------------------------------

def chen_veron_first_term(d: int, r: float, spec: QuadratureSpec = DEFAULT_SPEC) -> IntegralResult:
    """int_0^1 (I_{2t} delta_0)(r) dt = int_0^1 c(d, 2t) r^{2t-d} dt, d >= 3."""
    if d < 3:
        raise DomainError("the Riesz-potential term needs d >= 3")
    if not r > 0:
        raise ValueError("r must be positive")

    def term(t):
        return riesz_constant(d, 2 * t) * r ** (2 * t - d) if t > 0 else 0.0

    integrand = np.vectorize(term, otypes=[float])

    return integrate_adaptive(integrand, 0.0, 1.0, spec, points=[0.5])


# -- assembly ---------------------------------------------------------------

def _row(d: int, spec: QuadratureSpec, r: float):
    try:
        phi = complex(helmholtz_phi(d, r))
        a = e1_rem(d, r, spec)
        b = e2_log(d, r, spec)
        c = e2_helm(d, r, spec)
        rem2 = combine([b, c], [1.0, -1.0])
        flag = "" if (a.converged and rem2.converged) else "not converged"
        return phi, float(a.value), float(rem2.value), a.err_estimate + rem2.err_estimate, flag
    except (ValueError, ArithmeticError) as exc:
        return complex("nan"), math.nan, math.nan, math.nan, f"{type(exc).__name__}: {exc}"


def worker_count(workers: int | None = None) -> int:
    """Resolve a worker count; LOGLAP_THREADS caps it (0 or unset = automatic)."""
    env = int(os.environ.get("LOGLAP_THREADS", "0") or 0)
    auto = os.cpu_count() or 1
    n = workers if workers is not None else (env or auto)
    if env:
        n = min(n, env)
    return max(1, n)


def fundamental_solution(
    d: int,
    radii: Sequence[float],
    spec: QuadratureSpec = DEFAULT_SPEC,
    workers: int | None = 1,
) -> FundSolTable:
    """Tabulate E = Phi + E1_rem + (E2_log - E2_helm) on the given radii.

    Rows are independent; with ``workers`` > 1 they are computed in a process
    pool and reassembled in grid order.  Per-row failures are recorded in
    ``errors`` rather than raised.
    """
    if d not in (1, 2, 3):
        raise ValueError("fundamental_solution supports d in (1, 2, 3)")
    radii = np.asarray(radii, dtype=float)
    if np.any(radii <= 0):
        raise ValueError("radii must be positive")
    job = partial(_row, d, spec)
    n = worker_count(workers)
    if n > 1 and radii.size > 1:
        with ProcessPoolExecutor(max_workers=n) as pool:
            rows = list(pool.map(job, radii.tolist(), chunksize=max(1, radii.size // (4 * n))))
    else:
        rows = [job(r) for r in radii.tolist()]
    phi, e1, e2, err, flags = zip(*rows) if rows else ((), (), (), (), ())
    return FundSolTable.from_parts(d, radii, phi, e1, e2, err, flags)


def decay_fit(
    table: FundSolTable,
    kappa: float,
    log_weight: bool = False,
    r_lo: float | None = None,
    r_hi: float | None = None,
) -> DecayFitReport:
    """Scaled supremum and log-log slope of |total| over [r_lo, r_hi].

    sup_scaled = max |E(r)| r^kappa (times log r when ``log_weight``); the
    slope is the least-squares slope of log |E| against log r.
    """
    r = table.radii
    lo = r[0] if r_lo is None else r_lo
    hi = r[-1] if r_hi is None else r_hi
    sel = (r >= lo) & (r <= hi)
    if sel.sum() < 20:
        raise InsufficientDataError(f"need at least 20 rows in [{lo}, {hi}], found {int(sel.sum())}")
    rs = r[sel]
    mag = np.abs(table.total[sel])
    weight = rs**kappa * (np.log(rs) if log_weight else 1.0)
    sup = float(np.max(mag * weight))
    nz = mag > 0
    if nz.sum() >= 2:
        coef, res, *_ = np.polyfit(np.log(rs[nz]), np.log(mag[nz]), 1, full=True)
        slope = float(coef[0])
        resid = float(math.sqrt(res[0] / nz.sum())) if res.size else 0.0
    else:
        slope = resid = math.nan
    return DecayFitReport(kappa, log_weight, sup, slope, resid, (float(lo), float(hi)), int(sel.sum()))
