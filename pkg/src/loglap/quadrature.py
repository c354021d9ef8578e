"""One-dimensional integration strategies.

Everything in this package reduces to radial integrals, so four routines
cover it:

* :func:`integrate_adaptive` -- globally adaptive Gauss-Kronrod (7/15).
* :func:`integrate_sphere_subtracted` -- the renormalised pairing integral
  with a removable singularity at s = 1.
* :func:`integrate_osc_bessel` -- conditionally convergent tails
  int g(r) J_nu(r x) dr, summed between Bessel zeros and accelerated.
* :func:`heat_time_integral` -- the heat-kernel time integral of the
  Coulomb kernel.

Integrands are called with numpy arrays and must return arrays of the same
shape (scalar-only callables are accepted but evaluated point by point).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from .specfun import _jv, sphere_area

# Gauss-Kronrod 7/15 nodes and weights (QUADPACK qk15)
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS = np.zeros(15)
_GAUSS[[1, 3, 5, 9, 11, 13]] = np.concatenate([_WG[:3], _WG[:3][::-1]])
_GAUSS[7] = _WG[3]

_BLOCK_HI = np.polynomial.legendre.leggauss(20)
_BLOCK_LO = np.polynomial.legendre.leggauss(10)

_MAX_INTERVALS = 20000
_MAX_OSC_BLOCKS = 1 << 17
_EULER_WINDOW = 512


class DivergenceError(ValueError):
    """Integral does not exist in the requested sense."""


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and strategy knobs shared by every integral."""

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_depth: int = 40
    osc_blocks: int = 40
    accel: bool = True

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("abs_tol and rel_tol must be positive")
        if not 0 <= self.max_depth <= 60:
            raise ValueError("max_depth must lie in [0, 60]")
        if self.osc_blocks < 4:
            raise ValueError("osc_blocks must be at least 4")

    def tolerance(self, value) -> float:
        return max(self.abs_tol, self.rel_tol * abs(value))

    def refined(self, factor: float = 0.5) -> "QuadratureSpec":
        """Same strategy with both tolerances scaled by ``factor``."""
        return replace(self, abs_tol=self.abs_tol * factor, rel_tol=self.rel_tol * factor)


DEFAULT_SPEC = QuadratureSpec()


@dataclass(frozen=True)
class IntegralResult:
    value: float | complex
    err_estimate: float
    converged: bool

    def __float__(self) -> float:
        return float(np.real(self.value))

    def scaled(self, factor) -> "IntegralResult":
        return IntegralResult(self.value * factor, self.err_estimate * abs(factor), self.converged)


def combine(parts: Iterable[IntegralResult], weights: Sequence | None = None) -> IntegralResult:
    """Weighted sum of partial results; errors add, convergence is the conjunction."""
    parts = list(parts)
    if weights is None:
        weights = [1.0] * len(parts)
    value = sum(w * p.value for w, p in zip(weights, parts))
    err = sum(abs(w) * p.err_estimate for w, p in zip(weights, parts))
    return IntegralResult(value, float(err), all(p.converged for p in parts))


def _evaluate(f: Callable, x: np.ndarray) -> np.ndarray:
    y = np.asarray(f(x))
    if y.shape != x.shape:
        y = np.array([f(xi) for xi in x.ravel()]).reshape(x.shape)
    if not np.all(np.isfinite(y)):
        raise ValueError("integrand returned a non-finite value")
    return y


def _gk15(f: Callable, lo: np.ndarray, hi: np.ndarray):
    centre = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = centre[:, None] + half[:, None] * _NODES[None, :]
    y = _evaluate(f, x)
    k = half * (y @ _KRONROD)
    g = half * (y @ _GAUSS)
    return k, np.abs(k - g)


def integrate_adaptive(
    f: Callable,
    a: float,
    b: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
    points: Iterable[float] = (),
) -> IntegralResult:
    """Integrate ``f`` over [a, b] by globally adaptive Gauss-Kronrod.

    ``points`` are extra breakpoints (kinks, singular points, oscillation
    zeros) that become initial interval boundaries.  Each interval carries
    the Kronrod value and |K15 - G7| as its error; the intervals holding the
    larger half of the total error are bisected until the total error meets
    the tolerance.  Exhausting ``spec.max_depth`` (or the interval budget)
    returns the best estimate with ``converged=False``.
    """
    if not a < b:
        raise ValueError(f"integrate_adaptive requires a < b, got [{a}, {b}]")
    edges = np.unique(np.array([a, b] + [p for p in points if a < p < b], dtype=float))
    lo, hi = edges[:-1], edges[1:]
    depth = np.zeros(lo.size, dtype=int)
    val, err = _gk15(f, lo, hi)
    while True:
        total = val.sum()
        total_err = float(err.sum())
        if total_err <= spec.tolerance(total):
            return IntegralResult(total.item(), total_err, True)
        splittable = depth < spec.max_depth
        if not splittable.any() or lo.size >= _MAX_INTERVALS:
            return IntegralResult(total.item(), total_err, False)
        order = np.argsort(-np.where(splittable, err, -1.0))
        cum = np.cumsum(err[order])
        n_split = int(np.searchsorted(cum, 0.5 * total_err)) + 1
        chosen = order[:n_split]
        chosen = chosen[splittable[chosen]]
        keep = np.ones(lo.size, dtype=bool)
        keep[chosen] = False
        mid = 0.5 * (lo[chosen] + hi[chosen])
        new_lo = np.concatenate([lo[chosen], mid])
        new_hi = np.concatenate([mid, hi[chosen]])
        new_val, new_err = _gk15(f, new_lo, new_hi)
        new_depth = np.concatenate([depth[chosen], depth[chosen]]) + 1
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        val = np.concatenate([val[keep], new_val])
        err = np.concatenate([err[keep], new_err])
        depth = np.concatenate([depth[keep], new_depth])


def geometric_points(upper: float, levels: int = 24) -> list[float]:
    """Breakpoints upper/2, upper/4, ... grading a mesh toward zero."""
    return [upper * 0.5**k for k in range(1, levels + 1)]


def _derivative(f: Callable, x: float, h: float = 1e-3) -> float:
    """Fourth-order central difference."""
    pts = np.array([x - 2 * h, x - h, x + h, x + 2 * h])
    y = np.asarray(f(pts), dtype=float)
    return float((y[0] - 8 * y[1] + 8 * y[2] - y[3]) / (12 * h))


def integrate_sphere_subtracted(
    psi: Callable,
    d: int,
    spec: QuadratureSpec = DEFAULT_SPEC,
    split: float = 1.0,
) -> IntegralResult:
    """omega_{d-1} * int_0^2 (psi(s) - psi(1)) / (2 log s) s^{d-1} ds.

    The quotient is continuous at s = 1 (limit psi'(1)/2) and tends to zero
    at s = 0.  ``split`` is an interior breakpoint near the sphere; moving it
    does not change the value because the singularity is removable.
    """
    p1 = float(np.real(psi(np.array([1.0]))[0]))
    if not math.isfinite(p1):
        raise ValueError("psi(1) is not finite")
    slope: list[float] = []

    def integrand(s):
        v = np.asarray(psi(s), dtype=float)
        if not np.all(np.isfinite(v)):
            raise ValueError("psi returned a non-finite sample")
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (v - p1) / (2.0 * np.log(s)) * s ** (d - 1)
        near = np.abs(s - 1.0) < 1e-7
        if near.any():
            if not slope:
                slope.append(_derivative(psi, 1.0))
            out = np.where(near, 0.5 * slope[0] * s ** (d - 1), out)
        return np.where(s == 0.0, 0.0, out)

    pts = geometric_points(0.5, 20) + [0.5, split, 1.5]
    res = integrate_adaptive(integrand, 0.0, 2.0, spec, pts)
    return res.scaled(sphere_area(d))


def bessel_zeros(nu: float, kmax: int, kmin: int = 1) -> np.ndarray:
    """Positive zeros j_{nu,k}, k = kmin..kmax: McMahon estimate polished by Newton."""
    k = np.arange(kmin, kmax + 1, dtype=float)
    beta = (k + 0.5 * nu - 0.25) * math.pi
    mu = 4.0 * nu * nu
    z = beta - (mu - 1) / (8 * beta) - 4 * (mu - 1) * (7 * mu - 31) / (3 * (8 * beta) ** 3)
    # McMahon is poor for the first zeros of higher orders; Newton fixes that
    for _ in range(4):
        jz = _jv(nu, z)
        z = z - jz / (nu / z * jz - _jv(nu + 1, z))
    return z


def _first_zero_index(nu: float, t: float) -> int:
    """Smallest k with j_{nu,k} > t (estimate, then corrected)."""
    k = max(1, int(t / math.pi - 0.5 * nu + 0.25) - 1)
    while bessel_zeros(nu, k, k)[0] <= t:
        k += 1
    while k > 1 and bessel_zeros(nu, k - 1, k - 1)[0] > t:
        k -= 1
    return k


def _block_integrals(g: Callable, nu: float, x: float, edges: np.ndarray):
    """20-point Gauss-Legendre on each block, with a 10-point comparison."""
    lo, hi = edges[:-1], edges[1:]
    centre, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    out = []
    for nodes, weights in (_BLOCK_HI, _BLOCK_LO):
        r = centre[:, None] + half[:, None] * nodes[None, :]
        y = _evaluate(g, r) * _jv(nu, r * x)
        out.append(half * (y @ weights))
    return out[0], np.abs(out[0] - out[1])


def _euler_average(partial: np.ndarray) -> float:
    s = partial.astype(float)
    while s.size > 1:
        s = 0.5 * (s[:-1] + s[1:])
    return float(s[0])


def integrate_bessel_blocks(
    g: Callable, nu: float, x: float, a: float, b: float, spec: QuadratureSpec = DEFAULT_SPEC
) -> IntegralResult:
    """Finite-range int_a^b g(r) J_nu(r x) dr with zeros of J_nu(r x) as breakpoints."""
    if not x > 0:
        raise ValueError("x must be positive")
    k0 = _first_zero_index(nu, a * x)
    k1 = _first_zero_index(nu, b * x) - 1
    if k1 < k0:
        return integrate_adaptive(lambda r: g(r) * _jv(nu, r * x), a, b, spec)
    zeros = bessel_zeros(nu, k1, k0) / x
    zeros = zeros[(zeros > a) & (zeros < b)]
    if zeros.size == 0:
        return integrate_adaptive(lambda r: g(r) * _jv(nu, r * x), a, b, spec)
    head = integrate_adaptive(lambda r: g(r) * _jv(nu, r * x), a, zeros[0], spec)
    tail = integrate_adaptive(lambda r: g(r) * _jv(nu, r * x), zeros[-1], b, spec)
    if zeros.size > 1:
        vals, errs = _block_integrals(g, nu, x, zeros)
        body = IntegralResult(float(math.fsum(vals)), float(errs.sum()), True)
    else:
        body = IntegralResult(0.0, 0.0, True)
    total = combine([head, body, tail])
    return IntegralResult(total.value, total.err_estimate,
                          total.converged and total.err_estimate <= spec.tolerance(total.value))


def integrate_osc_bessel(
    g: Callable,
    nu: float,
    x: float,
    r0: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> IntegralResult:
    """int_{r0}^inf g(r) J_nu(r x) dr for an amplitude g decaying to zero.

    The range beyond the first zero of J_nu(r x) past r0 is cut at
    consecutive zeros; each block is a fixed Gauss-Legendre rule.  With
    ``spec.accel`` the partial sums are Euler-averaged (repeated means of
    neighbouring partial sums, skipping the first quarter) and the error is
    the change between using n and n-1 blocks; the block count doubles until
    that error meets the tolerance.  Without acceleration blocks are summed
    until the last one falls under the tolerance, whose magnitude bounds the
    remainder of an alternating series.
    """
    if not x > 0:
        raise ValueError("integrate_osc_bessel needs x > 0 (no oscillation at x = 0)")
    k0 = _first_zero_index(nu, r0 * x)
    first = bessel_zeros(nu, k0, k0)[0] / x
    if first > r0:
        head = integrate_adaptive(lambda r: g(r) * _jv(nu, r * x), r0, first, spec)
    else:
        head = IntegralResult(0.0, 0.0, True)

    n = spec.osc_blocks
    vals = np.empty(0)
    errs = np.empty(0)
    while True:
        if vals.size < n:
            edges = bessel_zeros(nu, k0 + n, k0 + vals.size) / x
            v, e = _block_integrals(g, nu, x, edges)
            vals = np.concatenate([vals, v])
            errs = np.concatenate([errs, e])
        partial = head.value + np.cumsum(vals)
        block_err = float(errs.sum()) + head.err_estimate
        if spec.accel:
            window = partial[max(n // 4, n - _EULER_WINDOW):]
            value = _euler_average(window)
            err = abs(value - _euler_average(window[:-1])) + block_err
        else:
            value = float(partial[-1])
            err = abs(float(vals[-1])) + block_err
        tol = spec.tolerance(value)
        if err <= tol and head.converged:
            return IntegralResult(value, err, True)
        if n >= _MAX_OSC_BLOCKS:
            return IntegralResult(value, err, False)
        n *= 2


def heat_time_integral(d: int, r: float, spec: QuadratureSpec | None = None) -> float:
    """int_0^inf (4 pi t)^{-d/2} exp(-r^2 / 4t) dt for d >= 3.

    With u = r^2/(4t) and then u = v^2 the integral becomes
    r^{2-d} / (4 pi^{d/2}) * 2 int_0^inf v^{d-3} exp(-v^2) dv, whose integrand
    is smooth on [0, inf).
    """
    if d < 3:
        raise DivergenceError("the heat-kernel time integral diverges in dimensions 1 and 2")
    if not r > 0:
        raise ValueError("r must be positive")
    spec = spec or QuadratureSpec(abs_tol=1e-15, rel_tol=1e-13)
    vmax = math.sqrt(745.0)
    res = integrate_adaptive(lambda v: 2.0 * v ** (d - 3) * np.exp(-v * v), 0.0, vmax, spec,
                             points=[1.0, 2.0, 4.0, 8.0, 16.0])
    return r ** (2 - d) / (4.0 * math.pi ** (d / 2)) * res.value


__all__ = [
    "DEFAULT_SPEC",
    "DivergenceError",
    "IntegralResult",
    "QuadratureSpec",
    "bessel_zeros",
    "combine",
    "geometric_points",
    "heat_time_integral",
    "integrate_adaptive",
    "integrate_bessel_blocks",
    "integrate_osc_bessel",
    "integrate_sphere_subtracted",
]
