"""Fourier-side checks of the fundamental solution as a distribution.

All pairings are against radial test functions psi on the Fourier side, so
restrictions to the unit sphere become point evaluations at s = 1 and every
pairing is a one-dimensional integral weighted by omega_{d-1} s^{d-1}.

The renormalized pairing splits at s = 2:

    <E1_log, psi> = omega int_0^2 (psi(s) - psi(1)) / (2 log s) s^{d-1} ds
    <E2_log, psi> = omega int_2^inf psi(s) / (2 log s) s^{d-1} ds
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from .fundsol import remainder_symbol
from .logop import RadialProfile
from .quadrature import (
    DEFAULT_SPEC,
    IntegralResult,
    QuadratureSpec,
    _derivative,
    combine,
    geometric_points,
    integrate_adaptive,
    integrate_sphere_subtracted,
)
from .specfun import sphere_area

# Beyond this radius every built-in Schwartz witness is below 1e-300.
_SCHWARTZ_CUTOFF = 30.0


@dataclass(frozen=True)
class Witness:
    name: str
    psi: RadialProfile
    vanishing_order_at_0: int | Literal["all_orders"]
    support: tuple[float, float]

    def __post_init__(self):
        lo, hi = self.support
        if not 0 <= lo < hi:
            raise ValueError("support must be an interval [lo, hi] with 0 <= lo < hi")
        if self.vanishing_order_at_0 != "all_orders" and not (
            isinstance(self.vanishing_order_at_0, int) and self.vanishing_order_at_0 >= 0
        ):
            raise ValueError("vanishing_order_at_0 must be 'all_orders' or a nonnegative int")

    def __call__(self, s):
        return self.psi(s)

    @property
    def upper(self) -> float:
        return min(self.support[1], _SCHWARTZ_CUTOFF)

    def transformed(self, name: str, g: Callable) -> "Witness":
        """Witness s -> g(s) psi(s) on the same support (g smooth)."""
        base = self.psi
        profile = RadialProfile(lambda s: g(s) * base(s), decay_class=base.decay_class,
                                support=base.support, name=name)
        return Witness(name, profile, self.vanishing_order_at_0, self.support)

    def flagged(self) -> bool:
        """True for finite-order witnesses (integrable but not Lizorkin)."""
        return self.vanishing_order_at_0 != "all_orders"


@dataclass(frozen=True)
class PairingResult:
    value: complex
    err_estimate: float
    converged: bool = True

    def __post_init__(self):
        if not self.err_estimate >= 0:
            raise ValueError("err_estimate must be nonnegative")


@dataclass(frozen=True)
class SingleLayerSpec:
    kind: Literal["uniform_measure", "radial_derivative_of_measure"]
    weight: float = 1.0

    def __post_init__(self):
        if self.kind not in ("uniform_measure", "radial_derivative_of_measure"):
            raise ValueError(f"unknown single-layer kind {self.kind!r}")
        if not math.isfinite(self.weight):
            raise ValueError("weight must be finite")


def _bump(lo: float, hi: float) -> Callable:
    """exp(-1/((s-lo)(hi-s))) on (lo, hi), zero elsewhere."""

    def f(s):
        s = np.asarray(s, dtype=float)
        inside = (s > lo) & (s < hi)
        q = np.where(inside, (s - lo) * (hi - s), 1.0)
        return np.where(inside, np.exp(-1.0 / q), 0.0)

    return f


def _flat(s):
    s = np.asarray(s, dtype=float)
    pos = s > 0
    safe = np.where(pos, s, 1.0)
    return np.where(pos, np.exp(-safe * safe - 1.0 / (safe * safe)), 0.0)


def builtin_witnesses() -> list[Witness]:
    """w_flat (flat at 0, Schwartz), w_bump (on [1/2, 4], psi(1) = 1), w_shell (on [3, 5])."""
    raw = _bump(0.5, 4.0)
    norm = float(raw(1.0))
    shell = _bump(3.0, 5.0)
    return [
        Witness("w_flat", RadialProfile(_flat, name="w_flat"), "all_orders", (0.0, math.inf)),
        Witness(
            "w_bump",
            RadialProfile(lambda s: raw(s) / norm, decay_class="compact_support", support=(0.5, 4.0), name="w_bump"),
            "all_orders",
            (0.5, 4.0),
        ),
        Witness(
            "w_shell",
            RadialProfile(shell, decay_class="compact_support", support=(3.0, 5.0), name="w_shell"),
            "all_orders",
            (3.0, 5.0),
        ),
    ]


def witness(name: str) -> Witness:
    for w in builtin_witnesses():
        if w.name == name:
            return w
    raise KeyError(f"unknown witness {name!r}")


def _radial_integral(g: Callable, w: Witness, d: int, a: float, b: float, spec: QuadratureSpec) -> IntegralResult:
    """omega int_a^b g(s) s^{d-1} ds restricted to the witness support."""
    lo, hi = max(a, w.support[0]), min(b, w.upper)
    if lo >= hi:
        return IntegralResult(0.0, 0.0, True)
    pts = [p for p in geometric_points(hi, 20) if p > lo] if lo == 0 else []
    res = integrate_adaptive(lambda s: g(s) * s ** (d - 1), lo, hi, spec, pts)
    return res.scaled(sphere_area(d))


def pairing_inner(w: Witness, d: int, spec: QuadratureSpec = DEFAULT_SPEC) -> IntegralResult:
    """<E1_log, psi>, the sphere-subtracted part on |xi| < 2."""
    return integrate_sphere_subtracted(w.psi, d, spec)


def pairing_outer(w: Witness, d: int, spec: QuadratureSpec = DEFAULT_SPEC) -> IntegralResult:
    """<E2_log, psi> = omega int_2^inf psi / (2 log s) s^{d-1} ds."""
    return _radial_integral(lambda s: w.psi(s) / (2.0 * np.log(s)), w, d, 2.0, math.inf, spec)


def pairing_elog(w: Witness, d: int, spec: QuadratureSpec = DEFAULT_SPEC) -> PairingResult:
    """Renormalized pairing <E_log, psi> = <E1_log, psi> + <E2_log, psi>."""
    total = combine([pairing_inner(w, d, spec), pairing_outer(w, d, spec)])
    return PairingResult(complex(total.value), total.err_estimate, total.converged)


def division_residual(w: Witness, d: int, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """| <E_log, log(s^2) psi> - int psi |.

    The left side runs through the singular, sphere-subtracted path (whose
    subtraction is zero because log 1 = 0); the right side is a plain
    adaptive integral of psi s^{d-1} with no subtraction at all.
    """
    lhs = pairing_elog(w.transformed(w.name + "*log", lambda s: np.log(s * s)), d, spec)
    rhs = _radial_integral(w.psi, w, d, 0.0, math.inf, spec)
    return abs(lhs.value - rhs.value)


def liouville_annihilation(sl: SingleLayerSpec, w: Witness, d: int) -> complex:
    """<weight * sigma_S, log(s^2) psi> = weight * omega * log(1) * psi(1), which is 0."""
    if sl.kind != "uniform_measure":
        raise ValueError("liouville_annihilation takes the uniform sphere measure")
    return complex(sl.weight * sphere_area(d) * math.log(1.0) * float(w.psi(1.0)))


def counterexample_certificate(w: Witness, d: int) -> complex:
    """Closed form -2 omega psi(1) of the radial-derivative pairing."""
    return complex(-2.0 * sphere_area(d) * float(w.psi(1.0)))


def liouville_counterexample(w: Witness, d: int, h: float = 1e-3) -> complex:
    """<d_r sigma_S, log(s^2) psi> = -omega [d/ds (log(s^2) psi(s) s^{d-1})]_{s=1}.

    Evaluated by a fourth-order central difference, independent of the
    closed form in :func:`counterexample_certificate`.
    """
    f = lambda s: np.log(s * s) * w.psi(s) * s ** (d - 1)  # noqa: E731
    return complex(-sphere_area(d) * _derivative(f, 1.0, h))


def _helm_subtracted(w: Witness, d: int, spec: QuadratureSpec) -> IntegralResult:
    """<E1_Helm, psi> = omega int_0^2 (psi(s) - psi(1)) / (s^2 - 1) s^{d-1} ds."""
    p1 = float(w.psi(1.0))
    slope: list[float] = []

    def integrand(s):
        v = np.asarray(w.psi(s), dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (v - p1) / (s * s - 1.0) * s ** (d - 1)
        near = np.abs(s - 1.0) < 1e-7
        if near.any():
            if not slope:
                slope.append(_derivative(w.psi, 1.0))
            out = np.where(near, 0.5 * slope[0] * s ** (d - 1), out)
        return out

    res = integrate_adaptive(integrand, 0.0, 2.0, spec, geometric_points(0.5, 20) + [0.5, 1.0, 1.5])
    return res.scaled(sphere_area(d))


def classification_terms(w: Witness, d: int, spec: QuadratureSpec = DEFAULT_SPEC) -> dict[str, IntegralResult]:
    """The four pairings of the sphere-term comparison, computed independently.

    log: <E1_log, psi>; helm: <E1_Helm, psi>; rem: <E1_rem, psi> = omega int_0^2 h psi s^{d-1};
    sphere: omega psi(1) int_0^2 h s^{d-1}, with h the remainder symbol.
    """
    omega = sphere_area(d)
    pts = geometric_points(0.5, 20) + [0.5, 1.0, 1.5]
    rem = integrate_adaptive(lambda s: remainder_symbol(s) * w.psi(s) * s ** (d - 1), 0.0, 2.0, spec, pts)
    hint = integrate_adaptive(lambda s: remainder_symbol(s) * s ** (d - 1), 0.0, 2.0, spec, pts)
    return {
        "log": pairing_inner(w, d, spec),
        "helm": _helm_subtracted(w, d, spec),
        "rem": rem.scaled(omega),
        "sphere": hint.scaled(omega * float(w.psi(1.0))),
    }


def classification_crosscheck(w: Witness, d: int, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Residual of <E1_log - E1_Helm, psi> = <E1_rem, psi> - omega psi(1) int_0^2 h s^{d-1}.

    The difference of the two subtracted pairings is the remainder pairing
    minus a single-layer term carried by the sphere.
    """
    t = classification_terms(w, d, spec)
    lhs = t["log"].value - t["helm"].value
    rhs = t["rem"].value - t["sphere"].value
    return abs(lhs - rhs)
